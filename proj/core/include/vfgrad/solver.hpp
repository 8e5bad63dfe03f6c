#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vfgrad/problem.hpp"

namespace vfgrad {

/// Residuals of the conic KKT system at (x, lambda, theta):
///   0 = v + Jx C^T lambda,  C in K,  lambda in K°,  <C, lambda> = 0.
struct KktResidual {
  double stationarity = 0.0;      // ||v + Jx C^T lambda||
  double primal_feasibility = 0.0;  // dist(K, C(x, theta))
  double dual_feasibility = 0.0;    // dist(K°, lambda)
  double complementarity = 0.0;     // |<C(x, theta), lambda>|
  std::optional<double> value_gap;  // F(x, theta) - known f(theta)

  double max() const;
};

struct SolveOptions {
  double tol = 1e-9;
  int max_outer = 100;
  int max_inner = 500;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double multiplier_clip = 1e8;
  std::uint64_t seed = 0;
  int starts = 3;           // seeded random initial points
  bool use_oracle = true;   // return the closed-form point when one exists
  double prox_init = 1.0;   // weight of the proximal term ||x - x_k||^2 / 2

  /// Throws std::invalid_argument unless tol > 0, growth > 1 and budgets >= 1.
  void validate() const;
};

struct SolveReport {
  PrimalDualPoint point;
  KktResidual residual;
  int outer_iterations = 0;
  int inner_iterations = 0;
  int starts_used = 0;
  /// Best primal infeasibility seen after each outer iteration of the
  /// selected start (non-increasing).
  std::vector<double> feasibility_trace;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, SolveReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// One element of solver_pd(theta). Uses the problem oracle when present and
/// opts.use_oracle is set; otherwise a proximal augmented Lagrangian method
/// over the cone constraint with a BFGS inner loop, restarted from
/// opts.starts seeded points. Failure is reported through status == kFailed.
///
/// Throws std::invalid_argument when the problem is nonsmooth and has no
/// oracle, or on dimension mismatch.
SolveReport solve_primal_dual_report(const ParametricProblem& p, const Vector& theta,
                                     const SolveOptions& opts = {});

PrimalDualPoint solve_primal_dual(const ParametricProblem& p, const Vector& theta,
                                  const SolveOptions& opts = {});

KktResidual kkt_residual(const ParametricProblem& p, const PrimalDualPoint& pt);

/// F at the solved (or oracle) point. Throws SolverFailure on failure.
double value(const ParametricProblem& p, const Vector& theta, const SolveOptions& opts = {});

}  // namespace vfgrad
