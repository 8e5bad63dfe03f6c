#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vfgrad/adjoint.hpp"

namespace vfgrad {

/// A C^1 curve theta : [0, 1] -> R^q. Lines are affine in t; cubic splines
/// are natural splines through knots placed at t_j = j / (K - 1) and extend
/// past [0, 1] by their end polynomials.
class CurveSpec {
 public:
  enum class Kind { kLine, kCubicSpline };

  static CurveSpec line(const Vector& from, const Vector& to);
  /// At least two knots of equal dimension.
  static CurveSpec cubic_spline(std::vector<Vector> knots);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(knots_.front().size()); }
  const std::vector<Vector>& knots() const { return knots_; }

  Vector theta(double t) const;
  Vector theta_dot(double t) const;
  /// Interior knots of a spline; empty for a line.
  std::vector<double> breakpoints() const;
  std::string describe() const;

 private:
  CurveSpec(Kind kind, std::vector<Vector> knots);
  int segment(double t) const;

  Kind kind_;
  std::vector<Vector> knots_;
  std::vector<Vector> second_;  // spline second derivatives at knots
};

struct FdGradient {
  Vector gradient;
  int solver_calls = 0;
};

/// Central differences of value(p, .) per coordinate; 2q solver calls.
/// Throws std::invalid_argument for h <= 0 and SolverFailure on a failed stencil.
FdGradient finite_diff_gradient(const ParametricProblem& p, const Vector& theta, double h,
                                const SolveOptions& solve = {});

struct ChainRuleOptions {
  int n_grid = 201;
  double h = 1e-5;
  double tol = 1e-4;
  /// Pass-fraction threshold; defaults to 1 - 3 / n_grid.
  std::optional<double> threshold;
  SolveOptions solve;
  CertifyOptions certify;
  bool parallel = true;

  double effective_threshold() const;
};

struct ChainRuleReport {
  std::string problem;
  std::string curve;
  double h = 0.0;
  double tol = 0.0;
  double threshold = 0.0;
  std::vector<double> grid;
  std::vector<double> lhs;      // d/dt f(theta(t)), central difference
  std::vector<double> rhs;      // <u(theta(t)), theta'(t)>
  std::vector<double> abs_err;
  std::vector<bool> passed;
  std::vector<bool> skipped;    // solver failure at this grid point
  std::vector<double> exceptional_points;
  int skipped_count = 0;
  /// Passing points over all grid points (skipped points count as not passing).
  double pass_fraction = 0.0;

  bool ok() const { return pass_fraction >= threshold; }
};

/// Compares d/dt f(theta(t)) with <u, theta'(t)> on a uniform grid of [0, 1].
/// Grid points within 1e-8 of a curve breakpoint move by half a grid step.
ChainRuleReport chain_rule_check(const ParametricProblem& p, const CurveSpec& curve,
                                 const ChainRuleOptions& opts = {});

struct DiniOptions {
  std::vector<double> h_list{1e-2, 1e-3, 1e-4};
  double tol = 1e-3;
  SolveOptions solve;
  CertifyOptions certify;
};

struct DiniReport {
  Vector theta;
  Vector direction;
  std::vector<double> inner_products;  // <u_i, d> per supplied KKT point
  double lower = 0.0;                  // min <u_i, d>
  double upper = 0.0;                  // max <u_i, d>
  std::vector<double> h_list;
  std::vector<double> quotients;       // (f(theta + t d) - f(theta)) / t
  std::vector<bool> inside;
  double tol = 0.0;
  bool ok = false;
};

/// Checks lower - tol <= quotient <= upper + tol for every t in h_list.
/// Throws std::invalid_argument for d == 0 or an empty point list, and
/// UncertifiedPoint for a point that is not KKT at theta.
DiniReport dini_sandwich_check(const ParametricProblem& p, const Vector& theta,
                               const Vector& d, const std::vector<PrimalDualPoint>& kkt_points,
                               const DiniOptions& opts = {});

struct CostReport {
  int q = 0;
  int asm_calls = 0;
  int fd_calls = 0;
  double asm_seconds = 0.0;
  double fd_seconds = 0.0;
  bool cheaper = false;  // asm_calls < fd_calls
};

CostReport cost_report(const ParametricProblem& p, const Vector& theta,
                       const SolveOptions& solve = {}, double h = 1e-5);

}  // namespace vfgrad
