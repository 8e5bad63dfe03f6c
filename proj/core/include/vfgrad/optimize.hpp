#pragma once

#include <string>
#include <vector>

#include "vfgrad/adjoint.hpp"

namespace vfgrad {

enum class StepSchedule { kHarmonic, kInverseSqrt };  // alpha0/(k+1), alpha0/sqrt(k+1)

enum class StopReason { kGradTol, kMaxIter, kSolverFailure, kUnbounded };

std::string to_string(StepSchedule schedule);
std::string to_string(StopReason reason);
/// Accepts "harmonic" and "sqrt". Throws std::invalid_argument otherwise.
StepSchedule parse_schedule(const std::string& name);

struct DescentOptions {
  double s = 1.0;
  double alpha0 = 1.0;
  StepSchedule schedule = StepSchedule::kHarmonic;
  int max_iter = 500;
  double grad_tol = 1e-8;
  double divergence_bound = 1e6;  // abort once ||theta|| exceeds this
  SolveOptions solve;
  CertifyOptions certify;

  double alpha(int k) const;
  void validate() const;
};

/// Entry k holds theta_k, f(theta_k) and ||u_k||. The final iterate is the
/// last entry; no entry is recorded for a point whose solve failed.
struct DescentTrace {
  std::vector<Vector> iterates;
  std::vector<double> values;
  std::vector<double> asm_norms;
  double s = 1.0;
  std::string schedule;
  StopReason stop_reason = StopReason::kMaxIter;

  int steps() const { return static_cast<int>(iterates.size()) - 1; }
};

/// theta_{k+1} = theta_k - s alpha_k u_k with u_k the adjoint gradient at
/// theta_k, for at most max_iter steps.
DescentTrace small_step_descent(const ParametricProblem& p, const Vector& theta0,
                                const DescentOptions& opts = {});

}  // namespace vfgrad
