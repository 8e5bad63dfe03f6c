#include "vfgrad/optimize.hpp"

#include <cmath>
#include <stdexcept>

namespace vfgrad {

std::string to_string(StepSchedule schedule) {
  return schedule == StepSchedule::kHarmonic ? "harmonic" : "sqrt";
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kGradTol:
      return "grad_tol";
    case StopReason::kMaxIter:
      return "max_iter";
    case StopReason::kSolverFailure:
      return "solver_failure";
    case StopReason::kUnbounded:
      return "unbounded";
  }
  return "?";
}

StepSchedule parse_schedule(const std::string& name) {
  if (name == "harmonic") return StepSchedule::kHarmonic;
  if (name == "sqrt") return StepSchedule::kInverseSqrt;
  throw std::invalid_argument("unknown step schedule '" + name + "' (harmonic|sqrt)");
}

double DescentOptions::alpha(int k) const {
  return schedule == StepSchedule::kHarmonic ? alpha0 / (k + 1.0)
                                             : alpha0 / std::sqrt(k + 1.0);
}

void DescentOptions::validate() const {
  if (!(s > 0.0)) throw std::invalid_argument("descent: s must be > 0");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("descent: alpha0 must be > 0");
  if (max_iter < 0) throw std::invalid_argument("descent: max_iter must be >= 0");
  if (grad_tol < 0.0) throw std::invalid_argument("descent: grad_tol must be >= 0");
  solve.validate();
}

DescentTrace small_step_descent(const ParametricProblem& p, const Vector& theta0,
                                const DescentOptions& opts) {
  opts.validate();
  if (theta0.size() != p.q) throw std::invalid_argument("descent: theta0 size mismatch");
  DescentTrace trace;
  trace.s = opts.s;
  trace.schedule = to_string(opts.schedule);

  Vector theta = theta0;
  for (int k = 0;; ++k) {
    AdjointGradient g;
    try {
      g = adjoint_gradient(p, theta, opts.solve, opts.certify);
    } catch (const SolverFailure&) {
      trace.stop_reason = StopReason::kSolverFailure;
      return trace;
    }
    const double unorm = g.u.norm();
    trace.iterates.push_back(theta);
    trace.values.push_back(g.source.objective_value);
    trace.asm_norms.push_back(unorm);
    if (unorm <= opts.grad_tol) {
      trace.stop_reason = StopReason::kGradTol;
      return trace;
    }
    if (k == opts.max_iter) {
      trace.stop_reason = StopReason::kMaxIter;
      return trace;
    }
    theta = theta - (opts.s * opts.alpha(k)) * g.u;
    if (!theta.allFinite() || theta.norm() > opts.divergence_bound) {
      trace.stop_reason = StopReason::kUnbounded;
      return trace;
    }
  }
}

}  // namespace vfgrad
