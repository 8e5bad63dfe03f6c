#include "vfgrad/adjoint.hpp"

#include <algorithm>

namespace vfgrad {
namespace {

constexpr double kPointTol = 1e-6;

AdjointGradient evaluate(const ParametricProblem& p, const PrimalDualPoint& pt,
                         const CertifyOptions& certify) {
  AdjointGradient out;
  out.source = pt;
  const GradSelection sel = p.grad_selection(pt.x, pt.theta);
  Vector jx_lambda = Vector::Zero(p.n);
  Vector jt_lambda = Vector::Zero(p.q);
  if (p.m > 0) {
    jx_lambda = p.jac_x(pt.x, pt.theta).transpose() * pt.lambda;
    jt_lambda = p.jac_theta(pt.x, pt.theta).transpose() * pt.lambda;
  }
  out.u = sel.dtheta + jt_lambda;
  out.x_block_residual = (sel.dx + jx_lambda).norm();
  out.certified = out.x_block_residual <= certify.tol * (1.0 + sel.dx.norm());
  if (out.certified || !p.selection_sampler || certify.selection_samples < 1) return out;

  // conv D_F may contain a better element than the single selection.
  const int k = certify.selection_samples + 1;
  Matrix v(p.n, k);
  Matrix w(p.q, k);
  v.col(0) = sel.dx;
  w.col(0) = sel.dtheta;
  for (int i = 1; i < k; ++i) {
    const GradSelection draw =
        p.selection_sampler(pt.x, pt.theta, certify.seed + static_cast<std::uint64_t>(i));
    v.col(i) = draw.dx;
    w.col(i) = draw.dtheta;
  }
  const Vector weights = simplex_least_squares(v, jx_lambda);
  const Vector v_mix = v * weights;
  const double residual = (v_mix + jx_lambda).norm();
  if (residual < out.x_block_residual) {
    out.u = w * weights + jt_lambda;
    out.x_block_residual = residual;
    out.selection_weights = weights;
    out.certified = residual <= certify.tol * (1.0 + v_mix.norm());
  }
  return out;
}

}  // namespace

AdjointGradient adjoint_gradient(const ParametricProblem& p, const Vector& theta,
                                 const SolveOptions& solve, const CertifyOptions& certify) {
  SolveReport report = solve_primal_dual_report(p, theta, solve);
  if (report.point.status == SolveStatus::kFailed) {
    throw SolverFailure("adjoint gradient: solver failed on problem '" + p.name + "'",
                        std::move(report));
  }
  AdjointGradient out = evaluate(p, report.point, certify);
  out.solver_calls = 1;
  return out;
}

AdjointGradient adjoint_gradient_at(const ParametricProblem& p, const PrimalDualPoint& pt,
                                    const CertifyOptions& certify) {
  const KktResidual res = kkt_residual(p, pt);
  AdjointGradient out = evaluate(p, pt, certify);
  KktResidual effective = res;
  effective.stationarity = out.x_block_residual;
  const double feas =
      std::max({res.primal_feasibility, res.dual_feasibility, res.complementarity});
  if (feas > kPointTol || !out.certified) {
    throw UncertifiedPoint("adjoint gradient: point is not a KKT point of '" + p.name +
                               "' (residual " + std::to_string(effective.max()) + ")",
                           effective);
  }
  out.solver_calls = 0;
  return out;
}

NlpAdjointGradient adjoint_gradient_nlp(const NlpProblem& p, const Vector& theta,
                                        const SolveOptions& solve,
                                        const CertifyOptions& certify) {
  NlpAdjointGradient out;
  out.gradient = adjoint_gradient(nlp_to_conic(p), theta, solve, certify);
  const Vector& lambda = out.gradient.source.lambda;
  out.lambda_g = lambda.head(p.m_g);
  out.mu_h = lambda.tail(p.m_h);
  return out;
}

}  // namespace vfgrad
