#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "vfgrad/problem.hpp"
#include "vfgrad/solver.hpp"

namespace vfgrad {

struct CertifyOptions {
  /// Certified iff ||v + J_x C^T lambda|| <= tol * (1 + ||v||).
  double tol = 1e-6;
  /// Extra draws from the problem's selection sampler when the supplied
  /// selection alone leaves the x-block residual large.
  int selection_samples = 8;
  std::uint64_t seed = 0;
};

/// u = w + J_theta C^T lambda at a primal-dual point, where (v, w) is a
/// (possibly convexified) selection of D_F.
struct AdjointGradient {
  Vector u;
  double x_block_residual = 0.0;
  bool certified = false;
  PrimalDualPoint source;
  int solver_calls = 0;
  /// Convex weights over [supplied selection, sampled selections...] when
  /// the sampler was needed; empty when the single selection sufficed.
  std::optional<Vector> selection_weights;
};

/// Thrown by adjoint_gradient_at when the point is not a KKT point.
class UncertifiedPoint : public std::invalid_argument {
 public:
  UncertifiedPoint(const std::string& what, KktResidual residual)
      : std::invalid_argument(what), residual_(residual) {}
  const KktResidual& residual() const { return residual_; }

 private:
  KktResidual residual_;
};

/// One primal-dual solve followed by the adjoint formula. Throws
/// SolverFailure when the solve fails; an uncertified result is returned with
/// certified == false.
AdjointGradient adjoint_gradient(const ParametricProblem& p, const Vector& theta,
                                 const SolveOptions& solve = {},
                                 const CertifyOptions& certify = {});

/// Same formula at a caller-supplied point. The point must satisfy feasibility,
/// dual feasibility and complementarity to 1e-6 and the x-block certification;
/// otherwise UncertifiedPoint is thrown. solver_calls is 0.
AdjointGradient adjoint_gradient_at(const ParametricProblem& p, const PrimalDualPoint& pt,
                                    const CertifyOptions& certify = {});

struct NlpAdjointGradient {
  AdjointGradient gradient;  // on the stacked conic form
  Vector lambda_g;           // multipliers of G <= 0
  Vector mu_h;               // multipliers of H = 0
};

/// u = grad_theta F + J_theta G^T lambda + J_theta H^T mu.
NlpAdjointGradient adjoint_gradient_nlp(const NlpProblem& p, const Vector& theta,
                                        const SolveOptions& solve = {},
                                        const CertifyOptions& certify = {});

}  // namespace vfgrad
