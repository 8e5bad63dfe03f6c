#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "vfgrad/adjoint.hpp"
#include "vfgrad/library.hpp"
#include "vfgrad/verify.hpp"

namespace vfgrad {
namespace {

using testing::vec;

PrimalDualPoint point(const Vector& th, const Vector& x, const Vector& l) {
  PrimalDualPoint pt;
  pt.theta = th;
  pt.x = x;
  pt.lambda = l;
  pt.status = SolveStatus::kSolved;
  return pt;
}

SolveOptions solver_only() {
  SolveOptions o;
  o.use_oracle = false;
  return o;
}

TEST(AdjointGradient, FailclarkeOracleAtZeroGivesOne) {
  const AdjointGradient g = adjoint_gradient(library("failclarke"), vec({0.0}));
  EXPECT_EQ(g.u(0), 1.0);
  EXPECT_TRUE(g.certified);
  EXPECT_EQ(g.solver_calls, 1);
  EXPECT_LE(g.x_block_residual, 1e-10);
}

TEST(AdjointGradient, FailclarkeAwayFromZeroMatchesFiniteDifferences) {
  const ParametricProblem p = library("failclarke");
  for (const SolveOptions& o : {SolveOptions{}, solver_only()}) {
    const AdjointGradient g = adjoint_gradient(p, vec({0.5}), o);
    EXPECT_TRUE(g.certified);
    EXPECT_NEAR(g.u(0), 0.0, 1e-8);
    EXPECT_NEAR(finite_diff_gradient(p, vec({0.5}), 1e-5, o).gradient(0), g.u(0), 1e-6);
  }
}

TEST(AdjointGradient, ScalarQpActive) {
  const ParametricProblem p = library("scalar_qp");
  EXPECT_DOUBLE_EQ(adjoint_gradient(p, vec({1.0})).u(0), 1.0);
  EXPECT_NEAR(adjoint_gradient(p, vec({1.0}), solver_only()).u(0), 1.0, 1e-8);
}

TEST(AdjointGradient, SolverFailurePropagates) {
  SolveOptions o = solver_only();
  o.max_outer = 1;
  o.max_inner = 1;
  o.starts = 1;
  o.tol = 1e-15;
  EXPECT_THROW(adjoint_gradient(library("scalar_qp"), vec({1.0}), o), SolverFailure);
}

TEST(AdjointGradient, UncertifiedPointIsFlaggedNotDropped) {
  ParametricProblem p = library("scalar_qp");
  // Oracle returning a multiplier that breaks stationarity.
  p.oracle = [](const Vector& th) { return point(th, th, 2.0 * th); };
  const AdjointGradient g = adjoint_gradient(p, vec({1.0}));
  EXPECT_FALSE(g.certified);
  EXPECT_DOUBLE_EQ(g.x_block_residual, 1.0);
  EXPECT_DOUBLE_EQ(g.u(0), 2.0);
}

TEST(AdjointGradient, SmoothRegionsMatchKnownGradient) {
  std::mt19937_64 rng(99);
  for (const std::string name : {"scalar_qp", "ring", "soc_norm", "bilevel_quad"}) {
    const ParametricProblem p = library(name);
    for (int k = 0; k < 20; ++k) {
      Vector th = testing::uniform(rng, p.q);
      bool near_kink = name == "soc_norm" ? th.norm() < 0.1 : th.cwiseAbs().minCoeff() < 0.1;
      if (near_kink) continue;
      const Vector ref = p.known_gradient(th);
      EXPECT_LE((adjoint_gradient(p, th).u - ref).norm(), 1e-6) << name;
      EXPECT_LE((adjoint_gradient(p, th, solver_only()).u - ref).norm(), 1e-6) << name;
    }
  }
}

TEST(AdjointGradientAt, RingIsSelectionIndependent) {
  const ParametricProblem p = library("ring");
  const Vector th = vec({1.0});
  EXPECT_NEAR(adjoint_gradient_at(p, point(th, vec({1.0, 0.0}), Vector(0))).u(0), 0.0, 1e-15);
  EXPECT_NEAR(adjoint_gradient_at(p, point(th, vec({0.0, 1.0}), Vector(0))).u(0), 0.0, 1e-15);
  for (const PrimalDualPoint& pt : p.known_kkt_points(th)) {
    const AdjointGradient g = adjoint_gradient_at(p, pt);
    EXPECT_NEAR(g.u(0), 0.0, 1e-12);
    EXPECT_EQ(g.solver_calls, 0);
  }
}

TEST(AdjointGradientAt, SocNormGivesUnitDirection) {
  const ParametricProblem p = library("soc_norm", {{"q", 2}});
  const Vector th = vec({0.6, 0.8});
  const AdjointGradient g = adjoint_gradient_at(p, point(th, vec({1.0}), vec({-1.0, 0.6, 0.8})));
  EXPECT_NEAR((g.u - th).norm(), 0.0, 1e-15);
}

TEST(AdjointGradientAt, FailclarkeZeroPointGivesZero) {
  const ParametricProblem p = library("failclarke");
  const AdjointGradient g = adjoint_gradient_at(p, point(vec({0.0}), vec({0.0, 0.0}), Vector::Zero(3)));
  EXPECT_EQ(g.u(0), 0.0);
  const AdjointGradient artifact =
      adjoint_gradient_at(p, point(vec({0.0}), vec({-1.0, 0.0}), vec({0.0, 0.0, 1.0})));
  EXPECT_EQ(artifact.u(0), 1.0);
}

TEST(AdjointGradientAt, RejectsNonKktPoints) {
  const ParametricProblem p = library("scalar_qp");
  EXPECT_THROW(adjoint_gradient_at(p, point(vec({1.0}), vec({1.0}), vec({0.0}))), UncertifiedPoint);
  try {
    adjoint_gradient_at(p, point(vec({1.0}), vec({0.0}), vec({0.0})));
    FAIL() << "infeasible point accepted";
  } catch (const UncertifiedPoint& e) {
    EXPECT_DOUBLE_EQ(e.residual().primal_feasibility, 1.0);
  }
}

TEST(AdjointGradient, NonsmoothKinkIsCertifiedThroughConvexWeights) {
  const ParametricProblem p = testing::abs_tracking();
  const AdjointGradient g = adjoint_gradient(p, vec({0.3}));
  EXPECT_TRUE(g.certified);
  ASSERT_TRUE(g.selection_weights.has_value());
  EXPECT_NEAR(g.selection_weights->sum(), 1.0, 1e-12);
  EXPECT_LE(g.x_block_residual, 1e-6);
  EXPECT_NEAR(g.u(0), 0.0, 1e-6);

  CertifyOptions none;
  none.selection_samples = 0;
  const AdjointGradient single = adjoint_gradient(p, vec({0.3}), {}, none);
  EXPECT_FALSE(single.certified);
  EXPECT_DOUBLE_EQ(single.x_block_residual, 1.0);
}

TEST(AdjointGradientNlp, UnconstrainedTracking) {
  const NlpProblem nlp = testing::tracking_nlp();
  SolveOptions o = solver_only();
  for (double th : {-2.0, 0.0, 1.5}) {
    const NlpAdjointGradient g = adjoint_gradient_nlp(nlp, vec({th}), o);
    EXPECT_NEAR(g.gradient.u(0), 0.0, 1e-8);
    EXPECT_EQ(g.lambda_g.size(), 0);
    EXPECT_EQ(g.mu_h.size(), 0);
  }
}

TEST(AdjointGradientNlp, ScalarQpInactive) {
  const NlpAdjointGradient g = adjoint_gradient_nlp(*library_nlp("scalar_qp"), vec({-1.0}));
  EXPECT_EQ(g.gradient.u(0), 0.0);
  EXPECT_EQ(g.lambda_g(0), 0.0);
}

TEST(AdjointGradientNlp, BilevelQuadSplitsMultipliers) {
  const NlpProblem nlp = *library_nlp("bilevel_quad");
  const NlpAdjointGradient g = adjoint_gradient_nlp(nlp, vec({1.0, -1.0}));
  EXPECT_TRUE(g.gradient.u.isApprox(vec({1.0, 0.0})));
  EXPECT_TRUE(g.lambda_g.isApprox(vec({1.0, 0.0})));
  const AdjointGradient conic = adjoint_gradient(nlp_to_conic(nlp), vec({1.0, -1.0}));
  EXPECT_EQ(conic.u, g.gradient.u);
}

TEST(AdjointGradientNlp, EqualityMultipliersLandInMu) {
  NlpProblem nlp = testing::tracking_nlp();
  nlp.m_h = 1;  // x = 2 theta
  nlp.h = [](const Vector& x, const Vector& th) { return vec({x(0) - 2.0 * th(0)}); };
  nlp.h_jac_x = [](const Vector&, const Vector&) { return Matrix::Ones(1, 1).eval(); };
  nlp.h_jac_theta = [](const Vector&, const Vector&) { return Matrix::Constant(1, 1, -2.0); };
  // f(th) = th^2, f' = 2 th; mu = -2 (x - th) = -2 th.
  const NlpAdjointGradient g = adjoint_gradient_nlp(nlp, vec({0.5}), solver_only());
  EXPECT_NEAR(g.gradient.u(0), 1.0, 1e-7);
  EXPECT_NEAR(g.mu_h(0), -1.0, 1e-7);
}

}  // namespace
}  // namespace vfgrad
