#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "vfgrad/library.hpp"
#include "vfgrad/solver.hpp"

namespace vfgrad {
namespace {

using testing::vec;

SolveOptions solver_only() {
  SolveOptions o;
  o.use_oracle = false;
  return o;
}

PrimalDualPoint point(const Vector& th, const Vector& x, const Vector& l) {
  PrimalDualPoint pt;
  pt.theta = th;
  pt.x = x;
  pt.lambda = l;
  pt.status = SolveStatus::kSolved;
  return pt;
}

TEST(Solve, ScalarQpActiveConstraint) {
  const SolveReport r = solve_primal_dual_report(library("scalar_qp"), vec({1.0}), solver_only());
  ASSERT_EQ(r.point.status, SolveStatus::kSolved);
  EXPECT_NEAR(r.point.x(0), 1.0, 1e-8);
  EXPECT_NEAR(r.point.lambda(0), 1.0, 1e-8);
  EXPECT_LE(r.residual.max(), 1e-9);
}

TEST(Solve, ScalarQpInactiveConstraint) {
  const PrimalDualPoint pt = solve_primal_dual(library("scalar_qp"), vec({-1.0}), solver_only());
  ASSERT_EQ(pt.status, SolveStatus::kSolved);
  EXPECT_NEAR(pt.x(0), 0.0, 1e-9);
  EXPECT_NEAR(pt.lambda(0), 0.0, 1e-9);
}

TEST(Solve, RingLandsOnTheMinimizerCircle) {
  const PrimalDualPoint pt = solve_primal_dual(library("ring"), vec({1.0}), solver_only());
  ASSERT_EQ(pt.status, SolveStatus::kSolved);
  EXPECT_LE(std::abs(pt.x.squaredNorm() - 1.0), 1e-6);
  EXPECT_EQ(pt.lambda.size(), 0);
  EXPECT_NEAR(pt.objective_value, 0.0, 1e-12);
}

TEST(Solve, UsesOracleWhenPresent) {
  const SolveReport r = solve_primal_dual_report(library("failclarke"), vec({0.0}));
  EXPECT_EQ(r.point.status, SolveStatus::kOracle);
  EXPECT_TRUE(r.point.x.isApprox(vec({-1.0, 0.0})));
  EXPECT_EQ(r.residual.max(), 0.0);
}

TEST(Solve, FailclarkeSaddleIsReached) {
  // F = x1 x2 makes the plain augmented Lagrangian unbounded below.
  for (double th : {-0.7, 0.0, 0.5}) {
    const SolveReport r = solve_primal_dual_report(library("failclarke"), vec({th}), solver_only());
    ASSERT_EQ(r.point.status, SolveStatus::kSolved) << th;
    EXPECT_LE(r.residual.max(), 1e-9);
    EXPECT_NEAR(r.point.objective_value, 0.0, 1e-8);
  }
}

TEST(Solve, NonsmoothWithoutOracleIsAContractViolation) {
  ParametricProblem p = testing::abs_tracking();
  EXPECT_THROW(solve_primal_dual(p, vec({0.0}), solver_only()), std::invalid_argument);
  EXPECT_EQ(solve_primal_dual(p, vec({0.3})).status, SolveStatus::kOracle);
}

TEST(Solve, ExhaustedBudgetIsReportedNotThrown) {
  SolveOptions o = solver_only();
  o.max_outer = 1;
  o.max_inner = 1;
  o.starts = 1;
  o.tol = 1e-15;
  const ParametricProblem p = library("scalar_qp");
  SolveReport r;
  ASSERT_NO_THROW(r = solve_primal_dual_report(p, vec({1.0}), o));
  EXPECT_EQ(r.point.status, SolveStatus::kFailed);
  EXPECT_THROW(value(p, vec({1.0}), o), SolverFailure);
  try {
    value(p, vec({1.0}), o);
  } catch (const SolverFailure& e) {
    EXPECT_EQ(e.report().point.status, SolveStatus::kFailed);
  }
}

TEST(Solve, RejectsBadOptionsAndDimensions) {
  SolveOptions o;
  o.tol = 0.0;
  EXPECT_THROW(solve_primal_dual(library("scalar_qp"), vec({1.0}), o), std::invalid_argument);
  o = SolveOptions{};
  o.penalty_growth = 1.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  EXPECT_THROW(solve_primal_dual(library("scalar_qp"), vec({1.0, 2.0})), std::invalid_argument);
}

TEST(Solve, IsDeterministicBitForBit) {
  const ParametricProblem p = library("ring");
  SolveOptions o = solver_only();
  o.seed = 42;
  const SolveReport a = solve_primal_dual_report(p, vec({0.7}), o);
  const SolveReport b = solve_primal_dual_report(p, vec({0.7}), o);
  EXPECT_EQ(a.point.x, b.point.x);
  EXPECT_EQ(a.point.objective_value, b.point.objective_value);
  EXPECT_EQ(a.inner_iterations, b.inner_iterations);
  EXPECT_EQ(a.feasibility_trace, b.feasibility_trace);
}

TEST(Solve, FeasibilityTraceIsNonincreasing) {
  const SolveReport r = solve_primal_dual_report(library("bilevel_quad", {{"q", 4}}),
                                                 vec({0.5, -0.2, 0.9, 0.1}), solver_only());
  ASSERT_FALSE(r.feasibility_trace.empty());
  for (std::size_t i = 1; i < r.feasibility_trace.size(); ++i) {
    EXPECT_LE(r.feasibility_trace[i], r.feasibility_trace[i - 1]);
  }
}

TEST(Solve, SolvedPointsLieInTheNormalConeAndMultipliersStayBounded) {
  const SolveOptions o = solver_only();
  for (const std::string name : {"failclarke", "scalar_qp", "soc_norm", "bilevel_quad"}) {
    const ParametricProblem p = library(name);
    for (int k = 0; k <= 10; ++k) {
      Vector th = Vector::Constant(p.q, -1.0 + 0.2 * k);
      if (p.q > 1) th(1) *= -0.5;
      const PrimalDualPoint pt = solve_primal_dual(p, th, o);
      ASSERT_EQ(pt.status, SolveStatus::kSolved) << name << " " << th.transpose();
      EXPECT_TRUE(in_normal_cone(*p.cone, p.constraint(pt.x, th), pt.lambda, 10 * o.tol).ok)
          << name << " " << th.transpose();
      EXPECT_LE(pt.lambda.norm(), 1e4) << name;
    }
  }
}

TEST(KktResidual, FailclarkeArtifactPointIsExact) {
  const KktResidual r =
      kkt_residual(library("failclarke"), point(vec({0.0}), vec({-1.0, 0.0}), vec({0.0, 0.0, 1.0})));
  EXPECT_EQ(r.stationarity, 0.0);
  EXPECT_EQ(r.primal_feasibility, 0.0);
  EXPECT_EQ(r.dual_feasibility, 0.0);
  EXPECT_EQ(r.complementarity, 0.0);
  ASSERT_TRUE(r.value_gap.has_value());
  EXPECT_EQ(*r.value_gap, 0.0);
}

TEST(KktResidual, ScalarQpExamples) {
  const ParametricProblem p = library("scalar_qp");
  EXPECT_EQ(kkt_residual(p, point(vec({1.0}), vec({1.0}), vec({1.0}))).max(), 0.0);
  const KktResidual r = kkt_residual(p, point(vec({1.0}), vec({1.0}), vec({0.0})));
  EXPECT_DOUBLE_EQ(r.stationarity, 1.0);
  EXPECT_EQ(r.complementarity, 0.0);
}

TEST(KktResidual, MeasuresEachViolationSeparately) {
  const ParametricProblem p = library("scalar_qp");
  // x = 0 at theta = 1: constraint 1 - 0 = 1 violated; lambda = -2 outside the polar.
  const KktResidual r = kkt_residual(p, point(vec({1.0}), vec({0.0}), vec({-2.0})));
  EXPECT_DOUBLE_EQ(r.primal_feasibility, 1.0);
  EXPECT_DOUBLE_EQ(r.dual_feasibility, 2.0);
  EXPECT_DOUBLE_EQ(r.complementarity, 2.0);
  EXPECT_DOUBLE_EQ(r.stationarity, 2.0);
  EXPECT_THROW(kkt_residual(p, point(vec({1.0}), vec({0.0, 1.0}), vec({0.0}))), std::invalid_argument);
}

}  // namespace
}  // namespace vfgrad
