#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "fixtures.hpp"
#include "vfgrad/numerics.hpp"

namespace vfgrad {
namespace {

using testing::uniform;
using testing::vec;

TEST(SolveLp, BoxedTwoVariableMaximum) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6, 0 <= x, y <= 10: optimum (1.6, 1.2).
  LinearProgram lp;
  lp.c = vec({1.0, 1.0});
  lp.a_ub.resize(2, 2);
  lp.a_ub << 1, 2, 3, 1;
  lp.b_ub = vec({4.0, 6.0});
  lp.a_eq.resize(0, 2);
  lp.b_eq.resize(0);
  lp.lower = Vector::Zero(2);
  lp.upper = Vector::Constant(2, 10.0);
  const LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.z(0), 1.6, 1e-12);
  EXPECT_NEAR(r.z(1), 1.2, 1e-12);
  EXPECT_NEAR(r.objective, 2.8, 1e-12);
}

TEST(SolveLp, MatchesGridSearchOnRandomTwoVariablePrograms) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    LinearProgram lp;
    lp.c = uniform(rng, 2);
    lp.a_ub.resize(3, 2);
    for (int i = 0; i < 3; ++i) lp.a_ub.row(i) = uniform(rng, 2).transpose();
    lp.b_ub = uniform(rng, 3, 0.1, 1.0);  // origin strictly feasible
    lp.a_eq.resize(0, 2);
    lp.b_eq.resize(0);
    lp.lower = Vector::Constant(2, -1.0);
    lp.upper = Vector::Constant(2, 1.0);
    const LpResult r = solve_lp(lp);
    ASSERT_EQ(r.status, LpStatus::kOptimal);

    double best = -kInf;
    const int steps = 800;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= steps; ++j) {
        const Vector z = vec({-1.0 + 2.0 * i / steps, -1.0 + 2.0 * j / steps});
        if (((lp.a_ub * z) - lp.b_ub).maxCoeff() <= 0.0) best = std::max(best, lp.c.dot(z));
      }
    }
    EXPECT_GE(r.objective, best - 1e-12);
    EXPECT_LE(r.objective, best + 5e-3);
    EXPECT_LE(((lp.a_ub * r.z) - lp.b_ub).maxCoeff(), 1e-12);
  }
}

TEST(SolveLp, EqualityConstraintsAreHonoured) {
  // max x3 s.t. x1 + x2 + x3 = 1, x1 - x2 = 0, 0 <= x <= 1.
  LinearProgram lp;
  lp.c = vec({0.0, 0.0, 1.0});
  lp.a_ub.resize(0, 3);
  lp.b_ub.resize(0);
  lp.a_eq.resize(2, 3);
  lp.a_eq << 1, 1, 1, 1, -1, 0;
  lp.b_eq = vec({1.0, 0.0});
  lp.lower = Vector::Zero(3);
  lp.upper = Vector::Ones(3);
  const LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 1.0, 1e-12);
}

TEST(SolveLp, ReportsInfeasibleAndUnbounded) {
  LinearProgram lp;
  lp.c = vec({1.0});
  lp.a_ub = Matrix::Constant(1, 1, 1.0);
  lp.b_ub = vec({-1.0});
  lp.a_eq.resize(0, 1);
  lp.b_eq.resize(0);
  lp.lower = vec({0.0});
  lp.upper = vec({kInf});
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kInfeasible);

  lp.a_ub.resize(0, 1);
  lp.b_ub.resize(0);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kUnbounded);
}

// Exhaustive active-set search: the NNLS optimum is the best feasible
// unconstrained least-squares solution over some support.
Vector brute_force_nnls(const Matrix& a, const Vector& b) {
  const int n = static_cast<int>(a.cols());
  Vector best = Vector::Zero(n);
  double best_res = b.norm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) idx.push_back(j);
    }
    Matrix sub(a.rows(), static_cast<int>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<int>(k)) = a.col(idx[k]);
    const Vector w = sub.colPivHouseholderQr().solve(b);
    if (w.minCoeff() < 0.0) continue;
    Vector full = Vector::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) full(idx[k]) = w(static_cast<int>(k));
    const double res = (a * full - b).norm();
    if (res < best_res) {
      best_res = res;
      best = full;
    }
  }
  return best;
}

TEST(Nnls, MatchesActiveSetEnumeration) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(6, 4);
    for (int i = 0; i < 6; ++i) a.row(i) = uniform(rng, 4).transpose();
    const Vector b = uniform(rng, 6);
    const Vector w = nnls(a, b);
    const Vector ref = brute_force_nnls(a, b);
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_NEAR((a * w - b).norm(), (a * ref - b).norm(), 1e-10);
  }
}

TEST(SimplexLeastSquares, FindsConvexCombinationThroughZero) {
  // Columns +1 and -1: the midpoint weight cancels them exactly.
  Matrix v(1, 2);
  v << 1.0, -1.0;
  const Vector w = simplex_least_squares(v, Vector::Zero(1));
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  EXPECT_NEAR(w(0), 0.5, 1e-8);
  EXPECT_NEAR((v * w).norm(), 0.0, 1e-8);
}

TEST(SimplexLeastSquares, MatchesGridSearchOnTheTriangle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix v(2, 3);
    for (int i = 0; i < 2; ++i) v.row(i) = uniform(rng, 3).transpose();
    const Vector offset = uniform(rng, 2);
    const Vector w = simplex_least_squares(v, offset);
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    double best = kInf;
    const int steps = 600;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; i + j <= steps; ++j) {
        const Vector c = vec({double(i) / steps, double(j) / steps, double(steps - i - j) / steps});
        best = std::min(best, (v * c + offset).norm());
      }
    }
    EXPECT_LE((v * w + offset).norm(), best + 1e-9);
  }
}

TEST(NumericalRank, CountsSingularValuesAboveRelativeTolerance) {
  Matrix a(3, 3);
  a << 1, 0, 0, 0, 1e-12, 0, 0, 0, 0;
  EXPECT_EQ(numerical_rank(a, 1e-10), 1);
  EXPECT_EQ(numerical_rank(Matrix::Identity(4, 4), 1e-10), 4);
  EXPECT_EQ(numerical_rank(Matrix::Zero(2, 3), 1e-10), 0);
  EXPECT_EQ(numerical_rank(Matrix(0, 3), 1e-10), 0);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsBodyExceptions) {
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

}  // namespace
}  // namespace vfgrad
