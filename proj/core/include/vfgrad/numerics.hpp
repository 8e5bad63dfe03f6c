#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace vfgrad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense linear program in inequality/equality form:
///
///   maximize    c^T z
///   subject to  A_ub z <= b_ub,  A_eq z = b_eq,  lower <= z <= upper.
///
/// Lower bounds must be finite; upper bounds may be +inf. Sized for the
/// handful of variables that constraint-qualification checks need.
struct LinearProgram {
  Vector c;
  Matrix a_ub;
  Vector b_ub;
  Matrix a_eq;
  Vector b_eq;
  Vector lower;
  Vector upper;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector z;
  double objective = 0.0;
  int pivots = 0;
};

/// Two-phase tableau simplex with Bland's anti-cycling rule.
LpResult solve_lp(const LinearProgram& lp);

/// Lawson-Hanson non-negative least squares: argmin ||A w - b|| s.t. w >= 0.
Vector nnls(const Matrix& a, const Vector& b, int max_iter = 0);

/// argmin ||V w + offset|| over the probability simplex (w >= 0, sum w = 1).
Vector simplex_least_squares(const Matrix& v, const Vector& offset);

/// Numerical rank from singular values above rel_tol * sigma_max.
int numerical_rank(const Matrix& a, double rel_tol);

/// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
/// Each index is visited exactly once; callers write into pre-sized slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace vfgrad
