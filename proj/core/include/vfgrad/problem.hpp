#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vfgrad/cones.hpp"
#include "vfgrad/numerics.hpp"

namespace vfgrad {

/// One element (v, w) of a conservative field D_F at (x, theta):
/// v is the x-block, w the theta-block. For smooth F this is the gradient.
struct GradSelection {
  Vector dx;
  Vector dtheta;
};

enum class SolveStatus { kOracle, kSolved, kFailed };

std::string to_string(SolveStatus status);

/// A candidate (x, lambda) for the KKT system at parameter theta.
struct PrimalDualPoint {
  Vector theta;
  Vector x;
  Vector lambda;
  SolveStatus status = SolveStatus::kFailed;
  double objective_value = 0.0;
};

using ScalarFn = std::function<double(const Vector& x, const Vector& theta)>;
using VectorFn = std::function<Vector(const Vector& x, const Vector& theta)>;
using MatrixFn = std::function<Matrix(const Vector& x, const Vector& theta)>;
using SelectionFn = std::function<GradSelection(const Vector& x, const Vector& theta)>;
/// Draws an element of D_F(x, theta) from a seeded stream; used to witness
/// membership in conv D_F at nonsmooth points.
using SelectionSamplerFn =
    std::function<GradSelection(const Vector& x, const Vector& theta, std::uint64_t seed)>;
using OracleFn = std::function<PrimalDualPoint(const Vector& theta)>;
using PointSetFn = std::function<std::vector<PrimalDualPoint>(const Vector& theta)>;

/// f(theta) = min_x { F(x, theta) : C(x, theta) in K }.
///
/// Evaluators must be pure functions of their arguments. When m == 0 the
/// problem is unconstrained and `cone` is empty.
struct ParametricProblem {
  std::string name;
  int n = 0;
  int q = 0;
  int m = 0;

  ScalarFn objective;
  SelectionFn grad_selection;
  SelectionSamplerFn selection_sampler;  // optional

  VectorFn constraint;
  MatrixFn jac_x;      // m x n
  MatrixFn jac_theta;  // m x q
  std::optional<Cone> cone;

  OracleFn oracle;             // optional closed-form KKT point
  PointSetFn known_kkt_points;  // optional; distinct certified KKT points
  bool smooth = true;

  std::function<double(const Vector&)> known_value;     // optional
  std::function<Vector(const Vector&)> known_gradient;  // optional

  Vector eval_constraint(const Vector& x, const Vector& theta) const;
  Matrix eval_jac_x(const Vector& x, const Vector& theta) const;
  Matrix eval_jac_theta(const Vector& x, const Vector& theta) const;
};

/// f(theta) = min_x { F(x, theta) : G(x, theta) <= 0, H(x, theta) = 0 }.
///
/// Oracle points carry the stacked multiplier (lambda_G, mu_H).
struct NlpProblem {
  std::string name;
  int n = 0;
  int q = 0;
  int m_g = 0;
  int m_h = 0;

  ScalarFn objective;
  SelectionFn grad_selection;
  SelectionSamplerFn selection_sampler;

  VectorFn g;
  MatrixFn g_jac_x;
  MatrixFn g_jac_theta;
  VectorFn h;
  MatrixFn h_jac_x;
  MatrixFn h_jac_theta;

  OracleFn oracle;
  PointSetFn known_kkt_points;
  bool smooth = true;
  std::function<double(const Vector&)> known_value;
  std::function<Vector(const Vector&)> known_gradient;
};

/// Stacks C = (G, H) with K = NonpositiveOrthant(m_g) x Zero(m_h); a block of
/// size zero is dropped and m_g = m_h = 0 yields an unconstrained problem.
ParametricProblem nlp_to_conic(const NlpProblem& nlp);

/// Throws std::invalid_argument if dimensions or required evaluators are
/// inconsistent (including cone dimension != m).
void validate(const ParametricProblem& p);

struct SelfTestReport {
  bool ok = true;
  double jac_x_error = 0.0;      // max relative error vs central differences
  double jac_theta_error = 0.0;
  double gradient_error = 0.0;   // only checked for smooth problems
};

/// Compares Jacobians (and the gradient selection when `smooth`) with central
/// finite differences at random points in [-1, 1]; relative tolerance 1e-6.
SelfTestReport self_test(const ParametricProblem& p, std::uint64_t seed, int points = 5);

/// Lagrangian value F(x, theta) + <lambda, C(x, theta)>.
double lagrangian(const ParametricProblem& p, const Vector& x, const Vector& lambda,
                  const Vector& theta);

}  // namespace vfgrad
