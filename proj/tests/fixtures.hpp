#pragma once

// Small hand-built problems and oracles shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vfgrad/problem.hpp"

namespace vfgrad::testing {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline Vector uniform(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// F = |x - theta|, unconstrained. The supplied selection at the kink is +1,
// which alone never certifies; the sampler draws random signs there.
inline ParametricProblem abs_tracking() {
  ParametricProblem p;
  p.name = "abs_tracking";
  p.n = 1;
  p.q = 1;
  p.m = 0;
  p.smooth = false;
  p.objective = [](const Vector& x, const Vector& th) { return std::abs(x(0) - th(0)); };
  p.grad_selection = [](const Vector& x, const Vector& th) {
    const double s = x(0) >= th(0) ? 1.0 : -1.0;
    return GradSelection{vec({s}), vec({-s})};
  };
  p.selection_sampler = [](const Vector& x, const Vector& th, std::uint64_t seed) {
    double s = x(0) > th(0) ? 1.0 : -1.0;
    if (x(0) == th(0)) s = (seed % 2 == 0) ? 1.0 : -1.0;
    return GradSelection{vec({s}), vec({-s})};
  };
  p.oracle = [](const Vector& th) {
    PrimalDualPoint pt;
    pt.theta = th;
    pt.x = th;
    pt.lambda = Vector(0);
    pt.status = SolveStatus::kOracle;
    return pt;
  };
  p.known_value = [](const Vector&) { return 0.0; };
  return p;
}

// F = (x - theta)^2, unconstrained NLP.
inline NlpProblem tracking_nlp() {
  NlpProblem p;
  p.name = "tracking";
  p.n = 1;
  p.q = 1;
  p.objective = [](const Vector& x, const Vector& th) { return std::pow(x(0) - th(0), 2); };
  p.grad_selection = [](const Vector& x, const Vector& th) {
    const double r = 2.0 * (x(0) - th(0));
    return GradSelection{vec({r}), vec({-r})};
  };
  return p;
}

// h(x, theta) = x^2 = 0: J_x H vanishes at the only feasible point.
inline NlpProblem degenerate_equality() {
  NlpProblem p;
  p.name = "degenerate_equality";
  p.n = 1;
  p.q = 1;
  p.m_h = 1;
  p.objective = [](const Vector& x, const Vector&) { return x(0); };
  p.grad_selection = [](const Vector&, const Vector&) { return GradSelection{vec({1.0}), vec({0.0})}; };
  p.h = [](const Vector& x, const Vector&) { return vec({x(0) * x(0)}); };
  p.h_jac_x = [](const Vector& x, const Vector&) { return Matrix::Constant(1, 1, 2.0 * x(0)); };
  p.h_jac_theta = [](const Vector&, const Vector&) { return Matrix::Zero(1, 1); };
  return p;
}

// C(x, theta) = (x, -x) in the nonpositive orthant: feasible set {0}, RCQ fails.
inline NlpProblem planted_rcq_failure() {
  NlpProblem p;
  p.name = "planted_rcq_failure";
  p.n = 1;
  p.q = 1;
  p.m_g = 2;
  p.objective = [](const Vector& x, const Vector& th) { return 0.5 * x(0) * x(0) + th(0) * x(0); };
  p.grad_selection = [](const Vector& x, const Vector& th) {
    return GradSelection{vec({x(0) + th(0)}), vec({x(0)})};
  };
  p.g = [](const Vector& x, const Vector&) { return vec({x(0), -x(0)}); };
  p.g_jac_x = [](const Vector&, const Vector&) {
    Matrix j(2, 1);
    j << 1.0, -1.0;
    return j;
  };
  p.g_jac_theta = [](const Vector&, const Vector&) { return Matrix::Zero(2, 1).eval(); };
  return p;
}

// Linear system g = A x, h = B x at x = 0 whose MFCQ slack is exactly s0:
// a_i = -s0 sigma_i e_i plus convex combinations of them, and equality rows
// orthogonal to sigma, so d = sigma attains s = s0 and no d does better.
struct PlantedMfcq {
  NlpProblem problem;
  double margin = 0.0;
  Vector direction;
};

inline PlantedMfcq planted_mfcq(std::mt19937_64& rng, int n, int extra_rows, int m_h, double s0) {
  std::uniform_int_distribution<int> coin(0, 1);
  Vector sigma(n);
  for (int i = 0; i < n; ++i) sigma(i) = coin(rng) ? 1.0 : -1.0;

  std::vector<Vector> rows;
  for (int i = 0; i < n; ++i) rows.push_back(-s0 * sigma(i) * Vector::Unit(n, i));
  for (int k = 0; k < extra_rows; ++k) {
    Vector c = uniform(rng, n, 0.0, 1.0);
    c /= c.sum();
    Vector r = Vector::Zero(n);
    for (int i = 0; i < n; ++i) r += c(i) * rows[i];
    rows.push_back(r);
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  Matrix a(static_cast<int>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<int>(i)) = rows[i].transpose();

  Matrix b(m_h, n);
  const Vector unit = sigma.normalized();
  for (int k = 0; k < m_h; ++k) {
    Vector r = uniform(rng, n);
    r -= r.dot(unit) * unit;
    b.row(k) = r.transpose();
  }

  PlantedMfcq out;
  out.margin = s0;
  out.direction = sigma;
  NlpProblem& p = out.problem;
  p.name = "planted_mfcq";
  p.n = n;
  p.q = 1;
  p.m_g = static_cast<int>(a.rows());
  p.m_h = m_h;
  p.objective = [](const Vector& x, const Vector&) { return x.sum(); };
  p.grad_selection = [n](const Vector&, const Vector&) {
    return GradSelection{Vector::Ones(n), Vector::Zero(1)};
  };
  p.g = [a](const Vector& x, const Vector&) { return (a * x).eval(); };
  p.g_jac_x = [a](const Vector&, const Vector&) { return a; };
  p.g_jac_theta = [a](const Vector&, const Vector&) { return Matrix::Zero(a.rows(), 1).eval(); };
  p.h = [b](const Vector& x, const Vector&) { return (b * x).eval(); };
  p.h_jac_x = [b](const Vector&, const Vector&) { return b; };
  p.h_jac_theta = [b](const Vector&, const Vector&) { return Matrix::Zero(b.rows(), 1).eval(); };
  return out;
}

// Brute-force projection onto SOC(2) = {(t, x) : t >= |x|}: grid search over
// the cone inside a box around z, refined around the best candidate.
inline Vector brute_force_soc2_projection(const Vector& z) {
  const double radius = 2.0 * (1.0 + z.norm());
  Vector best = Vector::Zero(2);
  double best_dist = z.norm();
  double lo_t = 0.0;
  double hi_t = radius;
  double lo_x = -radius;
  double hi_x = radius;
  for (int round = 0; round < 6; ++round) {
    const int steps = 400;
    for (int i = 0; i <= steps; ++i) {
      const double t = lo_t + (hi_t - lo_t) * i / steps;
      for (int j = 0; j <= steps; ++j) {
        const double x = lo_x + (hi_x - lo_x) * j / steps;
        if (t < std::abs(x) || t < 0.0) continue;
        const double d = std::hypot(z(0) - t, z(1) - x);
        if (d < best_dist) {
          best_dist = d;
          best = vec({t, x});
        }
      }
    }
    const double span_t = (hi_t - lo_t) / 20.0;
    const double span_x = (hi_x - lo_x) / 20.0;
    lo_t = std::max(0.0, best(0) - span_t);
    hi_t = best(0) + span_t;
    lo_x = best(1) - span_x;
    hi_x = best(1) + span_x;
  }
  return best;
}

}  // namespace vfgrad::testing
