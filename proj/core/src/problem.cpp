#include "vfgrad/problem.hpp"

#include <random>
#include <stdexcept>

namespace vfgrad {
namespace {

constexpr double kFdStep = 1e-6;
constexpr double kSelfTestTol = 1e-6;

double rel_error(const Matrix& approx, const Matrix& exact) {
  if (approx.size() == 0) return 0.0;
  return (approx - exact).cwiseAbs().maxCoeff() / (1.0 + exact.cwiseAbs().maxCoeff());
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& at, int rows) {
  Matrix jac(rows, at.size());
  Vector probe = at;
  for (int j = 0; j < at.size(); ++j) {
    probe(j) = at(j) + kFdStep;
    const Vector up = fn(probe);
    probe(j) = at(j) - kFdStep;
    const Vector down = fn(probe);
    probe(j) = at(j);
    jac.col(j) = (up - down) / (2.0 * kFdStep);
  }
  return jac;
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOracle:
      return "oracle";
    case SolveStatus::kSolved:
      return "solved";
    case SolveStatus::kFailed:
      return "failed";
  }
  return "?";
}

Vector ParametricProblem::eval_constraint(const Vector& x, const Vector& theta) const {
  if (m == 0) return Vector(0);
  return constraint(x, theta);
}

Matrix ParametricProblem::eval_jac_x(const Vector& x, const Vector& theta) const {
  if (m == 0) return Matrix(0, n);
  return jac_x(x, theta);
}

Matrix ParametricProblem::eval_jac_theta(const Vector& x, const Vector& theta) const {
  if (m == 0) return Matrix(0, q);
  return jac_theta(x, theta);
}

ParametricProblem nlp_to_conic(const NlpProblem& nlp) {
  ParametricProblem p;
  p.name = nlp.name;
  p.n = nlp.n;
  p.q = nlp.q;
  p.m = nlp.m_g + nlp.m_h;
  p.objective = nlp.objective;
  p.grad_selection = nlp.grad_selection;
  p.selection_sampler = nlp.selection_sampler;
  p.oracle = nlp.oracle;
  p.known_kkt_points = nlp.known_kkt_points;
  p.smooth = nlp.smooth;
  p.known_value = nlp.known_value;
  p.known_gradient = nlp.known_gradient;

  const int mg = nlp.m_g;
  const int mh = nlp.m_h;
  if (mg > 0 && mh > 0) {
    p.cone = Cone::Product({Cone::NonpositiveOrthant(mg), Cone::Zero(mh)});
  } else if (mg > 0) {
    p.cone = Cone::NonpositiveOrthant(mg);
  } else if (mh > 0) {
    p.cone = Cone::Zero(mh);
  }
  if (p.m == 0) return p;

  auto g = nlp.g;
  auto h = nlp.h;
  auto gx = nlp.g_jac_x;
  auto hx = nlp.h_jac_x;
  auto gt = nlp.g_jac_theta;
  auto ht = nlp.h_jac_theta;
  const int n = nlp.n;
  const int q = nlp.q;

  p.constraint = [=](const Vector& x, const Vector& theta) {
    Vector c(mg + mh);
    if (mg > 0) c.head(mg) = g(x, theta);
    if (mh > 0) c.tail(mh) = h(x, theta);
    return c;
  };
  p.jac_x = [=](const Vector& x, const Vector& theta) {
    Matrix j(mg + mh, n);
    if (mg > 0) j.topRows(mg) = gx(x, theta);
    if (mh > 0) j.bottomRows(mh) = hx(x, theta);
    return j;
  };
  p.jac_theta = [=](const Vector& x, const Vector& theta) {
    Matrix j(mg + mh, q);
    if (mg > 0) j.topRows(mg) = gt(x, theta);
    if (mh > 0) j.bottomRows(mh) = ht(x, theta);
    return j;
  };
  return p;
}

void validate(const ParametricProblem& p) {
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("problem '" + p.name + "': " + msg);
  };
  if (p.n < 1) fail("n must be >= 1");
  if (p.q < 1) fail("q must be >= 1");
  if (p.m < 0) fail("m must be >= 0");
  if (!p.objective || !p.grad_selection) fail("objective and grad_selection are required");
  if (p.m > 0) {
    if (!p.cone) fail("constrained problem without a cone");
    if (p.cone->dim() != p.m) fail("cone dimension differs from m");
    if (!p.constraint || !p.jac_x || !p.jac_theta) fail("constraint evaluators missing");
  } else if (p.cone) {
    fail("unconstrained problem must not carry a cone");
  }
  if (!p.smooth && !p.oracle) fail("nonsmooth problems require a solution oracle");
}

SelfTestReport self_test(const ParametricProblem& p, std::uint64_t seed, int points) {
  validate(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto draw = [&](int size) {
    Vector v(size);
    for (int i = 0; i < size; ++i) v(i) = unif(rng);
    return v;
  };

  SelfTestReport report;
  for (int k = 0; k < points; ++k) {
    const Vector x = draw(p.n);
    const Vector theta = draw(p.q);
    if (p.m > 0) {
      const Matrix fx = fd_jacobian([&](const Vector& xx) { return p.constraint(xx, theta); }, x, p.m);
      const Matrix ft = fd_jacobian([&](const Vector& tt) { return p.constraint(x, tt); }, theta, p.m);
      report.jac_x_error = std::max(report.jac_x_error, rel_error(fx, p.jac_x(x, theta)));
      report.jac_theta_error =
          std::max(report.jac_theta_error, rel_error(ft, p.jac_theta(x, theta)));
    }
    if (p.smooth) {
      auto scalar = [&](const Vector& xt) {
        Vector out(1);
        out(0) = p.objective(xt.head(p.n), xt.tail(p.q));
        return out;
      };
      Vector joint(p.n + p.q);
      joint << x, theta;
      const Matrix fd = fd_jacobian(scalar, joint, 1);
      const GradSelection sel = p.grad_selection(x, theta);
      Vector exact(p.n + p.q);
      exact << sel.dx, sel.dtheta;
      report.gradient_error =
          std::max(report.gradient_error, rel_error(fd.transpose(), exact));
    }
  }
  report.ok = report.jac_x_error <= kSelfTestTol && report.jac_theta_error <= kSelfTestTol &&
              report.gradient_error <= kSelfTestTol;
  return report;
}

double lagrangian(const ParametricProblem& p, const Vector& x, const Vector& lambda,
                  const Vector& theta) {
  double value = p.objective(x, theta);
  if (p.m > 0) value += lambda.dot(p.constraint(x, theta));
  return value;
}

}  // namespace vfgrad
