#include "vfgrad/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vfgrad {
namespace {

constexpr double kBreakpointGuard = 1e-8;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << ")";
  return os.str();
}

}  // namespace

CurveSpec::CurveSpec(Kind kind, std::vector<Vector> knots)
    : kind_(kind), knots_(std::move(knots)) {
  if (knots_.size() < 2) throw std::invalid_argument("curve: need at least two control points");
  const auto q = knots_.front().size();
  if (q < 1) throw std::invalid_argument("curve: control points must be non-empty");
  for (const Vector& k : knots_) {
    if (k.size() != q) throw std::invalid_argument("curve: control points differ in dimension");
    if (!k.allFinite()) throw std::invalid_argument("curve: control points must be finite");
  }
  if (kind_ == Kind::kLine && knots_.size() != 2) {
    throw std::invalid_argument("curve: a line has exactly two endpoints");
  }
  second_.assign(knots_.size(), Vector::Zero(q));
  const int k = static_cast<int>(knots_.size());
  if (kind_ == Kind::kCubicSpline && k > 2) {
    // Natural spline on a uniform grid: M[j-1] + 4 M[j] + M[j+1] = 6 (y'' stencil) / dt^2.
    const double dt = 1.0 / (k - 1);
    const int inner = k - 2;
    Matrix a = Matrix::Zero(inner, inner);
    Matrix rhs(inner, q);
    for (int j = 0; j < inner; ++j) {
      a(j, j) = 4.0;
      if (j > 0) a(j, j - 1) = 1.0;
      if (j + 1 < inner) a(j, j + 1) = 1.0;
      rhs.row(j) = (6.0 / (dt * dt)) * (knots_[j + 2] - 2.0 * knots_[j + 1] + knots_[j]).transpose();
    }
    const Matrix m = a.ldlt().solve(rhs);
    for (int j = 0; j < inner; ++j) second_[j + 1] = m.row(j).transpose();
  }
}

CurveSpec CurveSpec::line(const Vector& from, const Vector& to) {
  return CurveSpec(Kind::kLine, {from, to});
}

CurveSpec CurveSpec::cubic_spline(std::vector<Vector> knots) {
  return CurveSpec(Kind::kCubicSpline, std::move(knots));
}

int CurveSpec::segment(double t) const {
  const int k = static_cast<int>(knots_.size());
  const int seg = static_cast<int>(std::floor(t * (k - 1)));
  return std::clamp(seg, 0, k - 2);
}

Vector CurveSpec::theta(double t) const {
  if (kind_ == Kind::kLine) return knots_[0] + t * (knots_[1] - knots_[0]);
  const int k = static_cast<int>(knots_.size());
  const double dt = 1.0 / (k - 1);
  const int j = segment(t);
  const double b = (t - j * dt) / dt;
  const double a = 1.0 - b;
  return a * knots_[j] + b * knots_[j + 1] +
         ((a * a * a - a) * second_[j] + (b * b * b - b) * second_[j + 1]) * (dt * dt / 6.0);
}

Vector CurveSpec::theta_dot(double t) const {
  if (kind_ == Kind::kLine) return knots_[1] - knots_[0];
  const int k = static_cast<int>(knots_.size());
  const double dt = 1.0 / (k - 1);
  const int j = segment(t);
  const double b = (t - j * dt) / dt;
  const double a = 1.0 - b;
  return (knots_[j + 1] - knots_[j]) / dt +
         (-(3.0 * a * a - 1.0) * second_[j] + (3.0 * b * b - 1.0) * second_[j + 1]) * (dt / 6.0);
}

std::vector<double> CurveSpec::breakpoints() const {
  std::vector<double> out;
  if (kind_ == Kind::kLine) return out;
  const int k = static_cast<int>(knots_.size());
  for (int j = 1; j + 1 < k; ++j) out.push_back(static_cast<double>(j) / (k - 1));
  return out;
}

std::string CurveSpec::describe() const {
  std::string out = kind_ == Kind::kLine ? "line:" : "spline:";
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    out += (i ? ";" : "") + format_vector(knots_[i]);
  }
  return out;
}

FdGradient finite_diff_gradient(const ParametricProblem& p, const Vector& theta, double h,
                                const SolveOptions& solve) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be > 0");
  if (theta.size() != p.q) throw std::invalid_argument("finite_diff_gradient: theta size mismatch");
  FdGradient out;
  out.gradient.resize(p.q);
  Vector probe = theta;
  for (int i = 0; i < p.q; ++i) {
    probe(i) = theta(i) + h;
    const double up = value(p, probe, solve);
    probe(i) = theta(i) - h;
    const double down = value(p, probe, solve);
    probe(i) = theta(i);
    out.gradient(i) = (up - down) / (2.0 * h);
    out.solver_calls += 2;
  }
  return out;
}

double ChainRuleOptions::effective_threshold() const {
  return threshold ? *threshold : 1.0 - 3.0 / n_grid;
}

ChainRuleReport chain_rule_check(const ParametricProblem& p, const CurveSpec& curve,
                                 const ChainRuleOptions& opts) {
  if (opts.n_grid < 3) throw std::invalid_argument("chain_rule_check: n_grid must be >= 3");
  if (!(opts.h > 0.0)) throw std::invalid_argument("chain_rule_check: h must be > 0");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("chain_rule_check: tol must be > 0");
  if (curve.dim() != p.q) {
    throw std::invalid_argument("chain_rule_check: curve dimension " +
                                std::to_string(curve.dim()) + " differs from q = " +
                                std::to_string(p.q));
  }
  opts.solve.validate();

  const int n = opts.n_grid;
  const double step = 1.0 / (n - 1);
  const std::vector<double> breaks = curve.breakpoints();

  ChainRuleReport r;
  r.problem = p.name;
  r.curve = curve.describe();
  r.h = opts.h;
  r.tol = opts.tol;
  r.threshold = opts.effective_threshold();
  r.grid.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = i * step;
    for (double b : breaks) {
      if (std::abs(t - b) <= kBreakpointGuard) {
        t += (t + 0.5 * step <= 1.0) ? 0.5 * step : -0.5 * step;
      }
    }
    r.grid[i] = t;
  }
  r.lhs.assign(n, 0.0);
  r.rhs.assign(n, 0.0);
  r.abs_err.assign(n, 0.0);
  std::vector<char> passed(n, 0);
  std::vector<char> skipped(n, 0);

  auto evaluate = [&](std::size_t i) {
    const double t = r.grid[i];
    try {
      const double up = value(p, curve.theta(t + opts.h), opts.solve);
      const double down = value(p, curve.theta(t - opts.h), opts.solve);
      const AdjointGradient g = adjoint_gradient(p, curve.theta(t), opts.solve, opts.certify);
      r.lhs[i] = (up - down) / (2.0 * opts.h);
      r.rhs[i] = g.u.dot(curve.theta_dot(t));
      r.abs_err[i] = std::abs(r.lhs[i] - r.rhs[i]);
      passed[i] = r.abs_err[i] <= opts.tol * (1.0 + std::abs(r.lhs[i]));
    } catch (const SolverFailure&) {
      skipped[i] = 1;
      r.lhs[i] = r.rhs[i] = r.abs_err[i] = std::nan("");
    }
  };
  if (opts.parallel) {
    parallel_for(static_cast<std::size_t>(n), evaluate);
  } else {
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) evaluate(i);
  }

  int pass_count = 0;
  r.passed.resize(n);
  r.skipped.resize(n);
  for (int i = 0; i < n; ++i) {
    r.passed[i] = passed[i] != 0;
    r.skipped[i] = skipped[i] != 0;
    if (r.passed[i]) {
      ++pass_count;
    } else if (r.skipped[i]) {
      ++r.skipped_count;
    } else {
      r.exceptional_points.push_back(r.grid[i]);
    }
  }
  r.pass_fraction = static_cast<double>(pass_count) / n;
  return r;
}

DiniReport dini_sandwich_check(const ParametricProblem& p, const Vector& theta,
                               const Vector& d, const std::vector<PrimalDualPoint>& kkt_points,
                               const DiniOptions& opts) {
  if (d.size() != p.q || theta.size() != p.q) {
    throw std::invalid_argument("dini_sandwich_check: dimension mismatch");
  }
  if (d.norm() == 0.0) throw std::invalid_argument("dini_sandwich_check: direction is zero");
  if (kkt_points.empty()) throw std::invalid_argument("dini_sandwich_check: no KKT points");
  if (opts.h_list.empty()) throw std::invalid_argument("dini_sandwich_check: empty h_list");
  for (double h : opts.h_list) {
    if (!(h > 0.0)) throw std::invalid_argument("dini_sandwich_check: steps must be > 0");
  }

  DiniReport r;
  r.theta = theta;
  r.direction = d;
  r.tol = opts.tol;
  r.h_list = opts.h_list;
  for (const PrimalDualPoint& pt : kkt_points) {
    if ((pt.theta - theta).norm() > 0.0) {
      throw std::invalid_argument("dini_sandwich_check: KKT point belongs to another theta");
    }
    r.inner_products.push_back(adjoint_gradient_at(p, pt, opts.certify).u.dot(d));
  }
  r.lower = *std::min_element(r.inner_products.begin(), r.inner_products.end());
  r.upper = *std::max_element(r.inner_products.begin(), r.inner_products.end());

  const double f0 = value(p, theta, opts.solve);
  r.ok = true;
  for (double h : opts.h_list) {
    const double quotient = (value(p, theta + h * d, opts.solve) - f0) / h;
    const bool in = quotient >= r.lower - opts.tol && quotient <= r.upper + opts.tol;
    r.quotients.push_back(quotient);
    r.inside.push_back(in);
    r.ok = r.ok && in;
  }
  return r;
}

CostReport cost_report(const ParametricProblem& p, const Vector& theta,
                       const SolveOptions& solve, double h) {
  CostReport r;
  r.q = p.q;
  auto start = std::chrono::steady_clock::now();
  r.asm_calls = adjoint_gradient(p, theta, solve).solver_calls;
  r.asm_seconds = seconds_since(start);
  start = std::chrono::steady_clock::now();
  r.fd_calls = finite_diff_gradient(p, theta, h, solve).solver_calls;
  r.fd_seconds = seconds_since(start);
  r.cheaper = r.asm_calls < r.fd_calls;
  return r;
}

}  // namespace vfgrad
