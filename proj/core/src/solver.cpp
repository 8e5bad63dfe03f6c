#include "vfgrad/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace vfgrad {
namespace {

constexpr double kMaxPenalty = 1e10;
// A start whose iterate leaves this multiple of its initial scale is abandoned.
constexpr double kEscapeRadius = 1e6;

void check_point_dims(const ParametricProblem& p, const PrimalDualPoint& pt) {
  if (pt.theta.size() != p.q || pt.x.size() != p.n || pt.lambda.size() != p.m) {
    throw std::invalid_argument("primal-dual point dimensions do not match problem '" +
                                p.name + "'");
  }
}

// Value-and-gradient callback: returns phi(y) and writes grad.
using ValueGrad = std::function<double(const Vector& y, Vector& grad)>;

struct InnerResult {
  Vector x;
  int iterations = 0;
  bool diverged = false;
};

// Weak-Wolfe bracketing line search with the approximate-Wolfe fallback that
// accepts steps whose value change is below rounding noise.
bool line_search(const ValueGrad& fg, const Vector& x, double f0, const Vector& g0,
                 const Vector& dir, double radius, const Vector& anchor, Vector& x_new,
                 double& f_new, Vector& g_new, bool& diverged) {
  constexpr double c1 = 1e-4;
  constexpr double c2 = 0.9;
  constexpr double delta = 0.1;
  const double d0 = g0.dot(dir);
  const double noise = 1e-12 * (1.0 + std::abs(f0));
  double lo = 0.0;
  double hi = kInf;
  double alpha = 1.0;
  for (int k = 0; k < 60; ++k) {
    x_new = x + alpha * dir;
    if ((x_new - anchor).norm() > radius) {
      if (!std::isfinite(hi) && lo > 0.0) {
        diverged = true;
        return false;
      }
      hi = alpha;
      alpha = 0.5 * (lo + hi);
      continue;
    }
    f_new = fg(x_new, g_new);
    if (!std::isfinite(f_new)) {
      hi = alpha;
      alpha = 0.5 * (lo + hi);
      continue;
    }
    const double dn = g_new.dot(dir);
    const bool armijo = f_new <= f0 + c1 * alpha * d0;
    const bool approx = f_new <= f0 + noise && dn <= (2.0 * delta - 1.0) * d0;
    if (!armijo && !approx) {
      hi = alpha;
    } else if (dn < c2 * d0) {
      lo = alpha;
    } else {
      return true;
    }
    alpha = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * alpha;
  }
  return false;
}

InnerResult minimize_bfgs(const ValueGrad& fg, const Vector& x0, int max_iter, double gtol,
                          double radius) {
  const int n = static_cast<int>(x0.size());
  InnerResult out;
  out.x = x0;
  Vector g(n);
  double f = fg(out.x, g);
  if (!std::isfinite(f)) {
    out.diverged = true;
    return out;
  }
  Matrix h_inv = Matrix::Identity(n, n);
  bool scaled = false;
  Vector x_new(n);
  Vector g_new(n);
  for (int it = 0; it < max_iter; ++it) {
    if (g.norm() <= gtol) break;
    Vector dir = -h_inv * g;
    if (g.dot(dir) >= 0.0) {
      h_inv.setIdentity();
      dir = -g;
    }
    double f_new = f;
    bool diverged = false;
    if (!line_search(fg, out.x, f, g, dir, radius, x0, x_new, f_new, g_new, diverged)) {
      out.diverged = diverged;
      if (!diverged && !h_inv.isIdentity()) {
        h_inv.setIdentity();
        continue;
      }
      break;
    }
    const Vector s = x_new - out.x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (!scaled) {
        h_inv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Vector hy = h_inv * y;
      h_inv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) -
               rho * (hy * s.transpose() + s * hy.transpose());
    }
    out.x = x_new;
    f = f_new;
    g = g_new;
    out.iterations = it + 1;
  }
  return out;
}

struct StartResult {
  PrimalDualPoint point;
  KktResidual residual;
  int outer = 0;
  int inner = 0;
  std::vector<double> trace;
};

StartResult run_augmented_lagrangian(const ParametricProblem& p, const Vector& theta,
                                     const SolveOptions& opts, Vector x) {
  StartResult out;
  Vector lambda = Vector::Zero(p.m);
  double rho = opts.penalty_init;
  double prox = opts.prox_init;
  double prox_floor = 0.0;
  std::optional<Cone> polar_cone;
  if (p.cone) polar_cone = polar(*p.cone);

  auto make_point = [&](const Vector& xx, const Vector& ll) {
    PrimalDualPoint pt;
    pt.theta = theta;
    pt.x = xx;
    pt.lambda = ll;
    pt.objective_value = p.objective(xx, theta);
    pt.status = SolveStatus::kSolved;
    return pt;
  };

  const double escape = kEscapeRadius * (1.0 + x.norm());
  double best_feas = kInf;
  for (int k = 0; k <= opts.max_outer; ++k) {
    PrimalDualPoint pt = make_point(x, lambda);
    const KktResidual res = kkt_residual(p, pt);
    best_feas = std::min(best_feas, res.primal_feasibility);
    out.trace.push_back(best_feas);
    out.point = pt;
    out.residual = res;
    out.outer = k;
    if (res.max() <= opts.tol) return out;
    if (k == opts.max_outer) break;

    const Vector anchor = x;
    const ValueGrad phi = [&](const Vector& y, Vector& grad) {
      const GradSelection sel = p.grad_selection(y, theta);
      double value = p.objective(y, theta);
      grad = sel.dx;
      if (p.m > 0) {
        const Vector shifted = p.constraint(y, theta) + lambda / rho;
        const Vector excess = project(*polar_cone, shifted);
        value += 0.5 * rho * excess.squaredNorm();
        grad += rho * p.jac_x(y, theta).transpose() * excess;
      }
      if (prox > 0.0) {
        value += 0.5 * prox * (y - anchor).squaredNorm();
        grad += prox * (y - anchor);
      }
      return value;
    };

    const double radius = 1e3 * (1.0 + anchor.norm());
    const InnerResult inner = minimize_bfgs(phi, anchor, opts.max_inner, 0.1 * opts.tol, radius);
    out.inner += inner.iterations;
    if (inner.diverged) {
      // Proximal weight too small for the local nonconvexity: back off.
      prox = prox > 0.0 ? 10.0 * prox : 1.0;
      prox_floor = prox;
      continue;
    }

    const double prev_feas = res.primal_feasibility;
    x = inner.x;
    if (x.norm() > escape) break;
    if (p.m > 0) {
      const Vector c = p.constraint(x, theta);
      lambda = rho * project(*polar_cone, c + lambda / rho);
      const double norm = lambda.norm();
      if (norm > opts.multiplier_clip) lambda *= opts.multiplier_clip / norm;
      const double feas = distance(*p.cone, c);
      if (feas > 0.25 * prev_feas && feas > 0.1 * opts.tol) {
        rho = std::min(rho * opts.penalty_growth, kMaxPenalty);
      }
    }
    prox = std::max(0.1 * prox, prox_floor);
  }
  out.point.status = SolveStatus::kFailed;
  return out;
}

}  // namespace

double KktResidual::max() const {
  return std::max({stationarity, primal_feasibility, dual_feasibility, complementarity});
}

void SolveOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("SolveOptions: tol must be > 0");
  if (!(penalty_growth > 1.0)) throw std::invalid_argument("SolveOptions: penalty_growth must be > 1");
  if (!(penalty_init > 0.0)) throw std::invalid_argument("SolveOptions: penalty_init must be > 0");
  if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("SolveOptions: budgets must be >= 1");
  if (starts < 1) throw std::invalid_argument("SolveOptions: starts must be >= 1");
  if (!(multiplier_clip > 0.0)) throw std::invalid_argument("SolveOptions: multiplier_clip must be > 0");
  if (prox_init < 0.0) throw std::invalid_argument("SolveOptions: prox_init must be >= 0");
}

KktResidual kkt_residual(const ParametricProblem& p, const PrimalDualPoint& pt) {
  check_point_dims(p, pt);
  KktResidual r;
  const GradSelection sel = p.grad_selection(pt.x, pt.theta);
  Vector stat = sel.dx;
  if (p.m > 0) {
    const Vector c = p.constraint(pt.x, pt.theta);
    stat += p.jac_x(pt.x, pt.theta).transpose() * pt.lambda;
    r.primal_feasibility = distance(*p.cone, c);
    r.dual_feasibility = distance(polar(*p.cone), pt.lambda);
    r.complementarity = std::abs(c.dot(pt.lambda));
  }
  r.stationarity = stat.norm();
  if (p.known_value) r.value_gap = p.objective(pt.x, pt.theta) - p.known_value(pt.theta);
  return r;
}

SolveReport solve_primal_dual_report(const ParametricProblem& p, const Vector& theta,
                                     const SolveOptions& opts) {
  opts.validate();
  if (theta.size() != p.q) {
    throw std::invalid_argument("solve: theta has size " + std::to_string(theta.size()) +
                                ", problem '" + p.name + "' expects " + std::to_string(p.q));
  }
  SolveReport report;
  if (p.oracle && opts.use_oracle) {
    report.point = p.oracle(theta);
    report.point.status = SolveStatus::kOracle;
    report.residual = kkt_residual(p, report.point);
    return report;
  }
  if (!p.smooth) {
    throw std::invalid_argument("solve: problem '" + p.name +
                                "' is nonsmooth and needs a solution oracle");
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::optional<StartResult> best;
  int inner_total = 0;
  for (int s = 0; s < opts.starts; ++s) {
    Vector x0(p.n);
    for (int i = 0; i < p.n; ++i) x0(i) = unif(rng);
    StartResult run = run_augmented_lagrangian(p, theta, opts, std::move(x0));
    inner_total += run.inner;
    const bool ok = run.point.status == SolveStatus::kSolved;
    if (!best) {
      best = std::move(run);
      continue;
    }
    const bool best_ok = best->point.status == SolveStatus::kSolved;
    const double fb = best->point.objective_value;
    const double fr = run.point.objective_value;
    if ((ok && !best_ok) ||
        (ok && best_ok && fr < fb - 1e-12 * (1.0 + std::abs(fb))) ||
        (!ok && !best_ok && run.residual.max() < best->residual.max())) {
      best = std::move(run);
    }
  }
  report.point = std::move(best->point);
  report.residual = best->residual;
  report.outer_iterations = best->outer;
  report.inner_iterations = inner_total;
  report.starts_used = opts.starts;
  report.feasibility_trace = std::move(best->trace);
  return report;
}

PrimalDualPoint solve_primal_dual(const ParametricProblem& p, const Vector& theta,
                                  const SolveOptions& opts) {
  return solve_primal_dual_report(p, theta, opts).point;
}

double value(const ParametricProblem& p, const Vector& theta, const SolveOptions& opts) {
  SolveReport report = solve_primal_dual_report(p, theta, opts);
  if (report.point.status == SolveStatus::kFailed) {
    throw SolverFailure("solver failed on problem '" + p.name + "' (KKT residual " +
                            std::to_string(report.residual.max()) + ")",
                        std::move(report));
  }
  return report.point.objective_value;
}

}  // namespace vfgrad
