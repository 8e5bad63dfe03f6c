#include "vfgrad/qualification.hpp"

#include <random>
#include <stdexcept>

namespace vfgrad {
namespace {

constexpr double kRankTol = 1e-10;
constexpr double kSlackTol = 1e-9;
constexpr int kRcqIterations = 2000;

}  // namespace

std::string to_string(QualificationMethod method) {
  return method == QualificationMethod::kLpExact ? "lp_exact" : "residual_heuristic";
}

QualificationReport check_mfcq(const NlpProblem& p, const Vector& x, const Vector& theta,
                               double active_tol) {
  if (x.size() != p.n || theta.size() != p.q) {
    throw std::invalid_argument("check_mfcq: dimension mismatch for problem '" + p.name + "'");
  }
  const int n = p.n;
  Vector g = p.m_g > 0 ? p.g(x, theta) : Vector(0);
  Vector h = p.m_h > 0 ? p.h(x, theta) : Vector(0);
  if ((g.size() > 0 && g.maxCoeff() > active_tol) ||
      (h.size() > 0 && h.cwiseAbs().maxCoeff() > active_tol)) {
    throw std::invalid_argument("check_mfcq: point is infeasible for problem '" + p.name + "'");
  }

  QualificationReport report;
  report.method = QualificationMethod::kLpExact;

  Matrix jh = p.m_h > 0 ? p.h_jac_x(x, theta) : Matrix(0, n);
  report.equality_rank_ok = numerical_rank(jh, kRankTol) == p.m_h;

  std::vector<int> active;
  for (int i = 0; i < g.size(); ++i) {
    if (g(i) >= -active_tol) active.push_back(i);
  }
  const Matrix jg = p.m_g > 0 ? p.g_jac_x(x, theta) : Matrix(0, n);

  // Variables z = (d, s).
  LinearProgram lp;
  lp.c = Vector::Zero(n + 1);
  lp.c(n) = 1.0;
  lp.a_ub = Matrix::Zero(static_cast<int>(active.size()), n + 1);
  lp.b_ub = Vector::Zero(static_cast<int>(active.size()));
  for (std::size_t r = 0; r < active.size(); ++r) {
    lp.a_ub.row(static_cast<int>(r)).head(n) = jg.row(active[r]);
    lp.a_ub(static_cast<int>(r), n) = 1.0;
  }
  lp.a_eq = Matrix::Zero(p.m_h, n + 1);
  lp.a_eq.leftCols(n) = jh;
  lp.b_eq = Vector::Zero(p.m_h);
  lp.lower = Vector::Constant(n + 1, -1.0);
  lp.upper = Vector::Constant(n + 1, 1.0);

  const LpResult res = solve_lp(lp);
  if (res.status != LpStatus::kOptimal) {
    // d = 0, s = 0 is always feasible, so this only signals numerical trouble.
    throw std::runtime_error("check_mfcq: direction LP did not reach an optimum");
  }
  const double s = res.z(n);
  report.witness = res.z.head(n);
  report.margin = report.equality_rank_ok ? s : 0.0;
  report.qualified = report.equality_rank_ok && s > kSlackTol;
  return report;
}

QualificationReport check_rcq(const ParametricProblem& p, const PrimalDualPoint& pt,
                              int n_samples, std::uint64_t seed, double active_tol) {
  QualificationReport report;
  report.method = QualificationMethod::kResidualHeuristic;
  if (p.m == 0) {
    report.qualified = true;
    report.margin = kInf;
    return report;
  }
  const Vector c = p.constraint(pt.x, pt.theta);
  const Matrix a = p.jac_x(pt.x, pt.theta);  // m x n
  const Cone& cone = *p.cone;
  auto project_n = [&](const Vector& l) { return project_normal_cone(cone, c, l, active_tol); };

  const double a_norm = a.size() > 0 ? Eigen::JacobiSVD<Matrix>(a).singularValues()(0) : 0.0;
  const double step = a_norm > 0.0 ? 1.0 / (a_norm * a_norm) : 0.0;

  std::vector<Vector> starts;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < n_samples; ++k) {
    Vector l(p.m);
    for (int i = 0; i < p.m; ++i) l(i) = normal(rng);
    starts.push_back(std::move(l));
  }
  for (int i = 0; i < p.m; ++i) {
    starts.push_back(Vector::Unit(p.m, i));
    starts.push_back(-Vector::Unit(p.m, i));
  }

  double best = kInf;
  std::optional<Vector> witness;
  for (const Vector& start : starts) {
    Vector l = project_n(start);
    double norm = l.norm();
    if (norm < 1e-12) continue;
    l /= norm;
    double obj = (a.transpose() * l).norm();
    auto record = [&]() {
      if (obj < best) {
        best = obj;
        witness = l;
      }
    };
    record();
    for (int it = 0; it < kRcqIterations && obj > 0.0; ++it) {
      Vector next = project_n(l - step * (a * (a.transpose() * l)));
      norm = next.norm();
      if (norm < 1e-12) break;
      next /= norm;
      const bool stalled = (next - l).norm() < 1e-14;
      l = std::move(next);
      obj = (a.transpose() * l).norm();
      record();
      if (stalled) break;
    }
  }
  report.margin = best;
  report.witness = witness;
  report.qualified = best > kRcqThreshold;
  return report;
}

}  // namespace vfgrad
