#include "vfgrad/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace vfgrad {
namespace {

constexpr double kPivotEps = 1e-11;

void pivot(Matrix& t, int row, int col) {
  t.row(row) /= t(row, col);
  for (int i = 0; i < t.rows(); ++i) {
    if (i == row) continue;
    const double factor = t(i, col);
    if (factor != 0.0) t.row(i) -= factor * t.row(row);
  }
}

// Objective row is the last row of the tableau and holds reduced costs;
// columns [0, allowed) may enter the basis. Returns false when unbounded.
bool run_simplex(Matrix& t, std::vector<int>& basis, int allowed, int& pivots) {
  const int m = static_cast<int>(t.rows()) - 1;
  const int rhs = static_cast<int>(t.cols()) - 1;
  for (int iter = 0; iter < 100000; ++iter) {
    int enter = -1;
    for (int j = 0; j < allowed; ++j) {
      if (t(m, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    int leave = -1;
    double best = kInf;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) <= kPivotEps) continue;
      const double ratio = t(i, rhs) / t(i, enter);
      if (leave < 0 || ratio < best - kPivotEps) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + kPivotEps && basis[i] < basis[leave]) {
        best = std::min(best, ratio);
        leave = i;
      }
    }
    if (leave < 0) return false;
    pivot(t, leave, enter);
    basis[leave] = enter;
    ++pivots;
  }
  throw std::runtime_error("solve_lp: iteration limit reached");
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const int nz = static_cast<int>(lp.c.size());
  if (lp.lower.size() != nz || lp.upper.size() != nz) {
    throw std::invalid_argument("solve_lp: bound vectors must match c");
  }
  if (lp.a_ub.rows() != lp.b_ub.size() || lp.a_eq.rows() != lp.b_eq.size() ||
      (lp.a_ub.rows() > 0 && lp.a_ub.cols() != nz) ||
      (lp.a_eq.rows() > 0 && lp.a_eq.cols() != nz)) {
    throw std::invalid_argument("solve_lp: constraint shapes inconsistent");
  }
  if (!lp.lower.allFinite()) {
    throw std::invalid_argument("solve_lp: lower bounds must be finite");
  }

  // Shift y = z - lower >= 0 and collect rows as (coefficients, rhs, is_le).
  struct Row {
    Vector a;
    double rhs;
    bool le;
  };
  std::vector<Row> rows;
  for (int i = 0; i < lp.a_ub.rows(); ++i) {
    rows.push_back({lp.a_ub.row(i).transpose(), lp.b_ub(i) - lp.a_ub.row(i).dot(lp.lower), true});
  }
  for (int i = 0; i < lp.a_eq.rows(); ++i) {
    rows.push_back({lp.a_eq.row(i).transpose(), lp.b_eq(i) - lp.a_eq.row(i).dot(lp.lower), false});
  }
  for (int j = 0; j < nz; ++j) {
    if (std::isfinite(lp.upper(j))) {
      if (lp.upper(j) < lp.lower(j)) return {};
      Vector a = Vector::Zero(nz);
      a(j) = 1.0;
      rows.push_back({a, lp.upper(j) - lp.lower(j), true});
    }
  }

  const int m = static_cast<int>(rows.size());
  int n_slack = 0;
  for (const auto& r : rows) n_slack += r.le ? 1 : 0;

  // An artificial is needed unless the row has a +1 slack and rhs >= 0.
  std::vector<bool> needs_art(m);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    needs_art[i] = !rows[i].le || rows[i].rhs < 0.0;
    n_art += needs_art[i] ? 1 : 0;
  }

  const int n_struct = nz + n_slack;
  const int n_cols = n_struct + n_art;
  Matrix t = Matrix::Zero(m + 1, n_cols + 1);
  std::vector<int> basis(m, -1);
  int slack = nz;
  int art = n_struct;
  for (int i = 0; i < m; ++i) {
    const double sign = rows[i].rhs < 0.0 ? -1.0 : 1.0;
    t.row(i).head(nz) = sign * rows[i].a.transpose();
    t(i, n_cols) = sign * rows[i].rhs;
    if (rows[i].le) {
      t(i, slack) = sign;
      if (!needs_art[i]) basis[i] = slack;
      ++slack;
    }
    if (needs_art[i]) {
      t(i, art) = 1.0;
      basis[i] = art;
      ++art;
    }
  }

  LpResult result;
  // Phase 1: maximize -sum(artificials).
  if (n_art > 0) {
    t.row(m).setZero();
    t.row(m).segment(n_struct, n_art).setOnes();
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= n_struct) t.row(m) -= t.row(i);
    }
    run_simplex(t, basis, n_cols, result.pivots);
    const double scale = 1.0 + t.col(n_cols).head(m).cwiseAbs().maxCoeff();
    if (-t(m, n_cols) > 1e-9 * scale) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    // Drive zero-level artificials out where a structural pivot exists.
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n_struct) continue;
      for (int j = 0; j < n_struct; ++j) {
        if (std::abs(t(i, j)) > 1e-9) {
          pivot(t, i, j);
          basis[i] = j;
          ++result.pivots;
          break;
        }
      }
    }
  }

  // Phase 2 over structural columns only.
  t.row(m).setZero();
  t.row(m).head(nz) = -lp.c.transpose();
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n_struct && t(m, basis[i]) != 0.0) {
      t.row(m) -= t(m, basis[i]) * t.row(i);
    }
  }
  if (!run_simplex(t, basis, n_struct, result.pivots)) {
    result.status = LpStatus::kUnbounded;
    return result;
  }

  Vector y = Vector::Zero(nz);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < nz) y(basis[i]) = t(i, n_cols);
  }
  result.z = y + lp.lower;
  result.objective = lp.c.dot(result.z);
  result.status = LpStatus::kOptimal;
  return result;
}

Vector nnls(const Matrix& a, const Vector& b, int max_iter) {
  const int n = static_cast<int>(a.cols());
  if (a.rows() != b.size()) throw std::invalid_argument("nnls: shape mismatch");
  if (max_iter <= 0) max_iter = 3 * n + 30;

  Vector w = Vector::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, a.norm()) * std::max<double>(a.rows(), n);

  auto solve_passive = [&](Vector& s) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j) {
      if (passive[j]) idx.push_back(j);
    }
    s.setZero(n);
    if (idx.empty()) return;
    Matrix ap(a.rows(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(k) = a.col(idx[k]);
    const Vector sp = ap.colPivHouseholderQr().solve(b);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(k);
  };

  Vector s(n);
  for (int outer = 0; outer < max_iter; ++outer) {
    const Vector grad = a.transpose() * (b - a * w);
    int enter = -1;
    double best = tol;
    for (int j = 0; j < n; ++j) {
      if (!passive[j] && grad(j) > best) {
        best = grad(j);
        enter = j;
      }
    }
    if (enter < 0) break;
    passive[enter] = true;

    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      solve_passive(s);
      double alpha = kInf;
      for (int j = 0; j < n; ++j) {
        if (passive[j] && s(j) <= 0.0) alpha = std::min(alpha, w(j) / (w(j) - s(j)));
      }
      if (!std::isfinite(alpha)) break;
      w += alpha * (s - w);
      for (int j = 0; j < n; ++j) {
        if (passive[j] && w(j) <= tol) {
          passive[j] = false;
          w(j) = 0.0;
        }
      }
    }
    w = s;
    for (int j = 0; j < n; ++j) {
      if (!passive[j]) w(j) = 0.0;
    }
  }
  return w;
}

Vector simplex_least_squares(const Matrix& v, const Vector& offset) {
  const int k = static_cast<int>(v.cols());
  if (k == 0) throw std::invalid_argument("simplex_least_squares: no columns");
  if (v.rows() != offset.size()) {
    throw std::invalid_argument("simplex_least_squares: shape mismatch");
  }
  // Sum-to-one enforced through a heavily weighted extra row.
  const double weight = 1e4 * (1.0 + v.norm() + offset.norm());
  Matrix aug(v.rows() + 1, k);
  aug.topRows(v.rows()) = v;
  aug.row(v.rows()).setConstant(weight);
  Vector rhs(v.rows() + 1);
  rhs.head(v.rows()) = -offset;
  rhs(v.rows()) = weight;
  Vector w = nnls(aug, rhs);
  const double total = w.sum();
  if (total <= 0.0) {
    w.setZero();
    w(0) = 1.0;
    return w;
  }
  return w / total;
}

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  const Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vfgrad
