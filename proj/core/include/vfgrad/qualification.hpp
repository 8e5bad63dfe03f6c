#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vfgrad/problem.hpp"

namespace vfgrad {

enum class QualificationMethod { kLpExact, kResidualHeuristic };

std::string to_string(QualificationMethod method);

struct QualificationReport {
  bool qualified = false;
  /// MFCQ: optimal slack s of the direction LP (0 when J_x H is rank
  /// deficient). RCQ: smallest ||J_x C^T lambda|| found over unit lambda in
  /// the normal cone, +inf when that cone is {0}.
  double margin = 0.0;
  /// MFCQ direction d, or the RCQ lambda attaining the margin.
  std::optional<Vector> witness;
  QualificationMethod method = QualificationMethod::kLpExact;
  bool equality_rank_ok = true;  // MFCQ only
};

inline constexpr double kDefaultActiveTol = 1e-8;
inline constexpr double kRcqThreshold = 1e-6;

/// MFCQ in direction form: J_x H has full row rank and some d has
/// J_x H d = 0 and grad g_i . d < 0 for every active i. Solved exactly as
///
///   max s  s.t.  grad g_i . d + s <= 0 (i active),  J_x H d = 0,
///                ||d||_inf <= 1,  -1 <= s <= 1.
///
/// Throws std::invalid_argument if (x, theta) violates G <= active_tol or
/// |H| <= active_tol.
QualificationReport check_mfcq(const NlpProblem& p, const Vector& x, const Vector& theta,
                               double active_tol = kDefaultActiveTol);

/// Heuristic RCQ margin: min ||J_x C^T lambda|| over lambda in N_K(C), |lambda| = 1,
/// by projected gradient from n_samples seeded starts. A margin near zero
/// exhibits a violating multiplier direction; a positive margin is evidence only.
QualificationReport check_rcq(const ParametricProblem& p, const PrimalDualPoint& pt,
                              int n_samples = 16, std::uint64_t seed = 0,
                              double active_tol = kDefaultActiveTol);

}  // namespace vfgrad
