#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vfgrad/problem.hpp"

namespace vfgrad {

/// Registry summary of a built-in problem at its default parameters.
struct LibraryEntry {
  std::string name;
  std::string description;
  int n = 0;
  int q = 0;
  int m = 0;
  std::string cone;
  bool known_value = false;
  bool is_nlp = false;
};

std::vector<LibraryEntry> library_entries();

bool library_contains(std::string_view name);

/// Built-in problems:
///   failclarke    F = x1 x2, G = (x1, x2 - th, x2 + th); f == 0
///   scalar_qp     F = x^2 / 2, G = th - x; f = max(th, 0)^2 / 2
///   ring          F = (|x|^2 - th)^2, unconstrained; f = min(th, 0)^2
///   soc_norm      F = x, (x, th) in SOC(q + 1); f = |th|       params {"q"}
///   bilevel_quad  F = |x|^2 / 2, G = th - x; f = |max(th,0)|^2/2 params {"q"}
///
/// Throws std::invalid_argument for unknown names or invalid params. Every
/// returned problem has passed its finite-difference self test.
ParametricProblem library(std::string_view name, const nlohmann::json& params = {});

/// The (G, H) form of a library problem, or nullopt for purely conic entries.
std::optional<NlpProblem> library_nlp(std::string_view name,
                                      const nlohmann::json& params = {});

}  // namespace vfgrad
