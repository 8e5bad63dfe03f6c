#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vfgrad/numerics.hpp"

namespace vfgrad {

/// Relative membership tolerance used when no explicit tolerance is given;
/// scaled by (1 + ||z||).
inline constexpr double kDefaultMembershipTol = 1e-9;

enum class ConeKind {
  kNonpositiveOrthant,  // {z : z <= 0}
  kNonnegativeOrthant,  // polar of the nonpositive orthant
  kZero,                // {0}
  kFree,                // R^p, polar of Zero
  kSecondOrder,         // {(t, xbar) : t >= ||xbar||}
  kNegSecondOrder,      // -SecondOrder, polar of SecondOrder
  kProduct,
};

/// Closed convex cone K in R^dim. Immutable value type.
///
/// Second-order cones use the layout (t, xbar) in R x R^{d-1}. Products
/// stack their parts in order and must have at least two parts.
class Cone {
 public:
  static Cone NonpositiveOrthant(int dim);
  static Cone NonnegativeOrthant(int dim);
  static Cone Zero(int dim);
  static Cone Free(int dim);
  static Cone SecondOrder(int dim);
  static Cone NegSecondOrder(int dim);
  static Cone Product(std::vector<Cone> parts);

  ConeKind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::span<const Cone> parts() const { return parts_; }

  bool operator==(const Cone& other) const;

 private:
  Cone(ConeKind kind, int dim, std::vector<Cone> parts = {});

  ConeKind kind_;
  int dim_;
  std::vector<Cone> parts_;
};

/// K° = {y : <y, z> <= 0 for all z in K}.
Cone polar(const Cone& cone);

/// Euclidean projection onto K. Throws std::invalid_argument on size mismatch.
Vector project(const Cone& cone, const Vector& z);

/// ||z - project(K, z)||.
double distance(const Cone& cone, const Vector& z);

/// distance(K, z) <= tol * (1 + ||z||).
bool contains(const Cone& cone, const Vector& z, double tol = kDefaultMembershipTol);

struct NormalConeCheck {
  bool ok = false;
  double primal_distance = 0.0;   // dist(K, z)
  double polar_distance = 0.0;    // dist(K°, lambda)
  double complementarity = 0.0;   // |<z, lambda>|
};

/// lambda in N_K(z) = {lambda in K°, <z, lambda> = 0} for z in K, checked as
/// dist(K, z) <= tol, dist(K°, lambda) <= tol and
/// |<z, lambda>| <= tol * (1 + ||z|| ||lambda||).
NormalConeCheck in_normal_cone(const Cone& cone, const Vector& z, const Vector& lambda,
                               double tol);

/// Projection of lambda onto N_K(z) for z (approximately) in K. Faces are
/// identified with the activity tolerance active_tol.
Vector project_normal_cone(const Cone& cone, const Vector& z, const Vector& lambda,
                           double active_tol);

/// Short human-readable form, e.g. "NonpositiveOrthant(3) x Zero(1)".
std::string to_string(const Cone& cone);

/// JSON fragment {"kind": ..., "dim": int, "parts": [...]}. Kinds are
/// "orthant_nonpos", "orthant_nonneg", "zero", "polar_zero", "soc",
/// "neg_soc" and "product".
nlohmann::json cone_to_json(const Cone& cone);
Cone cone_from_json(const nlohmann::json& j);

}  // namespace vfgrad

template <>
struct nlohmann::adl_serializer<vfgrad::Cone> {
  static vfgrad::Cone from_json(const json& j) { return vfgrad::cone_from_json(j); }
  static void to_json(json& j, const vfgrad::Cone& cone) { j = vfgrad::cone_to_json(cone); }
};
