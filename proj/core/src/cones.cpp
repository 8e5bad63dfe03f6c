#include "vfgrad/cones.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vfgrad {
namespace {

void check_dim(const Cone& cone, const Vector& z, const char* what) {
  if (z.size() != cone.dim()) {
    throw std::invalid_argument(std::string(what) + ": vector of size " +
                                std::to_string(z.size()) + " for cone of dimension " +
                                std::to_string(cone.dim()));
  }
}

Vector project_soc(const Vector& z) {
  const double t = z(0);
  const double r = z.tail(z.size() - 1).norm();
  if (r <= t) return z;
  if (r <= -t) return Vector::Zero(z.size());
  Vector out(z.size());
  const double scale = 0.5 * (t + r);
  out(0) = scale;
  out.tail(z.size() - 1) = (scale / r) * z.tail(z.size() - 1);
  return out;
}

// N_SOC(z) is {0} in the interior, the whole polar at the apex, and the ray
// {alpha * (-t, xbar) : alpha >= 0} at a nonzero boundary point (t, xbar).
Vector project_soc_normal(const Vector& z, const Vector& lambda, double active_tol) {
  const double nz = z.norm();
  const double t = z(0);
  const double r = z.tail(z.size() - 1).norm();
  if (t - r > active_tol * (1.0 + nz)) {
    return Vector::Zero(z.size());
  }
  if (nz <= active_tol || r <= active_tol) {
    return -project_soc(-lambda);
  }
  Vector dir(z.size());
  dir(0) = -1.0;
  dir.tail(z.size() - 1) = z.tail(z.size() - 1) / r;
  dir /= std::sqrt(2.0);
  const double coef = std::max(0.0, lambda.dot(dir));
  return coef * dir;
}

}  // namespace

Cone::Cone(ConeKind kind, int dim, std::vector<Cone> parts)
    : kind_(kind), dim_(dim), parts_(std::move(parts)) {}

Cone Cone::NonpositiveOrthant(int dim) {
  if (dim < 1) throw std::invalid_argument("NonpositiveOrthant: dim must be >= 1");
  return {ConeKind::kNonpositiveOrthant, dim};
}

Cone Cone::NonnegativeOrthant(int dim) {
  if (dim < 1) throw std::invalid_argument("NonnegativeOrthant: dim must be >= 1");
  return {ConeKind::kNonnegativeOrthant, dim};
}

Cone Cone::Zero(int dim) {
  if (dim < 1) throw std::invalid_argument("Zero: dim must be >= 1");
  return {ConeKind::kZero, dim};
}

Cone Cone::Free(int dim) {
  if (dim < 1) throw std::invalid_argument("Free: dim must be >= 1");
  return {ConeKind::kFree, dim};
}

Cone Cone::SecondOrder(int dim) {
  if (dim < 2) throw std::invalid_argument("SecondOrder: dim must be >= 2");
  return {ConeKind::kSecondOrder, dim};
}

Cone Cone::NegSecondOrder(int dim) {
  if (dim < 2) throw std::invalid_argument("NegSecondOrder: dim must be >= 2");
  return {ConeKind::kNegSecondOrder, dim};
}

Cone Cone::Product(std::vector<Cone> parts) {
  if (parts.size() < 2) throw std::invalid_argument("Product: needs at least two parts");
  const int dim = std::accumulate(parts.begin(), parts.end(), 0,
                                  [](int acc, const Cone& c) { return acc + c.dim(); });
  return {ConeKind::kProduct, dim, std::move(parts)};
}

bool Cone::operator==(const Cone& other) const {
  if (kind_ != other.kind_ || dim_ != other.dim_ || parts_.size() != other.parts_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (!(parts_[i] == other.parts_[i])) return false;
  }
  return true;
}

Cone polar(const Cone& cone) {
  switch (cone.kind()) {
    case ConeKind::kNonpositiveOrthant:
      return Cone::NonnegativeOrthant(cone.dim());
    case ConeKind::kNonnegativeOrthant:
      return Cone::NonpositiveOrthant(cone.dim());
    case ConeKind::kZero:
      return Cone::Free(cone.dim());
    case ConeKind::kFree:
      return Cone::Zero(cone.dim());
    case ConeKind::kSecondOrder:
      return Cone::NegSecondOrder(cone.dim());
    case ConeKind::kNegSecondOrder:
      return Cone::SecondOrder(cone.dim());
    case ConeKind::kProduct: {
      std::vector<Cone> parts;
      parts.reserve(cone.parts().size());
      for (const Cone& part : cone.parts()) parts.push_back(polar(part));
      return Cone::Product(std::move(parts));
    }
  }
  throw std::logic_error("polar: unknown cone kind");
}

Vector project(const Cone& cone, const Vector& z) {
  check_dim(cone, z, "project");
  switch (cone.kind()) {
    case ConeKind::kNonpositiveOrthant:
      return z.cwiseMin(0.0);
    case ConeKind::kNonnegativeOrthant:
      return z.cwiseMax(0.0);
    case ConeKind::kZero:
      return Vector::Zero(z.size());
    case ConeKind::kFree:
      return z;
    case ConeKind::kSecondOrder:
      return project_soc(z);
    case ConeKind::kNegSecondOrder:
      return -project_soc(-z);
    case ConeKind::kProduct: {
      Vector out(z.size());
      int offset = 0;
      for (const Cone& part : cone.parts()) {
        out.segment(offset, part.dim()) = project(part, z.segment(offset, part.dim()));
        offset += part.dim();
      }
      return out;
    }
  }
  throw std::logic_error("project: unknown cone kind");
}

double distance(const Cone& cone, const Vector& z) {
  return (z - project(cone, z)).norm();
}

bool contains(const Cone& cone, const Vector& z, double tol) {
  return distance(cone, z) <= tol * (1.0 + z.norm());
}

NormalConeCheck in_normal_cone(const Cone& cone, const Vector& z, const Vector& lambda,
                               double tol) {
  check_dim(cone, z, "in_normal_cone");
  check_dim(cone, lambda, "in_normal_cone");
  NormalConeCheck out;
  out.primal_distance = distance(cone, z);
  out.polar_distance = distance(polar(cone), lambda);
  out.complementarity = std::abs(z.dot(lambda));
  out.ok = out.primal_distance <= tol && out.polar_distance <= tol &&
           out.complementarity <= tol * (1.0 + z.norm() * lambda.norm());
  return out;
}

Vector project_normal_cone(const Cone& cone, const Vector& z, const Vector& lambda,
                           double active_tol) {
  check_dim(cone, z, "project_normal_cone");
  check_dim(cone, lambda, "project_normal_cone");
  switch (cone.kind()) {
    case ConeKind::kNonpositiveOrthant: {
      Vector out = Vector::Zero(z.size());
      for (int i = 0; i < z.size(); ++i) {
        if (z(i) >= -active_tol) out(i) = std::max(lambda(i), 0.0);
      }
      return out;
    }
    case ConeKind::kNonnegativeOrthant: {
      Vector out = Vector::Zero(z.size());
      for (int i = 0; i < z.size(); ++i) {
        if (z(i) <= active_tol) out(i) = std::min(lambda(i), 0.0);
      }
      return out;
    }
    case ConeKind::kZero:
      return lambda;
    case ConeKind::kFree:
      return Vector::Zero(z.size());
    case ConeKind::kSecondOrder:
      return project_soc_normal(z, lambda, active_tol);
    case ConeKind::kNegSecondOrder:
      return -project_soc_normal(-z, -lambda, active_tol);
    case ConeKind::kProduct: {
      Vector out(z.size());
      int offset = 0;
      for (const Cone& part : cone.parts()) {
        out.segment(offset, part.dim()) =
            project_normal_cone(part, z.segment(offset, part.dim()),
                                lambda.segment(offset, part.dim()), active_tol);
        offset += part.dim();
      }
      return out;
    }
  }
  throw std::logic_error("project_normal_cone: unknown cone kind");
}

std::string to_string(const Cone& cone) {
  const std::string d = "(" + std::to_string(cone.dim()) + ")";
  switch (cone.kind()) {
    case ConeKind::kNonpositiveOrthant:
      return "NonpositiveOrthant" + d;
    case ConeKind::kNonnegativeOrthant:
      return "NonnegativeOrthant" + d;
    case ConeKind::kZero:
      return "Zero" + d;
    case ConeKind::kFree:
      return "Free" + d;
    case ConeKind::kSecondOrder:
      return "SecondOrder" + d;
    case ConeKind::kNegSecondOrder:
      return "NegSecondOrder" + d;
    case ConeKind::kProduct: {
      std::string out;
      for (const Cone& part : cone.parts()) {
        if (!out.empty()) out += " x ";
        out += to_string(part);
      }
      return out;
    }
  }
  return "?";
}

nlohmann::json cone_to_json(const Cone& cone) {
  nlohmann::json j;
  switch (cone.kind()) {
    case ConeKind::kNonpositiveOrthant:
      j["kind"] = "orthant_nonpos";
      break;
    case ConeKind::kNonnegativeOrthant:
      j["kind"] = "orthant_nonneg";
      break;
    case ConeKind::kZero:
      j["kind"] = "zero";
      break;
    case ConeKind::kFree:
      j["kind"] = "polar_zero";
      break;
    case ConeKind::kSecondOrder:
      j["kind"] = "soc";
      break;
    case ConeKind::kNegSecondOrder:
      j["kind"] = "neg_soc";
      break;
    case ConeKind::kProduct: {
      j["kind"] = "product";
      nlohmann::json parts = nlohmann::json::array();
      for (const Cone& part : cone.parts()) parts.push_back(cone_to_json(part));
      j["parts"] = std::move(parts);
      break;
    }
  }
  j["dim"] = cone.dim();
  return j;
}

Cone cone_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw std::invalid_argument("cone JSON: expected object with \"kind\"");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "product") {
    std::vector<Cone> parts;
    for (const auto& part : j.at("parts")) parts.push_back(cone_from_json(part));
    Cone out = Cone::Product(std::move(parts));
    if (j.contains("dim") && j.at("dim").get<int>() != out.dim()) {
      throw std::invalid_argument("cone JSON: product dim does not match its parts");
    }
    return out;
  }
  const int dim = j.at("dim").get<int>();
  if (kind == "orthant_nonpos") return Cone::NonpositiveOrthant(dim);
  if (kind == "orthant_nonneg") return Cone::NonnegativeOrthant(dim);
  if (kind == "zero") return Cone::Zero(dim);
  if (kind == "polar_zero") return Cone::Free(dim);
  if (kind == "soc") return Cone::SecondOrder(dim);
  if (kind == "neg_soc") return Cone::NegSecondOrder(dim);
  throw std::invalid_argument("cone JSON: unknown kind \"" + kind + "\"");
}

}  // namespace vfgrad
