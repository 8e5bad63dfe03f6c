#include "vfgrad/library.hpp"

#include <cmath>
#include <stdexcept>

namespace vfgrad {
namespace {

constexpr std::uint64_t kSelfTestSeed = 0x5eed;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double value : values) v(i++) = value;
  return v;
}

void expect_no_params(std::string_view name, const nlohmann::json& params) {
  if (params.is_null()) return;
  if (!params.is_object() || !params.empty()) {
    throw std::invalid_argument("problem '" + std::string(name) + "' takes no parameters");
  }
}

int dimension_param(std::string_view name, const nlohmann::json& params, int fallback) {
  if (params.is_null()) return fallback;
  if (!params.is_object()) {
    throw std::invalid_argument("problem '" + std::string(name) + "': params must be an object");
  }
  for (const auto& [key, _] : params.items()) {
    if (key != "q") {
      throw std::invalid_argument("problem '" + std::string(name) + "': unknown parameter '" +
                                  key + "'");
    }
  }
  if (!params.contains("q")) return fallback;
  const auto& qj = params.at("q");
  if (!qj.is_number_integer() || qj.get<long long>() < 1 || qj.get<long long>() > 10000) {
    throw std::invalid_argument("problem '" + std::string(name) +
                                "': q must be an integer in [1, 10000]");
  }
  return qj.get<int>();
}

NlpProblem make_failclarke() {
  NlpProblem p;
  p.name = "failclarke";
  p.n = 2;
  p.q = 1;
  p.m_g = 3;
  p.objective = [](const Vector& x, const Vector&) { return x(0) * x(1); };
  p.grad_selection = [](const Vector& x, const Vector&) {
    return GradSelection{vec({x(1), x(0)}), Vector::Zero(1)};
  };
  p.g = [](const Vector& x, const Vector& th) {
    return vec({x(0), x(1) - th(0), x(1) + th(0)});
  };
  p.g_jac_x = [](const Vector&, const Vector&) {
    Matrix j(3, 2);
    j << 1, 0, 0, 1, 0, 1;
    return j;
  };
  p.g_jac_theta = [](const Vector&, const Vector&) {
    Matrix j(3, 1);
    j << 0, -1, 1;
    return j;
  };
  auto objective = p.objective;
  auto point = [objective](const Vector& th, Vector x, Vector lambda) {
    PrimalDualPoint pt;
    pt.theta = th;
    pt.objective_value = objective(x, th);
    pt.x = std::move(x);
    pt.lambda = std::move(lambda);
    pt.status = SolveStatus::kOracle;
    return pt;
  };
  // At th = 0 the oracle deliberately returns x = (-1, 0), lambda = (0, 0, 1),
  // whose adjoint output 1 is not a subgradient of f == 0.
  p.oracle = [point](const Vector& th) {
    const double t = th(0);
    if (t == 0.0) return point(th, vec({-1.0, 0.0}), vec({0.0, 0.0, 1.0}));
    return point(th, vec({0.0, -std::abs(t)}), vec({std::abs(t), 0.0, 0.0}));
  };
  p.known_kkt_points = [point](const Vector& th) {
    const double t = th(0);
    if (t == 0.0) {
      return std::vector<PrimalDualPoint>{point(th, vec({-1.0, 0.0}), vec({0.0, 0.0, 1.0})),
                                          point(th, vec({0.0, 0.0}), vec({0.0, 0.0, 0.0}))};
    }
    const double a = std::abs(t);
    return std::vector<PrimalDualPoint>{point(th, vec({0.0, -a}), vec({a, 0.0, 0.0})),
                                        point(th, vec({0.0, -a - 1.0}), vec({a + 1.0, 0.0, 0.0}))};
  };
  p.known_value = [](const Vector&) { return 0.0; };
  p.known_gradient = [](const Vector&) { return Vector::Zero(1).eval(); };
  return p;
}

NlpProblem make_scalar_qp() {
  NlpProblem p;
  p.name = "scalar_qp";
  p.n = 1;
  p.q = 1;
  p.m_g = 1;
  p.objective = [](const Vector& x, const Vector&) { return 0.5 * x(0) * x(0); };
  p.grad_selection = [](const Vector& x, const Vector&) {
    return GradSelection{vec({x(0)}), Vector::Zero(1)};
  };
  p.g = [](const Vector& x, const Vector& th) { return vec({th(0) - x(0)}); };
  p.g_jac_x = [](const Vector&, const Vector&) { return Matrix::Constant(1, 1, -1.0); };
  p.g_jac_theta = [](const Vector&, const Vector&) { return Matrix::Constant(1, 1, 1.0); };
  auto objective = p.objective;
  p.oracle = [objective](const Vector& th) {
    const double s = std::max(th(0), 0.0);
    PrimalDualPoint pt;
    pt.theta = th;
    pt.x = vec({s});
    pt.lambda = vec({s});
    pt.objective_value = objective(pt.x, th);
    pt.status = SolveStatus::kOracle;
    return pt;
  };
  p.known_value = [](const Vector& th) {
    const double s = std::max(th(0), 0.0);
    return 0.5 * s * s;
  };
  p.known_gradient = [](const Vector& th) { return vec({std::max(th(0), 0.0)}); };
  return p;
}

NlpProblem make_ring() {
  NlpProblem p;
  p.name = "ring";
  p.n = 2;
  p.q = 1;
  p.objective = [](const Vector& x, const Vector& th) {
    const double r = x.squaredNorm() - th(0);
    return r * r;
  };
  p.grad_selection = [](const Vector& x, const Vector& th) {
    const double r = x.squaredNorm() - th(0);
    return GradSelection{(4.0 * r) * x, vec({-2.0 * r})};
  };
  auto objective = p.objective;
  auto point = [objective](const Vector& th, Vector x) {
    PrimalDualPoint pt;
    pt.theta = th;
    pt.objective_value = objective(x, th);
    pt.x = std::move(x);
    pt.lambda = Vector(0);
    pt.status = SolveStatus::kOracle;
    return pt;
  };
  p.oracle = [point](const Vector& th) {
    if (th(0) > 0.0) return point(th, vec({std::sqrt(th(0)), 0.0}));
    return point(th, Vector::Zero(2));
  };
  p.known_kkt_points = [point](const Vector& th) {
    if (th(0) <= 0.0) return std::vector<PrimalDualPoint>{point(th, Vector::Zero(2))};
    const double r = std::sqrt(th(0));
    const double d = std::sqrt(0.5 * th(0));
    return std::vector<PrimalDualPoint>{point(th, vec({r, 0.0})), point(th, vec({0.0, r})),
                                        point(th, vec({-d, d}))};
  };
  p.known_value = [](const Vector& th) {
    const double s = std::min(th(0), 0.0);
    return s * s;
  };
  p.known_gradient = [](const Vector& th) { return vec({2.0 * std::min(th(0), 0.0)}); };
  return p;
}

NlpProblem make_bilevel_quad(int q) {
  NlpProblem p;
  p.name = "bilevel_quad";
  p.n = q;
  p.q = q;
  p.m_g = q;
  p.objective = [](const Vector& x, const Vector&) { return 0.5 * x.squaredNorm(); };
  p.grad_selection = [q](const Vector& x, const Vector&) {
    return GradSelection{x, Vector::Zero(q)};
  };
  p.g = [](const Vector& x, const Vector& th) { return (th - x).eval(); };
  p.g_jac_x = [q](const Vector&, const Vector&) { return (-Matrix::Identity(q, q)).eval(); };
  p.g_jac_theta = [q](const Vector&, const Vector&) { return Matrix::Identity(q, q).eval(); };
  auto objective = p.objective;
  p.oracle = [objective](const Vector& th) {
    PrimalDualPoint pt;
    pt.theta = th;
    pt.x = th.cwiseMax(0.0);
    pt.lambda = pt.x;
    pt.objective_value = objective(pt.x, th);
    pt.status = SolveStatus::kOracle;
    return pt;
  };
  p.known_value = [](const Vector& th) { return 0.5 * th.cwiseMax(0.0).squaredNorm(); };
  p.known_gradient = [](const Vector& th) { return th.cwiseMax(0.0).eval(); };
  return p;
}

ParametricProblem make_soc_norm(int q) {
  ParametricProblem p;
  p.name = "soc_norm";
  p.n = 1;
  p.q = q;
  p.m = q + 1;
  p.cone = Cone::SecondOrder(q + 1);
  p.objective = [](const Vector& x, const Vector&) { return x(0); };
  p.grad_selection = [q](const Vector&, const Vector&) {
    return GradSelection{Vector::Ones(1), Vector::Zero(q)};
  };
  p.constraint = [q](const Vector& x, const Vector& th) {
    Vector c(q + 1);
    c(0) = x(0);
    c.tail(q) = th;
    return c;
  };
  p.jac_x = [q](const Vector&, const Vector&) {
    Matrix j = Matrix::Zero(q + 1, 1);
    j(0, 0) = 1.0;
    return j;
  };
  p.jac_theta = [q](const Vector&, const Vector&) {
    Matrix j = Matrix::Zero(q + 1, q);
    j.bottomRows(q).setIdentity();
    return j;
  };
  p.oracle = [q](const Vector& th) {
    const double r = th.norm();
    PrimalDualPoint pt;
    pt.theta = th;
    pt.x = vec({r});
    pt.lambda = Vector::Zero(q + 1);
    pt.lambda(0) = -1.0;
    if (r > 0.0) pt.lambda.tail(q) = th / r;
    pt.objective_value = r;
    pt.status = SolveStatus::kOracle;
    return pt;
  };
  p.known_value = [](const Vector& th) { return th.norm(); };
  p.known_gradient = [q](const Vector& th) {
    const double r = th.norm();
    return r > 0.0 ? (th / r).eval() : Vector::Zero(q).eval();
  };
  return p;
}

ParametricProblem registered(ParametricProblem p) {
  validate(p);
  const SelfTestReport report = self_test(p, kSelfTestSeed);
  if (!report.ok) {
    throw std::logic_error("library problem '" + p.name + "' failed its derivative self test");
  }
  return p;
}

}  // namespace

std::vector<LibraryEntry> library_entries() {
  std::vector<LibraryEntry> out;
  for (std::string_view name : {"failclarke", "scalar_qp", "ring", "soc_norm", "bilevel_quad"}) {
    const ParametricProblem p = library(name);
    LibraryEntry e;
    e.name = std::string(name);
    e.n = p.n;
    e.q = p.q;
    e.m = p.m;
    e.cone = p.cone ? to_string(*p.cone) : "none";
    e.known_value = static_cast<bool>(p.known_value);
    e.is_nlp = library_nlp(name).has_value();
    if (name == "failclarke") {
      e.description = "F = x1*x2, G = (x1, x2 - th, x2 + th); f == 0, spurious adjoint at th = 0";
    } else if (name == "scalar_qp") {
      e.description = "F = x^2/2, th - x <= 0; f = max(th,0)^2/2";
    } else if (name == "ring") {
      e.description = "F = (|x|^2 - th)^2 unconstrained; minimizer circle for th > 0";
    } else if (name == "soc_norm") {
      e.description = "F = x, (x, th) in SOC; f = |th| (param q, default 2)";
    } else {
      e.description = "F = |x|^2/2, th - x <= 0; f = |max(th,0)|^2/2 (param q, default 2)";
    }
    out.push_back(std::move(e));
  }
  return out;
}

bool library_contains(std::string_view name) {
  return name == "failclarke" || name == "scalar_qp" || name == "ring" || name == "soc_norm" ||
         name == "bilevel_quad";
}

std::optional<NlpProblem> library_nlp(std::string_view name, const nlohmann::json& params) {
  if (name == "failclarke") {
    expect_no_params(name, params);
    return make_failclarke();
  }
  if (name == "scalar_qp") {
    expect_no_params(name, params);
    return make_scalar_qp();
  }
  if (name == "ring") {
    expect_no_params(name, params);
    return make_ring();
  }
  if (name == "bilevel_quad") return make_bilevel_quad(dimension_param(name, params, 2));
  if (name == "soc_norm") {
    dimension_param(name, params, 2);
    return std::nullopt;
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

ParametricProblem library(std::string_view name, const nlohmann::json& params) {
  if (name == "soc_norm") return registered(make_soc_norm(dimension_param(name, params, 2)));
  auto nlp = library_nlp(name, params);
  return registered(nlp_to_conic(*nlp));
}

}  // namespace vfgrad
