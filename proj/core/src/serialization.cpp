#include "vfgrad/serialization.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <stdexcept>

namespace vfgrad {
namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json doubles(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

void csv_number(std::ostream& os, double x) {
  if (std::isfinite(x)) os << x;
}

}  // namespace

json to_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw std::invalid_argument("expected a JSON array of numbers");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

json to_json(const SolveOptions& o) {
  return {{"tol", o.tol},
          {"max_outer", o.max_outer},
          {"max_inner", o.max_inner},
          {"penalty_init", o.penalty_init},
          {"penalty_growth", o.penalty_growth},
          {"multiplier_clip", o.multiplier_clip},
          {"seed", o.seed},
          {"starts", o.starts},
          {"use_oracle", o.use_oracle},
          {"prox_init", o.prox_init}};
}

SolveOptions solve_options_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("solve options must be a JSON object");
  static const std::set<std::string> known = {"tol", "max_outer", "max_inner",
                                              "penalty_init", "penalty_growth",
                                              "multiplier_clip", "seed", "starts",
                                              "use_oracle", "prox_init"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown solve option '" + key + "'");
  }
  SolveOptions o;
  try {
    o.tol = j.value("tol", o.tol);
    o.max_outer = j.value("max_outer", o.max_outer);
    o.max_inner = j.value("max_inner", o.max_inner);
    o.penalty_init = j.value("penalty_init", o.penalty_init);
    o.penalty_growth = j.value("penalty_growth", o.penalty_growth);
    o.multiplier_clip = j.value("multiplier_clip", o.multiplier_clip);
    o.seed = j.value("seed", o.seed);
    o.starts = j.value("starts", o.starts);
    o.use_oracle = j.value("use_oracle", o.use_oracle);
    o.prox_init = j.value("prox_init", o.prox_init);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("solve options: ") + e.what());
  }
  o.validate();
  return o;
}

json to_json(const KktResidual& r) {
  json out = {{"stationarity", number(r.stationarity)},
              {"primal_feasibility", number(r.primal_feasibility)},
              {"dual_feasibility", number(r.dual_feasibility)},
              {"complementarity", number(r.complementarity)}};
  if (r.value_gap) out["value_gap"] = number(*r.value_gap);
  return out;
}

json to_json(const PrimalDualPoint& pt) {
  return {{"theta", to_json(pt.theta)},
          {"x", to_json(pt.x)},
          {"lambda", to_json(pt.lambda)},
          {"status", to_string(pt.status)},
          {"objective_value", number(pt.objective_value)}};
}

json to_json(const SolveReport& r) {
  return {{"point", to_json(r.point)},
          {"residual", to_json(r.residual)},
          {"outer_iterations", r.outer_iterations},
          {"inner_iterations", r.inner_iterations},
          {"starts_used", r.starts_used},
          {"feasibility_trace", doubles(r.feasibility_trace)}};
}

json to_json(const QualificationReport& r) {
  json out = {{"qualified", r.qualified},
              {"margin", std::isinf(r.margin) ? json("inf") : number(r.margin)},
              {"method", to_string(r.method)},
              {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
              {"scope", "this point only"}};
  if (r.method == QualificationMethod::kLpExact) out["equality_rank_ok"] = r.equality_rank_ok;
  return out;
}

json to_json(const AdjointGradient& g) {
  json out = {{"u", to_json(g.u)},
              {"x_block_residual", number(g.x_block_residual)},
              {"certified", g.certified},
              {"solver_calls", g.solver_calls},
              {"source", to_json(g.source)}};
  if (g.selection_weights) out["selection_weights"] = to_json(*g.selection_weights);
  return out;
}

json to_json(const ChainRuleReport& r) {
  return {{"problem", r.problem},
          {"curve", r.curve},
          {"h", r.h},
          {"tol", r.tol},
          {"threshold", r.threshold},
          {"n_grid", r.grid.size()},
          {"pass_fraction", r.pass_fraction},
          {"passed", r.ok()},
          // A finite sample of one curve can only fail to find a violation.
          {"verdict", r.ok() ? "no violation found" : "violations above threshold"},
          {"skipped", r.skipped_count},
          {"exceptional_points", doubles(r.exceptional_points)},
          {"grid", doubles(r.grid)},
          {"lhs", doubles(r.lhs)},
          {"rhs", doubles(r.rhs)},
          {"abs_err", doubles(r.abs_err)}};
}

json to_json(const DiniReport& r) {
  json inside = json::array();
  for (bool b : r.inside) inside.push_back(b);
  return {{"theta", to_json(r.theta)},
          {"direction", to_json(r.direction)},
          {"inner_products", doubles(r.inner_products)},
          {"interval", {number(r.lower), number(r.upper)}},
          {"tol", r.tol},
          {"h_list", doubles(r.h_list)},
          {"quotients", doubles(r.quotients)},
          {"inside", inside},
          {"passed", r.ok}};
}

json to_json(const CostReport& r, bool include_timing) {
  json out = {{"q", r.q},
              {"asm_solver_calls", r.asm_calls},
              {"fd_solver_calls", r.fd_calls},
              {"asm_cheaper", r.cheaper}};
  if (include_timing) {
    out["asm_seconds"] = r.asm_seconds;
    out["fd_seconds"] = r.fd_seconds;
  }
  return out;
}

json to_json(const DescentTrace& t) {
  json iterates = json::array();
  for (const Vector& v : t.iterates) iterates.push_back(to_json(v));
  json out = {{"steps", t.steps()},
              {"s", t.s},
              {"schedule", t.schedule},
              {"stop_reason", to_string(t.stop_reason)},
              {"iterates", iterates},
              {"values", doubles(t.values)},
              {"asm_norms", doubles(t.asm_norms)}};
  if (!t.iterates.empty()) {
    out["final_theta"] = to_json(t.iterates.back());
    out["final_value"] = number(t.values.back());
    out["final_asm_norm"] = number(t.asm_norms.back());
  }
  return out;
}

void write_chain_rule_csv(std::ostream& os, const ChainRuleReport& r) {
  os << std::setprecision(17) << "t,lhs,rhs,err\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    os << r.grid[i] << ',';
    csv_number(os, r.lhs[i]);
    os << ',';
    csv_number(os, r.rhs[i]);
    os << ',';
    csv_number(os, r.abs_err[i]);
    os << '\n';
  }
}

void write_descent_csv(std::ostream& os, const DescentTrace& t) {
  const int q = t.iterates.empty() ? 0 : static_cast<int>(t.iterates.front().size());
  os << std::setprecision(17) << 'k';
  for (int i = 1; i <= q; ++i) os << ",theta_" << i;
  os << ",f,unorm\n";
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    os << k;
    for (int i = 0; i < q; ++i) os << ',' << t.iterates[k](i);
    os << ',' << t.values[k] << ',' << t.asm_norms[k] << '\n';
  }
}

}  // namespace vfgrad
