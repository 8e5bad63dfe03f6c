#pragma once

#include <ostream>

#include <nlohmann/json.hpp>

#include "vfgrad/optimize.hpp"
#include "vfgrad/qualification.hpp"
#include "vfgrad/verify.hpp"

namespace vfgrad {

using nlohmann::json;

json to_json(const Vector& v);
/// Accepts a JSON array of numbers. Throws std::invalid_argument otherwise.
Vector vector_from_json(const json& j);

json to_json(const SolveOptions& opts);
/// Missing keys keep their defaults; unknown keys and invalid values throw
/// std::invalid_argument.
SolveOptions solve_options_from_json(const json& j);

json to_json(const KktResidual& r);
json to_json(const PrimalDualPoint& pt);
json to_json(const SolveReport& r);
json to_json(const QualificationReport& r);
json to_json(const AdjointGradient& g);
json to_json(const ChainRuleReport& r);
json to_json(const DiniReport& r);
/// Wall-clock fields are omitted unless include_timing is set.
json to_json(const CostReport& r, bool include_timing);
json to_json(const DescentTrace& t);

/// Columns: t,lhs,rhs,err (skipped points have empty lhs/rhs/err).
void write_chain_rule_csv(std::ostream& os, const ChainRuleReport& r);
/// Columns: k,theta_1..theta_q,f,unorm.
void write_descent_csv(std::ostream& os, const DescentTrace& t);

}  // namespace vfgrad
