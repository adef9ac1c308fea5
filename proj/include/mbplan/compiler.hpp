#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbplan/diagnostic.hpp"
#include "mbplan/model.hpp"
#include "mbplan/pddl.hpp"

namespace mbplan::compiler {

struct GroundFact {
  std::string name;
  std::vector<std::string> args;
  friend bool operator==(const GroundFact&, const GroundFact&) = default;
};

struct InitValue {
  GroundFact term;
  double value = 0;
  friend bool operator==(const InitValue&, const InitValue&) = default;
};

struct GoalLiteral {
  GroundFact atom;
  bool negated = false;
  friend bool operator==(const GoalLiteral&, const GoalLiteral&) = default;
};

/// Problem-side data kept outside the system model (`.pi1` files).
struct InstanceData {
  std::string problem_name;
  pddl::TypedList objects;  // (object name, type name)
  std::vector<GroundFact> init_predicates;
  std::vector<InitValue> init_function_values;
  std::vector<GoalLiteral> goal;  // conjunction
  std::optional<GroundFact> metric;  // minimize target
  friend bool operator==(const InstanceData&, const InstanceData&) = default;
};

Result<InstanceData> load_instance(std::string_view text);
std::string save_instance(const InstanceData& data);

/// Derives the PDDL domain of one Domain package. The model is expected to
/// pass validation; anything the PDDL checker still rejects comes back as
/// `compile.internal`.
Result<pddl::PddlDomain> compile_domain(const model::ModelGraph& model,
                                        const model::ElementId& domain);

/// Problem from instance data. Adds `(= (total-cost) 0)` when the metric
/// minimizes total-cost and no value is given.
Result<pddl::PddlProblem> compile_problem(const pddl::PddlDomain& domain, const InstanceData& data,
                                          const std::string& name);

}  // namespace mbplan::compiler
