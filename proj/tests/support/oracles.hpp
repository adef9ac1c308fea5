#pragma once

#include <array>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "mbplan/model.hpp"
#include "mbplan/planner.hpp"

namespace mbplan::testing {

/// `^[a-zA-Z][a-zA-Z0-9_]*$` through std::regex.
bool domain_name_oracle(const std::string& s);

/// (domain id, lowered type name) for every pair of Type classes that share
/// a name within one domain. Ownership is walked directly on the elements.
std::set<std::pair<std::string, std::string>> duplicate_type_oracle(const model::ModelGraph& m);

struct Exhaustive {
  std::optional<double> optimal_cost;  // nullopt when no goal state is reachable
  std::size_t reachable_states = 0;
  bool complete = true;  // false when the state limit was hit
};

/// Enumerates the reachable state graph breadth-first, then runs
/// Bellman-Ford over the explicit edge list.
Exhaustive exhaustive_search(const planner::GroundTask& task, std::size_t state_limit = 100000);

/// Cheapest plan cost with exactly 0, 1 and at least 2 actions matching
/// `counted`, over the layered reachable graph.
std::array<std::optional<double>, 3> cost_by_count(
    const planner::GroundTask& task, const std::function<bool(const planner::GroundAction&)>& counted);

}  // namespace mbplan::testing
