#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbplan/diagnostic.hpp"
#include "mbplan/pddl.hpp"

namespace mbplan::planner {

using AtomId = std::uint32_t;

/// Set of true atoms over a task's atom universe.
class State {
 public:
  State() = default;
  explicit State(std::size_t num_atoms) : words_((num_atoms + 63) / 64, 0) {}

  bool test(AtomId a) const { return (words_[a >> 6] >> (a & 63)) & 1U; }
  void set(AtomId a) { words_[a >> 6] |= std::uint64_t{1} << (a & 63); }
  void reset(AtomId a) { words_[a >> 6] &= ~(std::uint64_t{1} << (a & 63)); }
  std::size_t hash() const;

  friend bool operator==(const State&, const State&) = default;

 private:
  std::vector<std::uint64_t> words_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GroundAction {
  std::string schema;
  std::vector<std::string> args;
  std::vector<AtomId> pre_pos;  // sorted, unique
  std::vector<AtomId> pre_neg;
  std::vector<AtomId> add;
  std::vector<AtomId> del;  // disjoint from add
  double cost = 0;

  /// `(schema a b)`
  std::string label() const;
  friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

struct GroundTask {
  std::vector<std::string> atoms;  // `(p a b)` per AtomId
  std::vector<GroundAction> actions;
  State init;
  std::vector<AtomId> goal_pos;
  std::vector<AtomId> goal_neg;

  bool applicable(const State& s, const GroundAction& a) const;
  State apply(const State& s, const GroundAction& a) const;
  bool is_goal(const State& s) const;
  /// Case-insensitive lookup of `(schema a b)`; whitespace-normalized.
  std::optional<std::size_t> find_action(std::string_view label) const;

  friend bool operator==(const GroundTask&, const GroundTask&) = default;
};

/// Instantiates every type-consistent binding. Bindings that need a static
/// atom absent from init (or forbid one present) are pruned, which does not
/// change the reachable state space. Diagnostics: `ground.*`
/// (missing-function-value, type-mismatch, unknown-object, negative-cost,
/// too-large). Parallel over bindings when built with OpenMP.
Result<GroundTask> ground(const pddl::PddlDomain& domain, const pddl::PddlProblem& problem);

/// Single-threaded recursive reference; returns the same task as ground().
Result<GroundTask> ground_serial(const pddl::PddlDomain& domain, const pddl::PddlProblem& problem);

struct Plan {
  std::vector<std::size_t> steps;  // indices into GroundTask::actions
  double total_cost = 0;
  friend bool operator==(const Plan&, const Plan&) = default;
};

/// Plan over `steps` with total_cost set to the sum of step costs.
Plan make_plan(const GroundTask& task, std::vector<std::size_t> steps);

enum class SolveStatus { Solved, Unsolvable, ResourceLimit };

enum class Heuristic { None, HMax };

struct SearchOptions {
  std::size_t expansion_cap = 1'000'000;
  Heuristic heuristic = Heuristic::None;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unsolvable;
  Plan plan;
  std::size_t expanded = 0;
};

/// Cost-optimal search (Dijkstra, or A* with h_max). Among optimal plans the
/// one with the fewest steps wins, then the lexicographically smallest
/// sequence of action labels.
SolveResult solve(const GroundTask& task, const SearchOptions& options = {});

/// h_max estimate from `s`; infinity when the goal is relaxed-unreachable.
double h_max(const GroundTask& task, const State& s);

struct PlanReport {
  bool accepted = false;
  double total_cost = 0;  // cost accumulated up to acceptance or failure
  std::size_t failed_step = 0;  // 1-based; steps+1 when only the goal fails
  std::vector<std::string> unmet;  // atoms, `(not ...)` for violated negatives
  std::string reason;
};

/// Replays the plan from init, checking applicability and the goal; rejects
/// a plan whose total_cost differs from the sum of its steps.
PlanReport validate_plan(const GroundTask& task, const Plan& plan);

// Plan files: one `(action arg...)` per line, `; cost = N` trailer.

struct PlanFile {
  std::vector<std::string> steps;  // normalized `(name a b)` text
  std::vector<int> lines;
  std::optional<double> declared_cost;
};

std::string format_plan(const GroundTask& task, const Plan& plan);
Result<PlanFile> parse_plan(std::string_view text);
/// Resolves each step against the task; an unknown action rejects the plan
/// at that step. A declared cost must match the replayed cost.
PlanReport check_plan(const GroundTask& task, const PlanFile& plan);

}  // namespace mbplan::planner
