#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "mbplan/names.hpp"
#include "mbplan/planner.hpp"

namespace mbplan::planner {

std::size_t State::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto w : words_) {
    h ^= w;
    h *= 1099511628211ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

std::string GroundAction::label() const {
  std::string out = "(" + schema;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

bool GroundTask::applicable(const State& s, const GroundAction& a) const {
  for (auto p : a.pre_pos) {
    if (!s.test(p)) return false;
  }
  for (auto p : a.pre_neg) {
    if (s.test(p)) return false;
  }
  return true;
}

State GroundTask::apply(const State& s, const GroundAction& a) const {
  State next = s;
  for (auto d : a.del) next.reset(d);
  for (auto d : a.add) next.set(d);
  return next;
}

bool GroundTask::is_goal(const State& s) const {
  for (auto g : goal_pos) {
    if (!s.test(g)) return false;
  }
  for (auto g : goal_neg) {
    if (s.test(g)) return false;
  }
  return true;
}

namespace {

std::string normalize_label(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      space = true;
      continue;
    }
    if (space && !out.empty() && out.back() != '(' && c != ')') out += ' ';
    space = false;
    out += c;
  }
  return lower(out);
}

}  // namespace

std::optional<std::size_t> GroundTask::find_action(std::string_view label) const {
  std::string want = normalize_label(label);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (lower(actions[i].label()) == want) return i;
  }
  return std::nullopt;
}

Plan make_plan(const GroundTask& task, std::vector<std::size_t> steps) {
  Plan p;
  for (auto s : steps) p.total_cost += task.actions.at(s).cost;
  p.steps = std::move(steps);
  return p;
}

double h_max(const GroundTask& task, const State& s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(task.atoms.size(), inf);
  for (std::size_t a = 0; a < task.atoms.size(); ++a) {
    if (s.test(static_cast<AtomId>(a))) cost[a] = 0;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& act : task.actions) {
      double pre = 0;
      for (auto p : act.pre_pos) pre = std::max(pre, cost[p]);
      if (pre == inf) continue;
      double c = pre + act.cost;
      for (auto a : act.add) {
        if (c < cost[a]) {
          cost[a] = c;
          changed = true;
        }
      }
    }
  }
  double h = 0;
  for (auto g : task.goal_pos) h = std::max(h, cost[g]);
  return h;
}

namespace {

struct Node {
  std::size_t state;
  std::int64_t parent;
  std::uint32_t action;
  double g;
  std::size_t length;
};

class Search {
 public:
  Search(const GroundTask& task, const SearchOptions& opts) : task_(task), opts_(opts) {
    std::vector<std::size_t> order(task.actions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::string> labels;
    for (const auto& a : task.actions) labels.push_back(lower(a.label()));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (labels[a] != labels[b]) return labels[a] < labels[b];
      return a < b;
    });
    rank_.resize(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank_[order[r]] = static_cast<std::uint32_t>(r);
  }

  SolveResult run();

 private:
  double h(std::size_t state) {
    if (opts_.heuristic == Heuristic::None) return 0;
    if (h_cache_.size() <= state) h_cache_.resize(state + 1, -1);
    if (h_cache_[state] < 0) h_cache_[state] = h_max(task_, states_[state]);
    return h_cache_[state];
  }

  // rank sequence of the path ending at `node`, root first
  std::vector<std::uint32_t> sequence(std::int64_t node) const {
    std::vector<std::uint32_t> seq;
    for (; node >= 0 && nodes_[node].parent >= 0; node = nodes_[node].parent) {
      seq.push_back(rank_[nodes_[node].action]);
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

  // strict ordering on (f, length, action sequence)
  bool better(std::int64_t a, std::int64_t b) {
    const Node& x = nodes_[a];
    const Node& y = nodes_[b];
    double fx = x.g + h(x.state), fy = y.g + h(y.state);
    if (fx != fy) return fx < fy;
    if (x.length != y.length) return x.length < y.length;
    return sequence(a) < sequence(b);
  }

  std::size_t intern(State s) {
    auto [it, inserted] = index_.emplace(s, states_.size());
    if (inserted) {
      states_.push_back(std::move(s));
      best_.push_back(-1);
      closed_.push_back(false);
    }
    return it->second;
  }

  const GroundTask& task_;
  const SearchOptions& opts_;
  std::vector<std::uint32_t> rank_;
  std::vector<Node> nodes_;
  std::vector<State> states_;
  std::vector<std::int64_t> best_;
  std::vector<bool> closed_;
  std::vector<double> h_cache_;
  std::unordered_map<State, std::size_t, StateHash> index_;
};

SolveResult Search::run() {
  SolveResult result;
  auto cmp = [this](std::int64_t a, std::int64_t b) { return better(b, a); };
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, decltype(cmp)> open(cmp);

  std::size_t root = intern(task_.init);
  if (std::isinf(h(root))) return result;
  nodes_.push_back({root, -1, 0, 0.0, 0});
  best_[root] = 0;
  open.push(0);

  while (!open.empty()) {
    std::int64_t n = open.top();
    open.pop();
    std::size_t s = nodes_[n].state;
    if (closed_[s] || best_[s] != n) continue;
    closed_[s] = true;

    if (task_.is_goal(states_[s])) {
      result.status = SolveStatus::Solved;
      for (std::int64_t m = n; nodes_[m].parent >= 0; m = nodes_[m].parent) {
        result.plan.steps.push_back(nodes_[m].action);
      }
      std::reverse(result.plan.steps.begin(), result.plan.steps.end());
      result.plan.total_cost = nodes_[n].g;
      return result;
    }
    if (result.expanded >= opts_.expansion_cap) {
      result.status = SolveStatus::ResourceLimit;
      return result;
    }
    ++result.expanded;

    for (std::size_t ai = 0; ai < task_.actions.size(); ++ai) {
      const GroundAction& a = task_.actions[ai];
      if (!task_.applicable(states_[s], a)) continue;
      std::size_t t = intern(task_.apply(states_[s], a));
      if (closed_[t]) continue;
      if (std::isinf(h(t))) continue;
      const Node& cur = nodes_[n];
      nodes_.push_back({t, n, static_cast<std::uint32_t>(ai), cur.g + a.cost, cur.length + 1});
      auto m = static_cast<std::int64_t>(nodes_.size() - 1);
      if (best_[t] >= 0 && !better(m, best_[t])) {
        nodes_.pop_back();
        continue;
      }
      best_[t] = m;
      open.push(m);
    }
  }
  return result;
}

}  // namespace

SolveResult solve(const GroundTask& task, const SearchOptions& options) {
  Search search(task, options);
  return search.run();
}

PlanReport validate_plan(const GroundTask& task, const Plan& plan) {
  PlanReport report;
  State s = task.init;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (plan.steps[i] >= task.actions.size()) {
      report.failed_step = i + 1;
      report.reason = "step " + std::to_string(i + 1) + " references no ground action";
      return report;
    }
    const GroundAction& a = task.actions[plan.steps[i]];
    for (auto p : a.pre_pos) {
      if (!s.test(p)) report.unmet.push_back(task.atoms[p]);
    }
    for (auto p : a.pre_neg) {
      if (s.test(p)) report.unmet.push_back("(not " + task.atoms[p] + ")");
    }
    if (!report.unmet.empty()) {
      report.failed_step = i + 1;
      report.reason = a.label() + " is not applicable";
      return report;
    }
    s = task.apply(s, a);
    report.total_cost += a.cost;
  }
  for (auto g : task.goal_pos) {
    if (!s.test(g)) report.unmet.push_back(task.atoms[g]);
  }
  for (auto g : task.goal_neg) {
    if (s.test(g)) report.unmet.push_back("(not " + task.atoms[g] + ")");
  }
  if (!report.unmet.empty()) {
    report.failed_step = plan.steps.size() + 1;
    report.reason = "goal not satisfied";
    return report;
  }
  if (plan.total_cost != report.total_cost) {
    report.failed_step = plan.steps.size() + 1;
    report.reason = "plan claims cost " + format_number(plan.total_cost) + " but steps sum to " +
                    format_number(report.total_cost);
    return report;
  }
  report.accepted = true;
  return report;
}

}  // namespace mbplan::planner
