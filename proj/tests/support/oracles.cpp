#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <regex>

namespace mbplan::testing {

bool domain_name_oracle(const std::string& s) {
  static const std::regex re("^[a-zA-Z][a-zA-Z0-9_]*$");
  return std::regex_match(s, re);
}

std::set<std::pair<std::string, std::string>> duplicate_type_oracle(const model::ModelGraph& m) {
  auto is = [&](const std::string& id, model::Stereotype st) {
    for (const auto& a : m.applications()) {
      if (a.element.value == id) return a.stereotype == st;
    }
    return false;
  };
  auto owner_domain = [&](const model::Element& e) -> std::optional<std::string> {
    std::optional<model::ElementId> cur = e.owner;
    while (cur) {
      const model::Element* o = nullptr;
      for (const auto& x : m.elements()) {
        if (x.id == *cur) o = &x;
      }
      if (o == nullptr) return std::nullopt;
      if (o->kind == model::ElementKind::Package && is(o->id.value, model::Stereotype::Domain)) {
        return o->id.value;
      }
      cur = o->owner;
    }
    return std::nullopt;
  };
  auto fold = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };

  std::vector<std::pair<std::string, std::string>> types;  // (domain, lowered name)
  for (const auto& e : m.elements()) {
    if (e.kind != model::ElementKind::Class || !is(e.id.value, model::Stereotype::Type)) continue;
    if (auto d = owner_domain(e)) types.emplace_back(*d, fold(e.name));
  }
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (std::size_t j = i + 1; j < types.size(); ++j) {
      if (types[i] == types[j]) out.insert(types[i]);
    }
  }
  return out;
}

namespace {

using Bits = std::vector<bool>;

bool holds(const Bits& s, const planner::GroundAction& a) {
  return std::all_of(a.pre_pos.begin(), a.pre_pos.end(), [&](auto p) { return s[p]; }) &&
         std::none_of(a.pre_neg.begin(), a.pre_neg.end(), [&](auto p) { return s[p]; });
}

Bits successor(Bits s, const planner::GroundAction& a) {
  for (auto d : a.del) s[d] = false;
  for (auto d : a.add) s[d] = true;
  return s;
}

bool goal(const planner::GroundTask& t, const Bits& s) {
  return std::all_of(t.goal_pos.begin(), t.goal_pos.end(), [&](auto p) { return s[p]; }) &&
         std::none_of(t.goal_neg.begin(), t.goal_neg.end(), [&](auto p) { return s[p]; });
}

Bits initial(const planner::GroundTask& t) {
  Bits s(t.atoms.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = t.init.test(static_cast<planner::AtomId>(i));
  return s;
}

struct Edge {
  std::size_t from, to;
  double cost;
};

std::vector<double> bellman_ford(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  dist[0] = 0;
  for (std::size_t round = 0; round + 1 < n; ++round) {
    bool changed = false;
    for (const auto& e : edges) {
      if (dist[e.from] + e.cost < dist[e.to]) {
        dist[e.to] = dist[e.from] + e.cost;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

}  // namespace

Exhaustive exhaustive_search(const planner::GroundTask& task, std::size_t state_limit) {
  Exhaustive out;
  std::map<Bits, std::size_t> index;
  std::vector<Bits> states;
  std::vector<Edge> edges;
  std::deque<std::size_t> queue;
  index.emplace(initial(task), 0);
  states.push_back(initial(task));
  queue.push_back(0);
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (const auto& a : task.actions) {
      if (!holds(states[i], a)) continue;
      Bits next = successor(states[i], a);
      auto [it, inserted] = index.emplace(next, states.size());
      if (inserted) {
        if (states.size() >= state_limit) {
          out.complete = false;
          out.reachable_states = states.size();
          return out;
        }
        states.push_back(std::move(next));
        queue.push_back(it->second);
      }
      edges.push_back({i, it->second, a.cost});
    }
  }
  out.reachable_states = states.size();
  auto dist = bellman_ford(states.size(), edges);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (goal(task, states[i]) && (!out.optimal_cost || dist[i] < *out.optimal_cost)) out.optimal_cost = dist[i];
  }
  return out;
}

std::array<std::optional<double>, 3> cost_by_count(
    const planner::GroundTask& task, const std::function<bool(const planner::GroundAction&)>& counted) {
  using Node = std::pair<Bits, int>;
  std::map<Node, std::size_t> index;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::deque<std::size_t> queue;
  index.emplace(Node{initial(task), 0}, 0);
  nodes.push_back({initial(task), 0});
  queue.push_back(0);
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (const auto& a : task.actions) {
      if (!holds(nodes[i].first, a)) continue;
      Node next{successor(nodes[i].first, a), std::min(nodes[i].second + (counted(a) ? 1 : 0), 2)};
      auto [it, inserted] = index.emplace(next, nodes.size());
      if (inserted) {
        nodes.push_back(next);
        queue.push_back(it->second);
      }
      edges.push_back({i, it->second, a.cost});
    }
  }
  auto dist = bellman_ford(nodes.size(), edges);
  std::array<std::optional<double>, 3> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!goal(task, nodes[i].first) || std::isinf(dist[i])) continue;
    auto& slot = out[nodes[i].second];
    if (!slot || dist[i] < *slot) slot = dist[i];
  }
  return out;
}

}  // namespace mbplan::testing
