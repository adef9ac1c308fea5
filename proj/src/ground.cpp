#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

#include "mbplan/names.hpp"
#include "mbplan/planner.hpp"


namespace mbplan::planner {

using pddl::Condition;
using pddl::Effect;

namespace {

// (symbol, object...) as indices
using Key = std::vector<std::uint32_t>;

constexpr std::uint64_t kMaxBindings = 5'000'000;

struct Slot {
  std::uint32_t symbol = 0;
  std::vector<std::uint32_t> params;  // parameter positions
};

struct CostTerm {
  std::optional<Slot> function;
  double number = 0;
};

struct Schema {
  const pddl::ActionDef* def = nullptr;
  std::vector<std::vector<std::uint32_t>> domains;  // candidate objects per parameter
  std::vector<Slot> pre_pos, pre_neg, add, del;
  std::vector<CostTerm> cost;
};

struct Proto {
  std::vector<Key> pre_pos, pre_neg, add, del;
  double cost = 0;
  bool pruned = false;
  std::string error;  // rule|message
};

class Grounder {
 public:
  Grounder(const pddl::PddlDomain& d, const pddl::PddlProblem& p) : domain_(d), problem_(p), types_(d) {}

  bool prepare();
  void enumerate_parallel();
  void enumerate_serial();
  Result<GroundTask> finish();

 private:
  void error(const std::string& rule, const std::string& message) {
    diags_.push_back({"ground." + rule, Severity::Error, "", "<problem>", message});
  }
  std::optional<Key> ground_atom(const pddl::Atom& a, bool function, const std::string& where);
  std::optional<Slot> slot(const pddl::Atom& a, const pddl::ActionDef& act, bool function);
  bool flatten_condition(const Condition& c, Schema& s);
  bool flatten_effect(const Effect& e, Schema& s);
  Proto instantiate(const Schema& s, const std::vector<std::uint32_t>& binding) const;
  static Key bind(const Slot& sl, const std::vector<std::uint32_t>& binding) {
    Key k{sl.symbol};
    for (auto p : sl.params) k.push_back(binding[p]);
    return k;
  }
  std::string label(const Key& k, bool function) const {
    std::string out = "(" + (function ? domain_.functions[k[0]].name : domain_.predicates[k[0]].name);
    for (std::size_t i = 1; i < k.size(); ++i) out += " " + problem_.objects[k[i]].name;
    return out + ")";
  }

  const pddl::PddlDomain& domain_;
  const pddl::PddlProblem& problem_;
  pddl::TypeTable types_;
  Diagnostics diags_;

  std::unordered_map<std::string, std::uint32_t> objects_, predicates_, functions_;
  std::vector<bool> static_;
  std::set<Key> init_;
  std::map<Key, double> values_;
  std::vector<Key> goal_pos_, goal_neg_;
  std::vector<Schema> schemas_;
  std::vector<std::vector<Proto>> protos_;  // per schema, in binding order
};

std::optional<Key> Grounder::ground_atom(const pddl::Atom& a, bool function, const std::string& where) {
  const auto& table = function ? functions_ : predicates_;
  auto it = table.find(lower(a.name));
  if (it == table.end()) {
    error("unknown-symbol", where + ": undeclared " + (function ? "function" : "predicate") + " '" +
                                a.name + "'");
    return std::nullopt;
  }
  const pddl::TypedList& params =
      function ? domain_.functions[it->second].params : domain_.predicates[it->second].params;
  if (params.size() != a.terms.size()) {
    error("type-mismatch", where + ": " + pddl::print_atom(a) + " expects " +
                               std::to_string(params.size()) + " arguments");
    return std::nullopt;
  }
  Key k{it->second};
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    auto o = objects_.find(lower(a.terms[i]));
    if (o == objects_.end()) {
      error("unknown-object", where + ": unknown object '" + a.terms[i] + "'");
      return std::nullopt;
    }
    if (!types_.is_subtype(problem_.objects[o->second].type, params[i].type)) {
      error("type-mismatch", where + ": object '" + a.terms[i] + "' is not a " + params[i].type);
      return std::nullopt;
    }
    k.push_back(o->second);
  }
  return k;
}

std::optional<Slot> Grounder::slot(const pddl::Atom& a, const pddl::ActionDef& act, bool function) {
  const auto& table = function ? functions_ : predicates_;
  auto it = table.find(lower(a.name));
  if (it == table.end()) {
    error("unknown-symbol", act.name + ": undeclared symbol '" + a.name + "'");
    return std::nullopt;
  }
  Slot s{it->second, {}};
  for (const auto& t : a.terms) {
    auto p = std::find_if(act.params.begin(), act.params.end(),
                          [&](const pddl::TypedEntry& e) { return iequals(e.name, t); });
    if (p == act.params.end()) {
      error("unbound", act.name + ": term '" + t + "' is not a parameter");
      return std::nullopt;
    }
    s.params.push_back(static_cast<std::uint32_t>(p - act.params.begin()));
  }
  return s;
}

bool Grounder::flatten_condition(const Condition& c, Schema& s) {
  switch (c.kind) {
    case Condition::Kind::And:
      for (const auto& ch : c.children) {
        if (!flatten_condition(ch, s)) return false;
      }
      return true;
    case Condition::Kind::Atom:
    case Condition::Kind::Not: {
      auto sl = slot(c.atom, *s.def, false);
      if (!sl) return false;
      (c.kind == Condition::Kind::Atom ? s.pre_pos : s.pre_neg).push_back(std::move(*sl));
      return true;
    }
  }
  return false;
}

bool Grounder::flatten_effect(const Effect& e, Schema& s) {
  switch (e.kind) {
    case Effect::Kind::And:
      for (const auto& ch : e.children) {
        if (!flatten_effect(ch, s)) return false;
      }
      return true;
    case Effect::Kind::Add:
    case Effect::Kind::Delete: {
      auto sl = slot(e.atom, *s.def, false);
      if (!sl) return false;
      (e.kind == Effect::Kind::Add ? s.add : s.del).push_back(std::move(*sl));
      return true;
    }
    case Effect::Kind::Increase: {
      if (!iequals(e.target.name, pddl::kTotalCost) || !e.target.terms.empty()) {
        error("unsupported", s.def->name + ": increase must target (total-cost)");
        return false;
      }
      CostTerm term;
      term.number = e.value.number;
      if (e.value.term) {
        auto sl = slot(*e.value.term, *s.def, true);
        if (!sl) return false;
        term.function = std::move(*sl);
      }
      s.cost.push_back(std::move(term));
      return true;
    }
  }
  return false;
}

bool Grounder::prepare() {
  for (std::size_t i = 0; i < domain_.predicates.size(); ++i) {
    predicates_.emplace(lower(domain_.predicates[i].name), static_cast<std::uint32_t>(i));
  }
  for (std::size_t i = 0; i < domain_.functions.size(); ++i) {
    functions_.emplace(lower(domain_.functions[i].name), static_cast<std::uint32_t>(i));
  }
  for (std::size_t i = 0; i < problem_.objects.size(); ++i) {
    const auto& o = problem_.objects[i];
    if (!types_.known(o.type)) {
      error("type-mismatch", "object '" + o.name + "' has unknown type '" + o.type + "'");
    }
    if (!objects_.emplace(lower(o.name), static_cast<std::uint32_t>(i)).second) {
      error("type-mismatch", "object '" + o.name + "' is declared twice");
    }
  }
  if (!diags_.empty()) return false;

  for (const auto& a : problem_.init_atoms) {
    if (auto k = ground_atom(a, false, "init")) init_.insert(std::move(*k));
  }
  for (const auto& v : problem_.init_values) {
    if (iequals(v.term.name, pddl::kTotalCost)) continue;
    if (auto k = ground_atom(v.term, true, "init")) values_[std::move(*k)] = v.value;
  }
  auto goal_literal = [&](const Condition& c) {
    if (c.kind == Condition::Kind::And) return;
    if (auto k = ground_atom(c.atom, false, "goal")) {
      (c.kind == Condition::Kind::Atom ? goal_pos_ : goal_neg_).push_back(std::move(*k));
    }
  };
  goal_literal(problem_.goal);
  for (const auto& c : problem_.goal.children) goal_literal(c);

  static_.assign(domain_.predicates.size(), true);
  std::map<std::string, std::vector<std::uint32_t>> by_type;
  for (const auto& act : domain_.actions) {
    Schema s;
    s.def = &act;
    for (const auto& p : act.params) {
      auto& dom = by_type[lower(p.type)];
      if (dom.empty()) {
        for (std::size_t i = 0; i < problem_.objects.size(); ++i) {
          if (types_.is_subtype(problem_.objects[i].type, p.type)) dom.push_back(static_cast<std::uint32_t>(i));
        }
      }
      s.domains.push_back(dom);
    }
    bool ok = (!act.precondition || flatten_condition(*act.precondition, s)) &&
              (!act.effect || flatten_effect(*act.effect, s));
    if (!ok) continue;
    for (const auto& sl : s.add) static_[sl.symbol] = false;
    for (const auto& sl : s.del) static_[sl.symbol] = false;

    std::uint64_t total = 1;
    for (const auto& d : s.domains) {
      total *= d.size();
      if (total > kMaxBindings) {
        error("too-large", act.name + ": more than " + std::to_string(kMaxBindings) + " bindings");
        break;
      }
    }
    schemas_.push_back(std::move(s));
  }
  return diags_.empty();
}

Proto Grounder::instantiate(const Schema& s, const std::vector<std::uint32_t>& binding) const {
  Proto p;
  for (const auto& c : s.cost) {
    double v = c.number;
    if (c.function) {
      Key k = bind(*c.function, binding);
      auto it = values_.find(k);
      if (it == values_.end()) {
        p.error = "missing-function-value|" + s.def->name + ": no init value for " + label(k, true);
        return p;
      }
      v = it->second;
    }
    if (!std::isfinite(v) || v < 0) {
      p.error = "negative-cost|" + s.def->name + ": cost " + format_number(v) +
                " is negative or not finite";
      return p;
    }
    p.cost += v;
  }
  for (const auto& sl : s.pre_pos) {
    Key k = bind(sl, binding);
    if (static_[sl.symbol] && !init_.count(k)) p.pruned = true;
    p.pre_pos.push_back(std::move(k));
  }
  for (const auto& sl : s.pre_neg) {
    Key k = bind(sl, binding);
    if (static_[sl.symbol] && init_.count(k)) p.pruned = true;
    p.pre_neg.push_back(std::move(k));
  }
  if (p.pruned) return p;
  for (const auto& sl : s.add) p.add.push_back(bind(sl, binding));
  for (const auto& sl : s.del) p.del.push_back(bind(sl, binding));
  return p;
}

void Grounder::enumerate_parallel() {
  protos_.clear();
  for (const auto& s : schemas_) {
    std::uint64_t total = 1;
    for (const auto& d : s.domains) total *= d.size();
    std::vector<Proto> out(total);
    const auto n = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      // mixed radix decode, first parameter most significant
      std::vector<std::uint32_t> binding(s.domains.size());
      auto rest = static_cast<std::uint64_t>(k);
      for (std::size_t i = s.domains.size(); i-- > 0;) {
        binding[i] = s.domains[i][rest % s.domains[i].size()];
        rest /= s.domains[i].size();
      }
      out[k] = instantiate(s, binding);
    }
    protos_.push_back(std::move(out));
  }
}

void Grounder::enumerate_serial() {
  protos_.clear();
  for (const auto& s : schemas_) {
    std::vector<Proto> out;
    std::vector<std::uint32_t> binding;
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == s.domains.size()) {
        out.push_back(instantiate(s, binding));
        return;
      }
      for (auto o : s.domains[i]) {
        binding.push_back(o);
        self(self, i + 1);
        binding.pop_back();
      }
    };
    rec(rec, 0);
    protos_.push_back(std::move(out));
  }
}

Result<GroundTask> Grounder::finish() {
  std::set<std::string> seen;
  for (const auto& ps : protos_) {
    for (const auto& p : ps) {
      if (p.error.empty() || !seen.insert(p.error).second) continue;
      auto bar = p.error.find('|');
      error(p.error.substr(0, bar), p.error.substr(bar + 1));
    }
  }
  if (!diags_.empty()) return diags_;

  GroundTask task;
  std::map<Key, AtomId> ids;
  auto intern = [&](const Key& k) {
    auto [it, inserted] = ids.emplace(k, static_cast<AtomId>(task.atoms.size()));
    if (inserted) task.atoms.push_back(label(k, false));
    return it->second;
  };
  auto intern_all = [&](const std::vector<Key>& ks) {
    std::vector<AtomId> out;
    for (const auto& k : ks) out.push_back(intern(k));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  std::vector<AtomId> init_ids;
  for (const auto& a : problem_.init_atoms) {
    // already validated in prepare()
    Key k{predicates_.at(lower(a.name))};
    for (const auto& t : a.terms) k.push_back(objects_.at(lower(t)));
    init_ids.push_back(intern(k));
  }
  task.goal_pos = intern_all(goal_pos_);
  task.goal_neg = intern_all(goal_neg_);

  for (std::size_t si = 0; si < schemas_.size(); ++si) {
    const Schema& s = schemas_[si];
    std::uint64_t k = 0;
    for (const auto& p : protos_[si]) {
      std::uint64_t index = k++;
      if (p.pruned) continue;
      GroundAction a;
      a.schema = s.def->name;
      for (std::size_t i = s.domains.size(); i-- > 0;) {
        a.args.push_back(problem_.objects[s.domains[i][index % s.domains[i].size()]].name);
        index /= s.domains[i].size();
      }
      std::reverse(a.args.begin(), a.args.end());
      a.pre_pos = intern_all(p.pre_pos);
      a.pre_neg = intern_all(p.pre_neg);
      a.add = intern_all(p.add);
      std::vector<AtomId> del = intern_all(p.del);
      for (auto d : del) {
        if (!std::binary_search(a.add.begin(), a.add.end(), d)) a.del.push_back(d);
      }
      a.cost = p.cost;
      task.actions.push_back(std::move(a));
    }
  }

  task.init = State(task.atoms.size());
  for (auto id : init_ids) task.init.set(id);
  return task;
}

}  // namespace

Result<GroundTask> ground(const pddl::PddlDomain& domain, const pddl::PddlProblem& problem) {
  Grounder g(domain, problem);
  if (!g.prepare()) return g.finish();
  g.enumerate_parallel();
  return g.finish();
}

Result<GroundTask> ground_serial(const pddl::PddlDomain& domain, const pddl::PddlProblem& problem) {
  Grounder g(domain, problem);
  if (!g.prepare()) return g.finish();
  g.enumerate_serial();
  return g.finish();
}

}  // namespace mbplan::planner
