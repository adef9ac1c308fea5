#include <cmath>
#include <map>
#include <set>

#include "mbplan/names.hpp"
#include "mbplan/pddl.hpp"

namespace mbplan::pddl {

TypeTable::TypeTable(const PddlDomain& d) {
  for (const auto& t : d.types) parent_.emplace_back(lower(t.name), lower(t.type));
}

const std::string* TypeTable::parent_of(std::string_view lowered) const {
  for (const auto& [t, p] : parent_) {
    if (t == lowered) return &p;
  }
  return nullptr;
}

bool TypeTable::known(std::string_view type) const {
  return iequals(type, kObjectType) || parent_of(lower(type)) != nullptr;
}

bool TypeTable::is_subtype(std::string_view sub, std::string_view super) const {
  const std::string target = lower(super);
  if (target == kObjectType) return true;
  std::string cur = lower(sub);
  for (std::size_t steps = 0; steps <= parent_.size(); ++steps) {
    if (cur == target) return true;
    const std::string* p = parent_of(cur);
    if (p == nullptr) return false;
    cur = *p;
  }
  return false;  // cyclic hierarchy
}

namespace {

Diagnostic semantic(std::string message, std::string element = {}) {
  Diagnostic d;
  d.rule = "pddl.semantic";
  d.element = element;
  d.path = std::move(element);
  d.message = std::move(message);
  return d;
}

template <typename Decl>
const Decl* find_decl(const std::vector<Decl>& decls, std::string_view name) {
  for (const auto& d : decls) {
    if (iequals(d.name, name)) return &d;
  }
  return nullptr;
}

const TypedEntry* find_entry(const TypedList& list, std::string_view name) {
  for (const auto& e : list) {
    if (iequals(e.name, name)) return &e;
  }
  return nullptr;
}

void check_params(const TypedList& params, const TypeTable& types, const std::string& where,
                  Diagnostics& out) {
  std::set<std::string> seen;
  for (const auto& p : params) {
    if (!is_pddl_variable(p.name)) out.push_back(semantic("'" + p.name + "' is not a variable", where));
    if (!seen.insert(lower(p.name)).second) {
      out.push_back(semantic("duplicate parameter '" + p.name + "'", where));
    }
    if (!types.known(p.type)) out.push_back(semantic("unknown type '" + p.type + "'", where));
  }
}

class ActionChecker {
 public:
  ActionChecker(const PddlDomain& d, const TypeTable& types, const ActionDef& a, Diagnostics& out)
      : d_(d), types_(types), a_(a), out_(out) {}

  void atom(const Atom& at, bool is_function) {
    const TypedList* sig = nullptr;
    if (is_function) {
      const auto* f = find_decl(d_.functions, at.name);
      if (f == nullptr) return error("undeclared function '" + at.name + "'");
      sig = &f->params;
    } else {
      const auto* p = find_decl(d_.predicates, at.name);
      if (p == nullptr) return error("undeclared predicate '" + at.name + "'");
      sig = &p->params;
    }
    if (sig->size() != at.terms.size()) {
      return error(print_atom(at) + " has " + std::to_string(at.terms.size()) + " arguments, expected " +
                   std::to_string(sig->size()));
    }
    for (std::size_t i = 0; i < at.terms.size(); ++i) {
      const std::string& t = at.terms[i];
      if (t.empty() || t[0] != '?') {
        error("constant '" + t + "' in " + print_atom(at) + " (domains have no constants)");
        continue;
      }
      const TypedEntry* bound = find_entry(a_.params, t);
      if (bound == nullptr) {
        error("variable '" + t + "' in " + print_atom(at) + " is not a parameter");
        continue;
      }
      if (!types_.is_subtype(bound->type, (*sig)[i].type)) {
        error("argument '" + t + "' of type " + bound->type + " does not fit " + (*sig)[i].type + " in " +
              print_atom(at));
      }
    }
  }

  void condition(const Condition& c) {
    if (c.kind == Condition::Kind::And) {
      for (const auto& ch : c.children) condition(ch);
    } else {
      atom(c.atom, false);
    }
  }

  void effect(const Effect& e) {
    switch (e.kind) {
      case Effect::Kind::And:
        for (const auto& ch : e.children) effect(ch);
        break;
      case Effect::Kind::Add:
      case Effect::Kind::Delete: atom(e.atom, false); break;
      case Effect::Kind::Increase:
        if (!iequals(e.target.name, kTotalCost) || !e.target.terms.empty()) {
          error("increase must target (total-cost)");
        } else if (find_decl(d_.functions, kTotalCost) == nullptr) {
          error("total-cost is used but not declared");
        }
        if (e.value.term) {
          atom(*e.value.term, true);
        } else if (!std::isfinite(e.value.number) || e.value.number < 0) {
          error("action costs must be finite and non-negative");
        }
        break;
    }
  }

 private:
  void error(std::string message) { out_.push_back(semantic(std::move(message), a_.name)); }

  const PddlDomain& d_;
  const TypeTable& types_;
  const ActionDef& a_;
  Diagnostics& out_;
};

bool has_not(const Condition& c) {
  if (c.kind == Condition::Kind::Not) return true;
  for (const auto& ch : c.children) {
    if (has_not(ch)) return true;
  }
  return false;
}

bool has_increase(const Effect& e) {
  if (e.kind == Effect::Kind::Increase) return true;
  for (const auto& ch : e.children) {
    if (has_increase(ch)) return true;
  }
  return false;
}

bool typed(const TypedList& l) {
  for (const auto& e : l) {
    if (!iequals(e.type, kObjectType)) return true;
  }
  return false;
}

}  // namespace

Requirements infer_requirements(const PddlDomain& d) {
  Requirements r;
  bool typing = !d.types.empty();
  for (const auto& p : d.predicates) typing = typing || typed(p.params);
  for (const auto& f : d.functions) typing = typing || typed(f.params);
  for (const auto& a : d.actions) {
    typing = typing || typed(a.params);
    if (a.precondition && has_not(*a.precondition)) r.insert(Requirement::NegativePreconditions);
    if (a.effect && has_increase(*a.effect)) r.insert(Requirement::ActionCosts);
  }
  if (typing) r.insert(Requirement::Typing);
  return r;
}

Diagnostics check_domain(const PddlDomain& d) {
  Diagnostics out;
  TypeTable types(d);
  if (!is_pddl_name(d.name)) out.push_back(semantic("'" + d.name + "' is not a valid domain name", d.name));

  std::set<std::string> type_names;
  for (const auto& t : d.types) {
    if (iequals(t.name, kObjectType) || is_reserved_word(t.name)) {
      out.push_back(semantic("'" + t.name + "' cannot be declared as a type", t.name));
    }
    if (!type_names.insert(lower(t.name)).second) {
      out.push_back(semantic("duplicate type '" + t.name + "'", t.name));
    }
    if (!types.known(t.type)) {
      out.push_back(semantic("parent type '" + t.type + "' of '" + t.name + "' is not declared", t.name));
    }
  }
  for (const auto& t : d.types) {
    // A parent chain that never reaches `object` runs around a cycle.
    std::string cur = lower(t.type);
    std::size_t steps = 0;
    while (cur != kObjectType && steps++ <= d.types.size()) {
      const TypedEntry* parent = find_entry(d.types, cur);
      if (parent == nullptr) break;
      cur = lower(parent->type);
    }
    if (cur != kObjectType && steps > d.types.size()) {
      out.push_back(semantic("type '" + t.name + "' is part of a cyclic hierarchy", t.name));
    }
  }

  std::set<std::string> predicate_names;
  for (const auto& p : d.predicates) {
    if (!predicate_names.insert(lower(p.name)).second) {
      out.push_back(semantic("duplicate predicate '" + p.name + "'", p.name));
    }
    if (is_reserved_word(p.name)) out.push_back(semantic("'" + p.name + "' is reserved", p.name));
    check_params(p.params, types, p.name, out);
  }
  std::set<std::string> function_names;
  for (const auto& f : d.functions) {
    if (!function_names.insert(lower(f.name)).second) {
      out.push_back(semantic("duplicate function '" + f.name + "'", f.name));
    }
    if (predicate_names.count(lower(f.name)) != 0) {
      out.push_back(semantic("'" + f.name + "' names both a predicate and a function", f.name));
    }
    if (is_reserved_word(f.name)) out.push_back(semantic("'" + f.name + "' is reserved", f.name));
    if (iequals(f.name, kTotalCost) && !f.params.empty()) {
      out.push_back(semantic("total-cost takes no arguments", f.name));
    }
    check_params(f.params, types, f.name, out);
  }

  std::set<std::string> action_names;
  for (const auto& a : d.actions) {
    if (!action_names.insert(lower(a.name)).second) {
      out.push_back(semantic("duplicate action '" + a.name + "'", a.name));
    }
    if (is_reserved_word(a.name)) out.push_back(semantic("'" + a.name + "' is reserved", a.name));
    check_params(a.params, types, a.name, out);
    ActionChecker checker(d, types, a, out);
    if (a.precondition) checker.condition(*a.precondition);
    if (a.effect) checker.effect(*a.effect);
  }

  for (auto r : infer_requirements(d)) {
    if (d.requirements.count(r) == 0) {
      out.push_back(semantic("domain uses features that need " + std::string(to_string(r)), d.name));
    }
  }
  return out;
}

namespace {

class ProblemChecker {
 public:
  ProblemChecker(const PddlDomain& d, const PddlProblem& p, Diagnostics& out)
      : d_(d), types_(d), out_(out) {
    for (const auto& o : p.objects) objects_.emplace(lower(o.name), o.type);
  }

  void atom(const Atom& at, bool is_function, const char* where) {
    const TypedList* sig = nullptr;
    if (is_function) {
      const auto* f = find_decl(d_.functions, at.name);
      if (f == nullptr) return error(std::string(where) + " uses undeclared function '" + at.name + "'");
      sig = &f->params;
    } else {
      const auto* p = find_decl(d_.predicates, at.name);
      if (p == nullptr) return error(std::string(where) + " uses undeclared predicate '" + at.name + "'");
      sig = &p->params;
    }
    if (sig->size() != at.terms.size()) {
      return error(std::string(where) + " atom " + print_atom(at) + " has wrong arity");
    }
    for (std::size_t i = 0; i < at.terms.size(); ++i) {
      auto it = objects_.find(lower(at.terms[i]));
      if (it == objects_.end()) {
        error(std::string(where) + " atom " + print_atom(at) + " references unknown object '" +
              at.terms[i] + "'");
      } else if (!types_.is_subtype(it->second, (*sig)[i].type)) {
        error(std::string(where) + " atom " + print_atom(at) + ": '" + at.terms[i] + "' is not a " +
              (*sig)[i].type);
      }
    }
  }

  void condition(const Condition& c, const char* where) {
    if (c.kind == Condition::Kind::And) {
      for (const auto& ch : c.children) condition(ch, where);
    } else {
      atom(c.atom, false, where);
    }
  }

  void error(std::string message) { out_.push_back(semantic(std::move(message))); }

  const TypeTable& types() const { return types_; }

 private:
  const PddlDomain& d_;
  TypeTable types_;
  std::map<std::string, std::string> objects_;
  Diagnostics& out_;
};

}  // namespace

Diagnostics check_problem(const PddlDomain& d, const PddlProblem& p) {
  Diagnostics out;
  ProblemChecker checker(d, p, out);
  if (!is_pddl_name(p.name)) checker.error("'" + p.name + "' is not a valid problem name");
  if (!iequals(p.domain_name, d.name)) {
    checker.error("problem is for domain '" + p.domain_name + "', not '" + d.name + "'");
  }
  std::set<std::string> seen;
  for (const auto& o : p.objects) {
    if (!seen.insert(lower(o.name)).second) checker.error("duplicate object '" + o.name + "'");
    if (!is_pddl_name(o.name)) checker.error("'" + o.name + "' is not a valid object name");
    if (!checker.types().known(o.type)) {
      checker.error("object '" + o.name + "' has undeclared type '" + o.type + "'");
    }
  }
  for (const auto& a : p.init_atoms) checker.atom(a, false, "init");
  for (const auto& v : p.init_values) {
    checker.atom(v.term, true, "init");
    if (!std::isfinite(v.value)) checker.error("init value of " + print_atom(v.term) + " is not finite");
  }
  checker.condition(p.goal, "goal");
  if (p.metric) checker.atom(p.metric->term, true, "metric");
  return out;
}

}  // namespace mbplan::pddl
