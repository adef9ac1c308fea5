#include <sstream>

#include "mbplan/names.hpp"
#include "mbplan/pddl.hpp"

namespace mbplan::pddl {
namespace {

constexpr int kIndent = 4;

std::string pad(int level) { return std::string(static_cast<std::size_t>(level * kIndent), ' '); }

struct Group {
  std::vector<std::string> names;
  std::string type;
};

/// Consecutive entries sharing a type form a group when `merge` is set.
std::vector<Group> groups(const TypedList& list, bool merge) {
  std::vector<Group> out;
  for (const auto& e : list) {
    if (merge && !out.empty() && out.back().type == e.type) {
      out.back().names.push_back(e.name);
    } else {
      out.push_back({{e.name}, e.type});
    }
  }
  return out;
}

/// `- object` is implied only for a trailing group.
std::string group_text(const Group& g, bool last) {
  std::string s;
  for (std::size_t i = 0; i < g.names.size(); ++i) {
    if (i > 0) s += ' ';
    s += g.names[i];
  }
  if (!(last && g.type == kObjectType)) s += " - " + g.type;
  return s;
}

std::string typed_inline(const TypedList& list) {
  auto gs = groups(list, false);
  std::string s;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (i > 0) s += ' ';
    s += group_text(gs[i], i + 1 == gs.size());
  }
  return s;
}

void typed_block(std::ostream& os, const TypedList& list, int level) {
  auto gs = groups(list, true);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    os << pad(level) << group_text(gs[i], i + 1 == gs.size()) << '\n';
  }
}

std::string decl_text(const std::string& name, const TypedList& params) {
  return params.empty() ? "(" + name + ")" : "(" + name + " " + typed_inline(params) + ")";
}

std::string numeric_text(const NumericExpr& v) {
  return v.term ? print_atom(*v.term) : format_number(v.number);
}

bool inline_condition(const Condition& c) {
  return c.kind != Condition::Kind::And || c.children.empty();
}

std::string condition_inline(const Condition& c) {
  switch (c.kind) {
    case Condition::Kind::Atom: return print_atom(c.atom);
    case Condition::Kind::Not: return "(not " + print_atom(c.atom) + ")";
    case Condition::Kind::And: return "(and)";
  }
  return {};
}

void condition_block(std::ostream& os, const Condition& c, int level) {
  if (inline_condition(c)) {
    os << pad(level) << condition_inline(c) << '\n';
    return;
  }
  os << pad(level) << "(and\n";
  for (const auto& ch : c.children) condition_block(os, ch, level + 1);
  os << pad(level) << ")\n";
}

bool inline_effect(const Effect& e) { return e.kind != Effect::Kind::And || e.children.empty(); }

std::string effect_inline(const Effect& e) {
  switch (e.kind) {
    case Effect::Kind::Add: return print_atom(e.atom);
    case Effect::Kind::Delete: return "(not " + print_atom(e.atom) + ")";
    case Effect::Kind::Increase:
      return "(increase " + print_atom(e.target) + " " + numeric_text(e.value) + ")";
    case Effect::Kind::And: return "(and)";
  }
  return {};
}

void effect_block(std::ostream& os, const Effect& e, int level) {
  if (inline_effect(e)) {
    os << pad(level) << effect_inline(e) << '\n';
    return;
  }
  os << pad(level) << "(and\n";
  for (const auto& ch : e.children) effect_block(os, ch, level + 1);
  os << pad(level) << ")\n";
}

void print_action(std::ostream& os, const ActionDef& a) {
  os << pad(1) << "(:action " << a.name << '\n';
  os << pad(2) << ":parameters (" << typed_inline(a.params) << ")\n";
  if (a.precondition) {
    if (inline_condition(*a.precondition)) {
      os << pad(2) << ":precondition " << condition_inline(*a.precondition) << '\n';
    } else {
      os << pad(2) << ":precondition\n";
      condition_block(os, *a.precondition, 3);
    }
  }
  if (a.effect) {
    if (inline_effect(*a.effect)) {
      os << pad(2) << ":effect " << effect_inline(*a.effect) << '\n';
    } else {
      os << pad(2) << ":effect\n";
      effect_block(os, *a.effect, 3);
    }
  }
  os << pad(1) << ")\n";
}

}  // namespace

std::string print_atom(const Atom& a) {
  std::string s = "(" + a.name;
  for (const auto& t : a.terms) s += " " + t;
  return s + ")";
}

std::string print_domain(const PddlDomain& d) {
  const bool empty = d.requirements.empty() && d.types.empty() && d.predicates.empty() &&
                     d.functions.empty() && d.actions.empty();
  if (empty) return "(define (domain " + d.name + "))\n";

  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << pad(1) << "(:requirements";
    for (auto r : d.requirements) os << ' ' << to_string(r);
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << pad(1) << "(:types\n";
    typed_block(os, d.types, 2);
    os << pad(1) << ")\n";
  }
  if (!d.predicates.empty()) {
    os << pad(1) << "(:predicates\n";
    for (const auto& p : d.predicates) os << pad(2) << decl_text(p.name, p.params) << '\n';
    os << pad(1) << ")\n";
  }
  if (!d.functions.empty()) {
    os << pad(1) << "(:functions\n";
    for (const auto& f : d.functions) os << pad(2) << decl_text(f.name, f.params) << '\n';
    os << pad(1) << ")\n";
  }
  for (const auto& a : d.actions) print_action(os, a);
  os << ")\n";
  return os.str();
}

std::string print_problem(const PddlProblem& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n";
  os << pad(1) << "(:domain " << p.domain_name << ")\n";
  if (p.objects.empty()) {
    os << pad(1) << "(:objects)\n";
  } else {
    os << pad(1) << "(:objects\n";
    typed_block(os, p.objects, 2);
    os << pad(1) << ")\n";
  }
  if (p.init_atoms.empty() && p.init_values.empty()) {
    os << pad(1) << "(:init)\n";
  } else {
    os << pad(1) << "(:init\n";
    for (const auto& a : p.init_atoms) os << pad(2) << print_atom(a) << '\n';
    for (const auto& v : p.init_values) {
      os << pad(2) << "(= " << print_atom(v.term) << ' ' << format_number(v.value) << ")\n";
    }
    os << pad(1) << ")\n";
  }
  if (inline_condition(p.goal)) {
    os << pad(1) << "(:goal " << condition_inline(p.goal) << ")\n";
  } else {
    os << pad(1) << "(:goal\n";
    condition_block(os, p.goal, 2);
    os << pad(1) << ")\n";
  }
  if (p.metric) os << pad(1) << "(:metric minimize " << print_atom(p.metric->term) << ")\n";
  os << ")\n";
  return os.str();
}

}  // namespace mbplan::pddl
