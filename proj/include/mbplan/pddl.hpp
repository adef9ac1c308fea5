#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mbplan/diagnostic.hpp"

namespace mbplan::pddl {

inline constexpr std::string_view kObjectType = "object";
inline constexpr std::string_view kTotalCost = "total-cost";

enum class Requirement { Typing, NegativePreconditions, ActionCosts };
using Requirements = std::set<Requirement>;
std::string_view to_string(Requirement r);  // ":typing", ...

/// One `name - type` entry. Variables keep their leading '?'.
struct TypedEntry {
  std::string name;
  std::string type{kObjectType};
  friend bool operator==(const TypedEntry&, const TypedEntry&) = default;
};
using TypedList = std::vector<TypedEntry>;

struct PredicateDecl {
  std::string name;
  TypedList params;
  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct FunctionDecl {
  std::string name;
  TypedList params;
  friend bool operator==(const FunctionDecl&, const FunctionDecl&) = default;
};

/// `(name term...)`; terms are variables in domains and objects in problems.
/// Function terms share the shape.
struct Atom {
  std::string name;
  std::vector<std::string> terms;
  friend bool operator==(const Atom&, const Atom&) = default;
};
using FunctionTerm = Atom;

struct Condition {
  enum class Kind { Atom, And, Not };
  Kind kind = Kind::And;
  Atom atom;                        // Atom, Not
  std::vector<Condition> children;  // And

  static Condition make_atom(Atom a) { return {Kind::Atom, std::move(a), {}}; }
  static Condition make_not(Atom a) { return {Kind::Not, std::move(a), {}}; }
  static Condition make_and(std::vector<Condition> cs) { return {Kind::And, {}, std::move(cs)}; }

  friend bool operator==(const Condition&, const Condition&) = default;
};

/// Either a function term or a literal.
struct NumericExpr {
  std::optional<FunctionTerm> term;
  double number = 0;
  friend bool operator==(const NumericExpr&, const NumericExpr&) = default;
};

struct Effect {
  enum class Kind { Add, Delete, Increase, And };
  Kind kind = Kind::And;
  Atom atom;               // Add, Delete
  FunctionTerm target;     // Increase
  NumericExpr value;       // Increase
  std::vector<Effect> children;  // And

  static Effect make_add(Atom a) { return {Kind::Add, std::move(a), {}, {}, {}}; }
  static Effect make_delete(Atom a) { return {Kind::Delete, std::move(a), {}, {}, {}}; }
  static Effect make_increase(FunctionTerm t, NumericExpr v) {
    return {Kind::Increase, {}, std::move(t), std::move(v), {}};
  }
  static Effect make_and(std::vector<Effect> es) { return {Kind::And, {}, {}, {}, std::move(es)}; }

  friend bool operator==(const Effect&, const Effect&) = default;
};

struct ActionDef {
  std::string name;
  TypedList params;
  std::optional<Condition> precondition;
  std::optional<Effect> effect;
  friend bool operator==(const ActionDef&, const ActionDef&) = default;
};

struct PddlDomain {
  std::string name;
  Requirements requirements;
  TypedList types;  // entry.type is the parent type
  std::vector<PredicateDecl> predicates;
  std::vector<FunctionDecl> functions;
  std::vector<ActionDef> actions;
  friend bool operator==(const PddlDomain&, const PddlDomain&) = default;
};

struct FunctionAssignment {
  FunctionTerm term;
  double value = 0;
  friend bool operator==(const FunctionAssignment&, const FunctionAssignment&) = default;
};

/// Only `minimize` is supported.
struct Metric {
  FunctionTerm term;
  friend bool operator==(const Metric&, const Metric&) = default;
};

struct PddlProblem {
  std::string name;
  std::string domain_name;
  TypedList objects;
  std::vector<Atom> init_atoms;
  std::vector<FunctionAssignment> init_values;
  Condition goal = Condition::make_and({});
  std::optional<Metric> metric;
  friend bool operator==(const PddlProblem&, const PddlProblem&) = default;
};

// Printing -----------------------------------------------------------------

std::string print_domain(const PddlDomain& d);
std::string print_problem(const PddlProblem& p);
std::string print_atom(const Atom& a);

// Parsing ------------------------------------------------------------------

struct ParseOptions {
  /// When false only lexical and syntactic checks run.
  bool semantic = true;
};

/// Diagnostics use rules `pddl.lexical`, `pddl.syntax` and `pddl.semantic`.
Result<PddlDomain> parse_domain(std::string_view text, ParseOptions options = {});
/// With a domain, goal/init/object references are resolved against it.
Result<PddlProblem> parse_problem(std::string_view text, const PddlDomain* domain = nullptr,
                                  ParseOptions options = {});

/// Whether the text's first form is `(define (domain ...` or `(define (problem ...`.
enum class FileKind { Domain, Problem, Unknown };
FileKind sniff_kind(std::string_view text);

/// Lexer output as plain strings, for whitespace-insensitive comparisons.
/// Returns an empty vector on lexical errors.
std::vector<std::string> tokens(std::string_view text);

// Semantics ----------------------------------------------------------------

Diagnostics check_domain(const PddlDomain& d);
Diagnostics check_problem(const PddlDomain& d, const PddlProblem& p);

/// Minimal flag set the domain needs.
Requirements infer_requirements(const PddlDomain& d);

/// Type hierarchy view used by checking and grounding.
class TypeTable {
 public:
  explicit TypeTable(const PddlDomain& d);
  bool known(std::string_view type) const;
  /// `sub` equals `super` or descends from it (case-insensitive).
  bool is_subtype(std::string_view sub, std::string_view super) const;

 private:
  std::vector<std::pair<std::string, std::string>> parent_;  // lowered (type, parent)
  const std::string* parent_of(std::string_view lowered) const;
};

}  // namespace mbplan::pddl
