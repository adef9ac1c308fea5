#include "mbplan/profile.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "mbplan/names.hpp"

namespace mbplan::profile {

using namespace mbplan::model;

const std::vector<RuleInfo>& registered_rules() {
  static const std::vector<RuleInfo> kRules = {
      {"P01", "ValidateDomainName", "domain name defined and matching ^[a-zA-Z][a-zA-Z0-9_]*$"},
      {"P02", "UniqueTypeNames", "type names unique within a domain"},
      {"P03", "UniquePredicateNames", "one declaration per predicate name within a domain"},
      {"P04", "UniqueFunctionNames", "one declaration per function name within a domain"},
      {"P05", "UniqueActionNames", "action names unique within a domain"},
      {"P06", "ActionCompleteness", "actions named, with well-formed and resolvable parameters"},
      {"P07", "PredicateUseConsistency", "flow annotations match declared arity and types"},
      {"P08", "TypeHierarchyAcyclic", "type generalizations acyclic with a single parent"},
      {"P09", "NameSyntax", "PDDL names for types, predicates, functions and actions"},
      {"P10", "DomainPresent", "at least one domain exists when generating"},
  };
  return kRules;
}

bool is_registered(std::string_view id) {
  const auto& rules = registered_rules();
  return std::any_of(rules.begin(), rules.end(), [&](const RuleInfo& r) { return r.id == id; });
}

RuleSet RuleSet::all() {
  RuleSet s;
  for (const auto& r : registered_rules()) s.enabled_.insert(std::string(r.id));
  return s;
}

RuleSet& RuleSet::enable(std::string_view id) {
  enabled_.insert(std::string(id));
  return *this;
}

RuleSet& RuleSet::disable(std::string_view id) {
  enabled_.erase(std::string(id));
  return *this;
}

Result<RuleSet> RuleSet::parse(std::string_view spec) {
  RuleSet s;
  Diagnostics errors;
  bool first = true;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    std::string item(spec.substr(start, end - start));
    start = end + 1;
    if (item.empty()) {
      if (end == spec.size()) break;
      continue;
    }
    if (item == "all") {
      s = all();
    } else if (item[0] == '-') {
      if (first) s = all();
      std::string id = item.substr(1);
      if (!is_registered(id)) {
        errors.push_back({"cli.rules", Severity::Error, "", "--rules", "unknown rule '" + id + "'"});
      }
      s.disable(id);
    } else {
      if (!is_registered(item)) {
        errors.push_back({"cli.rules", Severity::Error, "", "--rules", "unknown rule '" + item + "'"});
      }
      s.enable(item);
    }
    first = false;
  }
  if (!errors.empty()) return errors;
  return s;
}

bool is_subclass(const ModelGraph& model, const ElementId& sub, const ElementId& super) {
  std::vector<ElementId> stack{sub};
  std::set<ElementId> seen;
  while (!stack.empty()) {
    ElementId cur = stack.back();
    stack.pop_back();
    if (cur == super) return true;
    if (!seen.insert(cur).second) continue;
    for (auto& p : model.parents(cur)) stack.push_back(std::move(p));
  }
  return false;
}

namespace {

/// Elements of one Domain package, bucketed by their role.
struct DomainIndex {
  const Element* domain = nullptr;
  std::vector<const Element*> types;
  std::vector<const Element*> predicates;  // flow nodes
  std::vector<const Element*> functions;   // flow nodes
  std::vector<const Element*> actions;
};

struct RuleContext {
  const ModelGraph& model;
  std::vector<DomainIndex> domains;
  Context context;
};

std::vector<DomainIndex> index_domains(const ModelGraph& model) {
  std::vector<DomainIndex> out;
  for (const Element* d : domains(model)) {
    DomainIndex idx;
    idx.domain = d;
    for (const Element* e : elements_in_domain(model, d->id)) {
      const auto* app = model.application(e->id);
      if (app == nullptr) continue;
      switch (app->stereotype) {
        case Stereotype::Type: idx.types.push_back(e); break;
        case Stereotype::Predicate: idx.predicates.push_back(e); break;
        case Stereotype::Function: idx.functions.push_back(e); break;
        case Stereotype::Action: idx.actions.push_back(e); break;
        case Stereotype::Domain: break;
      }
    }
    out.push_back(std::move(idx));
  }
  return out;
}

class Sink {
 public:
  Sink(const ModelGraph& model, std::string_view rule, Diagnostics& out)
      : model_(model), rule_(rule), out_(out) {}

  void operator()(const Element* e, std::string message) {
    Diagnostic d;
    d.rule = std::string(rule_);
    d.severity = Severity::Error;
    if (e != nullptr) {
      d.element = e->id.value;
      d.path = qualified_name(model_, e->id);
    }
    d.message = std::move(message);
    out_.push_back(std::move(d));
  }

 private:
  const ModelGraph& model_;
  std::string_view rule_;
  Diagnostics& out_;
};

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

/// Every member of a case-insensitive duplicate group is reported.
void report_duplicates(const std::vector<const Element*>& elems, Sink& sink, std::string_view what,
                       const Element* domain) {
  std::map<std::string, std::vector<const Element*>> groups;
  for (const Element* e : elems) groups[lower(e->name)].push_back(e);
  for (auto& [_, group] : groups) {
    if (group.size() < 2) continue;
    std::sort(group.begin(), group.end(), [](const Element* a, const Element* b) { return a->id < b->id; });
    std::string ids;
    for (const Element* e : group) ids += (ids.empty() ? "" : ", ") + quoted(e->id.value);
    sink(group.front(), std::string(what) + " name " + quoted(group.front()->name) +
                            " is not unique within domain " + quoted(domain->name) + " (" + ids + ")");
  }
}

const ParameterList* params_of(const StereotypeApplication& app) {
  return app.tag<ParameterList>(tags::kParameters);
}

/// Variable syntax, duplicates and type resolution for a parameter list.
void check_parameter_list(const ModelGraph& model, const ParameterList& params,
                          const Element* owner, const Element* domain, Sink& sink) {
  std::set<std::string> seen;
  for (const auto& p : params) {
    if (!is_pddl_variable(p.variable)) {
      sink(owner, "parameter " + quoted(p.variable) + " is not a variable of the form ?name");
    }
    if (!seen.insert(lower(p.variable)).second) {
      sink(owner, "duplicate parameter " + quoted(p.variable));
    }
    const Element* type = model.find(p.type);
    if (type == nullptr || type->kind != ElementKind::Class ||
        !has_stereotype(model, p.type, Stereotype::Type) ||
        owning_domain(model, p.type) != domain->id) {
      sink(owner, "type of parameter " + quoted(p.variable) + " (" + quoted(p.type.value) +
                      ") is not a Type of domain " + quoted(domain->name));
    }
  }
}

void check_known_tags(const StereotypeApplication& app, std::initializer_list<std::string_view> known,
                      const Element* e, Sink& sink) {
  for (const auto& [key, _] : app.tags) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      sink(e, "unknown tag " + quoted(key) + " on " + std::string(to_string(app.stereotype)));
    }
  }
}

// P01
void rule_domain_name(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) {
    if (d.domain->name.empty()) {
      sink(d.domain, "domain name is undefined");
    } else if (!is_valid_domain_name(d.domain->name)) {
      sink(d.domain, "domain name " + quoted(d.domain->name) + " does not match ^[a-zA-Z][a-zA-Z0-9_]*$");
    }
  }
}

// P02
void rule_unique_types(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) report_duplicates(d.types, sink, "type", d.domain);
}

/// Signature identity: parameter type ids, variable names ignored.
std::vector<ElementId> signature(const StereotypeApplication& app) {
  std::vector<ElementId> sig;
  if (const auto* ps = params_of(app)) {
    for (const auto& p : *ps) sig.push_back(p.type);
  }
  return sig;
}

void report_conflicting_declarations(const ModelGraph& model, const std::vector<const Element*>& flows,
                                     std::string_view what, Sink& sink) {
  std::map<std::string, const Element*> first;
  for (const Element* e : flows) {  // sorted by id
    auto [it, inserted] = first.emplace(lower(e->name), e);
    if (inserted) continue;
    const Element* ref = it->second;
    if (ref->name != e->name) {
      sink(e, std::string(what) + " " + quoted(e->name) + " is spelled differently from " +
                  quoted(ref->name) + " (flow " + quoted(ref->id.value) + ")");
    } else if (signature(*model.application(e->id)) != signature(*model.application(ref->id))) {
      sink(e, std::string(what) + " " + quoted(e->name) + " is declared with a signature different from flow " +
                  quoted(ref->id.value));
    }
  }
}

// P03
void rule_unique_predicates(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) report_conflicting_declarations(c.model, d.predicates, "predicate", sink);
}

// P04
void rule_unique_functions(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) {
    report_conflicting_declarations(c.model, d.functions, "function", sink);
    std::set<std::string> predicate_names;
    for (const Element* p : d.predicates) predicate_names.insert(lower(p->name));
    for (const Element* f : d.functions) {
      if (iequals(f->name, "total-cost")) {
        sink(f, "function name 'total-cost' is reserved for the accumulated plan cost");
      } else if (predicate_names.count(lower(f->name)) != 0) {
        sink(f, "function " + quoted(f->name) + " clashes with a predicate of the same name");
      }
    }
  }
}

// P05
void rule_unique_actions(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) report_duplicates(d.actions, sink, "action", d.domain);
}

// P06
void rule_action_completeness(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) {
    for (const Element* a : d.actions) {
      const auto& app = *c.model.application(a->id);
      if (a->name.empty()) sink(a, "action has no name");
      check_known_tags(app, {tags::kParameters}, a, sink);
      if (!app.has_tag(tags::kParameters)) {
        sink(a, "action lacks a 'parameters' tag");
        continue;
      }
      const auto* params = params_of(app);
      if (params == nullptr) {
        sink(a, "'parameters' tag must be a parameter list");
        continue;
      }
      check_parameter_list(c.model, *params, a, d.domain, sink);
    }
  }
}

/// Checks one endpoint action's binding of the flow's arguments.
void check_binding(const ModelGraph& model, const Element* flow, const StereotypeApplication& app,
                   const Element* action, Sink& sink) {
  const auto* action_app = model.application(action->id);
  if (action_app == nullptr || action_app->stereotype != Stereotype::Action) return;
  const auto* action_params = params_of(*action_app);
  const auto* declared = params_of(app);
  const auto* args = app.tag<NameList>(tags::kArguments);
  if (action_params == nullptr) return;  // reported by P06
  const std::size_t nargs = args != nullptr ? args->size() : 0;
  const std::size_t nparams = declared != nullptr ? declared->size() : 0;
  if (nargs != nparams) return;  // arity reported once per flow
  for (std::size_t i = 0; i < nargs; ++i) {
    const std::string& arg = (*args)[i];
    auto it = std::find_if(action_params->begin(), action_params->end(),
                           [&](const Parameter& p) { return iequals(p.variable, arg); });
    if (it == action_params->end()) {
      sink(flow, "argument " + quoted(arg) + " is not a parameter of action " + quoted(action->name));
      continue;
    }
    if (!is_subclass(model, it->type, (*declared)[i].type)) {
      const Element* have = model.find(it->type);
      const Element* want = model.find((*declared)[i].type);
      sink(flow, "argument " + quoted(arg) + " of action " + quoted(action->name) + " has type " +
                     quoted(have ? have->name : it->type.value) + ", expected " +
                     quoted(want ? want->name : (*declared)[i].type.value));
    }
  }
}

// P07
void rule_use_consistency(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) {
    auto check_flow = [&](const Element* e, bool is_function) {
      const auto& app = *c.model.application(e->id);
      const Flow* flow = c.model.find_flow(e->id);
      if (is_function) {
        check_known_tags(app, {tags::kParameters, tags::kArguments, tags::kRole}, e, sink);
      } else {
        check_known_tags(app, {tags::kParameters, tags::kArguments, tags::kNegated}, e, sink);
      }
      const auto* params = params_of(app);
      if (app.has_tag(tags::kParameters) && params == nullptr) {
        sink(e, "'parameters' tag must be a parameter list");
      }
      if (params != nullptr) check_parameter_list(c.model, *params, e, d.domain, sink);
      const auto* args = app.tag<NameList>(tags::kArguments);
      if (app.has_tag(tags::kArguments) && args == nullptr) {
        sink(e, "'arguments' tag must be a list of parameter names");
      }
      const std::size_t nargs = args != nullptr ? args->size() : 0;
      const std::size_t nparams = params != nullptr ? params->size() : 0;
      if (nargs != nparams) {
        sink(e, quoted(e->name) + " is used with " + std::to_string(nargs) + " arguments but declares " +
                    std::to_string(nparams) + " parameters");
      }
      if (is_function) {
        const auto* role = app.tag<std::string>(tags::kRole);
        if (role == nullptr) {
          sink(e, "function flow needs a 'role' tag (\"cost\")");
        } else if (*role == "condition") {
          sink(e, "function role 'condition' is reserved and not supported");
        } else if (*role != "cost") {
          sink(e, "unknown function role " + quoted(*role));
        }
        const Element* src = c.model.find(flow->source);
        if (src->kind == ElementKind::ActionNode) {
          sink(e, "function flows must enter an action, not leave one");
        }
      } else if (app.has_tag(tags::kNegated) && app.tag<bool>(tags::kNegated) == nullptr) {
        sink(e, "'negated' tag must be a boolean");
      }
      for (const ElementId* end : {&flow->source, &flow->target}) {
        const Element* endpoint = c.model.find(*end);
        if (endpoint->kind == ElementKind::ActionNode) check_binding(c.model, e, app, endpoint, sink);
      }
    };
    for (const Element* p : d.predicates) check_flow(p, false);
    for (const Element* f : d.functions) check_flow(f, true);
  }
}

// P08
void rule_type_hierarchy(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) {
    for (const Element* t : d.types) {
      bool cyclic = false;
      for (const auto& p : c.model.parents(t->id)) cyclic = cyclic || is_subclass(c.model, p, t->id);
      if (cyclic) sink(t, "type " + quoted(t->name) + " generalizes itself");
      std::size_t type_parents = 0;
      for (const auto& p : c.model.parents(t->id)) {
        if (has_stereotype(c.model, p, Stereotype::Type) && owning_domain(c.model, p) == d.domain->id) {
          ++type_parents;
        }
      }
      if (type_parents > 1) sink(t, "type " + quoted(t->name) + " has more than one parent type");
    }
  }
}

// P09
void rule_name_syntax(const RuleContext& c, Sink& sink) {
  for (const auto& d : c.domains) {
    auto check = [&](const std::vector<const Element*>& elems, std::string_view what) {
      for (const Element* e : elems) {
        if (!is_pddl_name(e->name)) {
          sink(e, std::string(what) + " name " + quoted(e->name) + " is not a valid PDDL name");
        } else if (is_reserved_word(e->name)) {
          sink(e, std::string(what) + " name " + quoted(e->name) + " is a reserved word");
        }
      }
    };
    check(d.types, "type");
    check(d.predicates, "predicate");
    check(d.functions, "function");
    check(d.actions, "action");
  }
}

// P10
void rule_domain_present(const RuleContext& c, Sink& sink) {
  if (c.context == Context::Generation && c.domains.empty()) {
    sink(nullptr, "model has no Domain package to generate from");
  }
}

using RuleFn = void (*)(const RuleContext&, Sink&);

RuleFn rule_function(std::string_view id) {
  static const std::map<std::string_view, RuleFn> kTable = {
      {"P01", rule_domain_name},     {"P02", rule_unique_types},
      {"P03", rule_unique_predicates}, {"P04", rule_unique_functions},
      {"P05", rule_unique_actions},  {"P06", rule_action_completeness},
      {"P07", rule_use_consistency}, {"P08", rule_type_hierarchy},
      {"P09", rule_name_syntax},     {"P10", rule_domain_present},
  };
  auto it = kTable.find(id);
  return it == kTable.end() ? nullptr : it->second;
}

void order(Diagnostics& ds, const ModelGraph& model) {
  auto name_of = [&](const Diagnostic& d) -> std::string {
    const Element* e = d.element.empty() ? nullptr : model.find(ElementId{d.element});
    return e ? e->name : std::string();
  };
  std::stable_sort(ds.begin(), ds.end(), [&](const Diagnostic& a, const Diagnostic& b) {
    if (a.rule != b.rule) return a.rule < b.rule;
    std::string na = name_of(a), nb = name_of(b);
    if (na != nb) return na < nb;
    if (a.element != b.element) return a.element < b.element;
    return a.message < b.message;
  });
}

Diagnostics run(const ModelGraph& model, const RuleSet& rules, Context context, bool parallel) {
  const RuleContext ctx{model, index_domains(model), context};
  std::vector<std::string> ids;
  for (const auto& r : registered_rules()) {
    if (rules.enabled(r.id)) ids.emplace_back(r.id);
  }
  std::vector<Diagnostics> per_rule(ids.size());
  const long n = static_cast<long>(ids.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    Sink sink(model, ids[static_cast<std::size_t>(i)], per_rule[static_cast<std::size_t>(i)]);
    rule_function(ids[static_cast<std::size_t>(i)])(ctx, sink);
  }
  Diagnostics out;
  for (auto& ds : per_rule) out.insert(out.end(), ds.begin(), ds.end());
  order(out, model);
  return out;
}

}  // namespace

Diagnostics validate(const ModelGraph& model, const RuleSet& rules, Context context) {
  return run(model, rules, context, true);
}

Diagnostics validate_serial(const ModelGraph& model, const RuleSet& rules, Context context) {
  return run(model, rules, context, false);
}

}  // namespace mbplan::profile
