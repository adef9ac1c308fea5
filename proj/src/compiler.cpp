#include "mbplan/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mbplan/names.hpp"

namespace mbplan::compiler {

using namespace mbplan::model;

namespace {

Diagnostic compile_diag(std::string rule, std::string message, std::string element = {}) {
  Diagnostic d;
  d.rule = "compile." + std::move(rule);
  d.element = element;
  d.path = std::move(element);
  d.message = std::move(message);
  return d;
}

bool by_name_then_id(const Element* a, const Element* b) {
  if (a->name != b->name) return name_less(a->name, b->name);
  return a->id < b->id;
}

class DomainCompiler {
 public:
  DomainCompiler(const ModelGraph& model, const Element& domain) : model_(model), domain_(domain) {}

  Result<pddl::PddlDomain> run() {
    pddl::PddlDomain out;
    out.name = domain_.name;
    const auto members = elements_in_domain(model_, domain_.id);

    for (const Element* t : types_in_domain(model_, domain_.id)) {
      out.types.push_back({t->name, parent_type(*t)});
    }

    std::vector<const Element*> predicates, functions, actions;
    for (const Element* e : members) {
      const auto* app = model_.application(e->id);
      if (app == nullptr) continue;
      if (app->stereotype == Stereotype::Predicate) predicates.push_back(e);
      if (app->stereotype == Stereotype::Function) functions.push_back(e);
      if (app->stereotype == Stereotype::Action) actions.push_back(e);
    }
    std::sort(predicates.begin(), predicates.end(), by_name_then_id);
    std::sort(functions.begin(), functions.end(), by_name_then_id);
    std::sort(actions.begin(), actions.end(), by_name_then_id);

    std::set<std::string> seen;
    for (const Element* p : predicates) {
      if (seen.insert(lower(p->name)).second) out.predicates.push_back({p->name, signature(*p)});
    }
    seen.clear();
    for (const Element* f : functions) {
      if (seen.insert(lower(f->name)).second) out.functions.push_back({f->name, signature(*f)});
    }

    bool any_cost = false;
    for (const Element* a : actions) {
      out.actions.push_back(action(*a));
      any_cost = any_cost || uses_cost(out.actions.back());
    }
    if (any_cost) {
      out.functions.push_back({std::string(pddl::kTotalCost), {}});
      std::stable_sort(out.functions.begin(), out.functions.end(),
                       [](const auto& a, const auto& b) { return name_less(a.name, b.name); });
    }
    out.requirements = pddl::infer_requirements(out);

    if (!errors_.empty()) return errors_;
    Diagnostics check = pddl::check_domain(out);
    if (!check.empty()) {
      Diagnostics internal;
      for (auto& d : check) internal.push_back(compile_diag("internal", d.message, d.element));
      return internal;
    }
    return out;
  }

 private:
  std::string parent_type(const Element& type) {
    std::vector<std::string> parents;
    for (const auto& p : model_.parents(type.id)) {
      if (has_stereotype(model_, p, Stereotype::Type) && owning_domain(model_, p) == domain_.id) {
        parents.push_back(model_.find(p)->name);
      }
    }
    if (parents.size() > 1) {
      errors_.push_back(compile_diag("internal", "type '" + type.name + "' has several parents", type.id.value));
    }
    return parents.empty() ? std::string(pddl::kObjectType) : parents.front();
  }

  pddl::TypedList signature(const Element& e) {
    pddl::TypedList out;
    const auto* app = model_.application(e.id);
    const auto* params = app->tag<ParameterList>(tags::kParameters);
    if (params == nullptr) {
      if (app->has_tag(tags::kParameters)) {
        errors_.push_back(compile_diag("internal", "'" + e.name + "' has a malformed parameters tag", e.id.value));
      }
      return out;
    }
    for (const auto& p : *params) {
      const Element* type = model_.find(p.type);
      out.push_back({p.variable, type != nullptr ? type->name : p.type.value});
    }
    return out;
  }

  pddl::Atom atom_of(const AnnotatedFlow& f) {
    const Element* node = model_.find(f.flow->id);
    pddl::Atom a{node->name, {}};
    if (const auto* args = f.application->tag<NameList>(tags::kArguments)) a.terms = *args;
    return a;
  }

  static bool negated(const AnnotatedFlow& f) {
    const bool* n = f.application->tag<bool>(tags::kNegated);
    return n != nullptr && *n;
  }

  pddl::ActionDef action(const Element& node) {
    pddl::ActionDef a;
    a.name = node.name;
    a.params = signature(node);

    std::vector<pddl::Condition> pre;
    std::vector<pddl::Effect> costs;
    for (const auto& f : incoming_annotated_flows(model_, node.id)) {
      if (f.application->stereotype == Stereotype::Predicate) {
        pre.push_back(negated(f) ? pddl::Condition::make_not(atom_of(f))
                                 : pddl::Condition::make_atom(atom_of(f)));
      } else {
        const auto* role = f.application->tag<std::string>(tags::kRole);
        if (role == nullptr || *role != "cost") {
          errors_.push_back(compile_diag("internal", "function flow without cost role", f.flow->id.value));
          continue;
        }
        pddl::NumericExpr value;
        value.term = atom_of(f);
        costs.push_back(pddl::Effect::make_increase({std::string(pddl::kTotalCost), {}}, std::move(value)));
      }
    }
    std::vector<pddl::Effect> eff;
    for (const auto& f : outgoing_annotated_flows(model_, node.id)) {
      if (f.application->stereotype != Stereotype::Predicate) {
        errors_.push_back(compile_diag("internal", "function flow leaves an action", f.flow->id.value));
        continue;
      }
      eff.push_back(negated(f) ? pddl::Effect::make_delete(atom_of(f)) : pddl::Effect::make_add(atom_of(f)));
    }
    eff.insert(eff.end(), costs.begin(), costs.end());

    if (pre.size() == 1) {
      a.precondition = std::move(pre.front());
    } else if (pre.size() > 1) {
      a.precondition = pddl::Condition::make_and(std::move(pre));
    }
    if (eff.size() == 1) {
      a.effect = std::move(eff.front());
    } else if (eff.size() > 1) {
      a.effect = pddl::Effect::make_and(std::move(eff));
    }
    return a;
  }

  static bool uses_cost(const pddl::ActionDef& a) {
    if (!a.effect) return false;
    if (a.effect->kind == pddl::Effect::Kind::Increase) return true;
    return std::any_of(a.effect->children.begin(), a.effect->children.end(),
                       [](const auto& e) { return e.kind == pddl::Effect::Kind::Increase; });
  }

  const ModelGraph& model_;
  const Element& domain_;
  Diagnostics errors_;
};

}  // namespace

Result<pddl::PddlDomain> compile_domain(const ModelGraph& model, const ElementId& domain) {
  const Element* d = model.find(domain);
  if (d == nullptr || d->kind != ElementKind::Package || !has_stereotype(model, domain, Stereotype::Domain)) {
    return compile_diag("not-a-domain", "'" + domain.value + "' is not a Domain package", domain.value);
  }
  return DomainCompiler(model, *d).run();
}

namespace {

class ProblemCompiler {
 public:
  ProblemCompiler(const pddl::PddlDomain& domain, const InstanceData& data)
      : domain_(domain), data_(data), types_(domain) {}

  Result<pddl::PddlProblem> run(const std::string& name) {
    pddl::PddlProblem p;
    p.name = name;
    p.domain_name = domain_.name;
    if (!is_pddl_name(name)) error("bad-name", "'" + name + "' is not a valid problem name");

    for (const auto& o : data_.objects) {
      if (!is_pddl_name(o.name)) error("bad-name", "'" + o.name + "' is not a valid object name", o.name);
      if (!types_.known(o.type)) {
        error("unknown-type", "object '" + o.name + "' has undeclared type '" + o.type + "'", o.name);
      }
      if (!objects_.emplace(lower(o.name), o.type).second) {
        error("duplicate-object", "object '" + o.name + "' is declared twice", o.name);
      }
      p.objects.push_back(o);
    }

    for (const auto& f : data_.init_predicates) {
      check_fact(f, false, "init");
      p.init_atoms.push_back({f.name, f.args});
    }
    bool has_total_cost = false;
    for (const auto& v : data_.init_function_values) {
      check_fact(v.term, true, "init");
      if (!std::isfinite(v.value)) {
        error("non-finite", "value of " + text(v.term) + " is not a finite number", v.term.name);
      }
      has_total_cost = has_total_cost || (iequals(v.term.name, pddl::kTotalCost) && v.term.args.empty());
      p.init_values.push_back({{v.term.name, v.term.args}, v.value});
    }

    if (data_.goal.empty()) {
      error("empty-goal", "goal is empty; a goalless problem is trivially solved");
    }
    std::vector<pddl::Condition> goal;
    for (const auto& g : data_.goal) {
      check_fact(g.atom, false, "goal");
      pddl::Atom a{g.atom.name, g.atom.args};
      goal.push_back(g.negated ? pddl::Condition::make_not(std::move(a))
                               : pddl::Condition::make_atom(std::move(a)));
    }
    p.goal = goal.size() == 1 ? std::move(goal.front()) : pddl::Condition::make_and(std::move(goal));

    if (data_.metric) {
      check_fact(*data_.metric, true, "metric");
      p.metric = pddl::Metric{{data_.metric->name, data_.metric->args}};
      if (iequals(data_.metric->name, pddl::kTotalCost) && !has_total_cost) {
        p.init_values.insert(p.init_values.begin(), {{std::string(pddl::kTotalCost), {}}, 0.0});
      }
    }

    if (!errors_.empty()) return errors_;
    Diagnostics check = pddl::check_problem(domain_, p);
    if (!check.empty()) {
      Diagnostics internal;
      for (auto& d : check) internal.push_back(compile_diag("internal", d.message));
      return internal;
    }
    return p;
  }

 private:
  static std::string text(const GroundFact& f) {
    std::string s = "(" + f.name;
    for (const auto& a : f.args) s += " " + a;
    return s + ")";
  }

  void error(std::string rule, std::string message, std::string element = {}) {
    errors_.push_back(compile_diag(std::move(rule), std::move(message), std::move(element)));
  }

  void check_fact(const GroundFact& f, bool function, const char* where) {
    const pddl::TypedList* sig = nullptr;
    if (function) {
      for (const auto& d : domain_.functions) {
        if (iequals(d.name, f.name)) sig = &d.params;
      }
      if (sig == nullptr) {
        return error("unknown-function", std::string(where) + " references undeclared function '" + f.name + "'",
                     f.name);
      }
    } else {
      for (const auto& d : domain_.predicates) {
        if (iequals(d.name, f.name)) sig = &d.params;
      }
      if (sig == nullptr) {
        return error("unknown-predicate",
                     std::string(where) + " references undeclared predicate '" + f.name + "'", f.name);
      }
    }
    if (sig->size() != f.args.size()) {
      return error("arity", text(f) + " has " + std::to_string(f.args.size()) + " arguments, expected " +
                                std::to_string(sig->size()),
                   f.name);
    }
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      auto it = objects_.find(lower(f.args[i]));
      if (it == objects_.end()) {
        error("unknown-object", text(f) + " references undeclared object '" + f.args[i] + "'", f.name);
      } else if (!types_.is_subtype(it->second, (*sig)[i].type)) {
        error("type-mismatch", text(f) + ": '" + f.args[i] + "' is a " + it->second + ", expected " +
                                   (*sig)[i].type,
              f.name);
      }
    }
  }

  const pddl::PddlDomain& domain_;
  const InstanceData& data_;
  pddl::TypeTable types_;
  std::map<std::string, std::string> objects_;
  Diagnostics errors_;
};

}  // namespace

Result<pddl::PddlProblem> compile_problem(const pddl::PddlDomain& domain, const InstanceData& data,
                                          const std::string& name) {
  return ProblemCompiler(domain, data).run(name);
}

}  // namespace mbplan::compiler
