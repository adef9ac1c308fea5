#include "mbplan/model.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "mbplan/names.hpp"

namespace mbplan::model {

std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::Package: return "Package";
    case ElementKind::Class: return "Class";
    case ElementKind::Activity: return "Activity";
    case ElementKind::ActionNode: return "ActionNode";
    case ElementKind::FlowNode: return "FlowNode";
  }
  return "?";
}

std::string_view to_string(FlowFlavor f) {
  return f == FlowFlavor::ObjectFlow ? "ObjectFlow" : "ControlFlow";
}

std::string_view to_string(Stereotype s) {
  switch (s) {
    case Stereotype::Domain: return "Domain";
    case Stereotype::Type: return "Type";
    case Stereotype::Predicate: return "Predicate";
    case Stereotype::Function: return "Function";
    case Stereotype::Action: return "Action";
  }
  return "?";
}

std::optional<ElementKind> parse_element_kind(std::string_view s) {
  for (auto k : kAllKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<FlowFlavor> parse_flow_flavor(std::string_view s) {
  if (s == "ObjectFlow") return FlowFlavor::ObjectFlow;
  if (s == "ControlFlow") return FlowFlavor::ControlFlow;
  return std::nullopt;
}

std::optional<Stereotype> parse_stereotype(std::string_view s) {
  for (auto st : kAllStereotypes) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

ElementKind applicable_kind(Stereotype s) {
  switch (s) {
    case Stereotype::Domain: return ElementKind::Package;
    case Stereotype::Type: return ElementKind::Class;
    case Stereotype::Predicate:
    case Stereotype::Function: return ElementKind::FlowNode;
    case Stereotype::Action: return ElementKind::ActionNode;
  }
  return ElementKind::Package;
}

// ---------------------------------------------------------------------------
// ModelGraph

const Element* ModelGraph::find(const ElementId& id) const {
  auto it = element_index_.find(id);
  return it == element_index_.end() ? nullptr : &elements_[it->second];
}

const Flow* ModelGraph::find_flow(const ElementId& id) const {
  auto it = flow_index_.find(id);
  return it == flow_index_.end() ? nullptr : &flows_[it->second];
}

const StereotypeApplication* ModelGraph::application(const ElementId& id) const {
  auto it = application_index_.find(id);
  return it == application_index_.end() ? nullptr : &applications_[it->second];
}

std::vector<const Element*> ModelGraph::children(const ElementId& id) const {
  std::vector<const Element*> out;
  auto [lo, hi] = children_.equal_range(id);
  for (auto it = lo; it != hi; ++it) out.push_back(find(it->second));
  return out;
}

std::vector<ElementId> ModelGraph::parents(const ElementId& id) const {
  std::vector<ElementId> out;
  for (const auto& g : generalizations_) {
    if (g.specific == id) out.push_back(g.general);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ModelBuilder

ModelBuilder& ModelBuilder::add_element(Element e) {
  elements_.push_back(std::move(e));
  return *this;
}

ModelBuilder& ModelBuilder::add_element(std::string id, ElementKind kind, std::string name,
                                        std::optional<std::string> owner) {
  Element e{ElementId{std::move(id)}, kind, std::move(name), std::nullopt};
  if (owner) e.owner = ElementId{std::move(*owner)};
  return add_element(std::move(e));
}

ModelBuilder& ModelBuilder::add_flow(Flow f) {
  flows_.push_back(std::move(f));
  return *this;
}

ModelBuilder& ModelBuilder::add_flow(std::string id, std::string name, std::string owner,
                                     std::string source, std::string target, FlowFlavor flavor) {
  add_element(id, ElementKind::FlowNode, std::move(name), std::move(owner));
  return add_flow(Flow{ElementId{std::move(id)}, flavor, ElementId{std::move(source)},
                       ElementId{std::move(target)}});
}

ModelBuilder& ModelBuilder::add_generalization(std::string specific, std::string general) {
  generalizations_.push_back({ElementId{std::move(specific)}, ElementId{std::move(general)}});
  return *this;
}

ModelBuilder& ModelBuilder::apply(StereotypeApplication a) {
  applications_.push_back(std::move(a));
  return *this;
}

ModelBuilder& ModelBuilder::apply(std::string element, Stereotype s, TagMap tags) {
  return apply(StereotypeApplication{ElementId{std::move(element)}, s, std::move(tags)});
}

namespace {

Diagnostic model_diag(std::string rule, const ElementId& id, std::string message) {
  Diagnostic d;
  d.rule = "model." + std::move(rule);
  d.element = id.value;
  d.path = id.value;
  d.message = std::move(message);
  return d;
}

bool admits_child(ElementKind owner, ElementKind child) {
  switch (owner) {
    case ElementKind::Package:
      return child == ElementKind::Package || child == ElementKind::Class ||
             child == ElementKind::Activity;
    case ElementKind::Activity:
      return child == ElementKind::ActionNode || child == ElementKind::FlowNode;
    default: return false;
  }
}

}  // namespace

Result<ModelGraph> ModelBuilder::build() const {
  Diagnostics diags;
  ModelGraph g;

  // Elements.
  g.elements_ = elements_;
  std::sort(g.elements_.begin(), g.elements_.end(),
            [](const Element& a, const Element& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < g.elements_.size(); ++i) {
    const auto& e = g.elements_[i];
    if (e.id.value.empty()) {
      diags.push_back(model_diag("empty-id", e.id, "element id must not be empty"));
      continue;
    }
    if (!g.element_index_.emplace(e.id, i).second) {
      diags.push_back(model_diag("duplicate-id", e.id, "duplicate element id '" + e.id.value + "'"));
    }
  }

  // Containment.
  for (const auto& e : g.elements_) {
    if (!e.owner) {
      if (e.kind == ElementKind::ActionNode || e.kind == ElementKind::FlowNode) {
        diags.push_back(model_diag("bad-owner", e.id,
                                   std::string(to_string(e.kind)) + " must be owned by an Activity"));
      }
      continue;
    }
    const Element* owner = g.find(*e.owner);
    if (owner == nullptr) {
      diags.push_back(model_diag("dangling-ref", e.id, "owner '" + e.owner->value + "' does not exist"));
      continue;
    }
    if (!admits_child(owner->kind, e.kind)) {
      diags.push_back(model_diag("bad-owner", e.id,
                                 std::string(to_string(owner->kind)) + " cannot own a " +
                                     std::string(to_string(e.kind))));
      continue;
    }
    g.children_.emplace(*e.owner, e.id);
  }
  for (const auto& e : g.elements_) {
    // Walk the owner chain; a cycle through e brings us back to e.
    const Element* cur = &e;
    for (std::size_t steps = 0; cur != nullptr && cur->owner && steps <= g.elements_.size();
         ++steps) {
      cur = g.find(*cur->owner);
      if (cur == &e) {
        diags.push_back(model_diag("containment-cycle", e.id, "element is its own (transitive) owner"));
        break;
      }
    }
  }

  // Flows.
  g.flows_ = flows_;
  std::sort(g.flows_.begin(), g.flows_.end(),
            [](const Flow& a, const Flow& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < g.flows_.size(); ++i) {
    const auto& f = g.flows_[i];
    if (!g.flow_index_.emplace(f.id, i).second) {
      diags.push_back(model_diag("duplicate-id", f.id, "duplicate flow id '" + f.id.value + "'"));
      continue;
    }
    const Element* node = g.find(f.id);
    if (node == nullptr || node->kind != ElementKind::FlowNode) {
      diags.push_back(model_diag("flow-without-node", f.id, "flow has no FlowNode element"));
      continue;
    }
    const Element* src = g.find(f.source);
    const Element* tgt = g.find(f.target);
    if (src == nullptr) {
      diags.push_back(model_diag("dangling-ref", f.id, "flow source '" + f.source.value + "' does not exist"));
    }
    if (tgt == nullptr) {
      diags.push_back(model_diag("dangling-ref", f.id, "flow target '" + f.target.value + "' does not exist"));
    }
    if (src == nullptr || tgt == nullptr || !node->owner) continue;
    if (f.source == f.target) {
      diags.push_back(model_diag("flow-endpoint", f.id, "flow source and target coincide"));
      continue;
    }
    const ElementId& activity = *node->owner;
    auto in_activity = [&](const Element* end) {
      return end->id == activity || (end->kind == ElementKind::ActionNode && end->owner == activity);
    };
    if (!in_activity(src) || !in_activity(tgt)) {
      diags.push_back(model_diag("flow-endpoint", f.id,
                                 "flow endpoints must be action nodes of activity '" +
                                     activity.value + "' or its boundary"));
    }
  }
  for (const auto& e : g.elements_) {
    if (e.kind == ElementKind::FlowNode && g.flow_index_.find(e.id) == g.flow_index_.end()) {
      diags.push_back(model_diag("node-without-flow", e.id, "FlowNode element has no flow"));
    }
  }

  // Generalizations.
  g.generalizations_ = generalizations_;
  std::sort(g.generalizations_.begin(), g.generalizations_.end());
  g.generalizations_.erase(std::unique(g.generalizations_.begin(), g.generalizations_.end()),
                           g.generalizations_.end());
  bool generalizations_ok = true;
  for (const auto& gen : g.generalizations_) {
    for (const ElementId* end : {&gen.specific, &gen.general}) {
      const Element* e = g.find(*end);
      if (e == nullptr) {
        diags.push_back(model_diag("dangling-ref", gen.specific,
                                   "generalization endpoint '" + end->value + "' does not exist"));
        generalizations_ok = false;
      } else if (e->kind != ElementKind::Class) {
        diags.push_back(model_diag("generalization-kind", *end, "generalization endpoints must be classes"));
        generalizations_ok = false;
      }
    }
  }
  if (generalizations_ok) {
    std::map<ElementId, std::vector<ElementId>> up;
    for (const auto& gen : g.generalizations_) up[gen.specific].push_back(gen.general);
    for (const auto& [start, _] : up) {
      std::set<ElementId> seen;
      std::vector<ElementId> stack = up[start];
      bool cyclic = false;
      while (!stack.empty() && !cyclic) {
        ElementId cur = stack.back();
        stack.pop_back();
        if (cur == start) cyclic = true;
        if (!seen.insert(cur).second) continue;
        auto it = up.find(cur);
        if (it != up.end()) stack.insert(stack.end(), it->second.begin(), it->second.end());
      }
      if (cyclic) {
        diags.push_back(model_diag("generalization-cycle", start, "class generalizes itself transitively"));
      }
    }
  }

  // Stereotype applications.
  g.applications_ = applications_;
  std::stable_sort(g.applications_.begin(), g.applications_.end(),
                   [](const auto& a, const auto& b) { return a.element < b.element; });
  for (std::size_t i = 0; i < g.applications_.size(); ++i) {
    const auto& a = g.applications_[i];
    const Element* e = g.find(a.element);
    if (e == nullptr) {
      diags.push_back(model_diag("dangling-ref", a.element,
                                 "stereotype applied to missing element '" + a.element.value + "'"));
      continue;
    }
    if (e->kind != applicable_kind(a.stereotype)) {
      diags.push_back(model_diag("incompatible-stereotype", a.element,
                                 std::string(to_string(a.stereotype)) + " cannot be applied to a " +
                                     std::string(to_string(e->kind))));
      continue;
    }
    if (!g.application_index_.emplace(a.element, i).second) {
      diags.push_back(model_diag("duplicate-application", a.element,
                                 "element carries more than one stereotype"));
      continue;
    }
    for (const auto& [key, value] : a.tags) {
      auto check_ref = [&](const ElementId& ref) {
        if (!g.contains(ref)) {
          diags.push_back(model_diag("dangling-ref", a.element,
                                     "tag '" + key + "' references missing element '" + ref.value + "'"));
        }
      };
      if (const auto* t = std::get_if<TypeRef>(&value)) check_ref(t->type);
      if (const auto* ps = std::get_if<ParameterList>(&value)) {
        for (const auto& p : *ps) check_ref(p.type);
      }
    }
  }

  if (!diags.empty()) return diags;
  return g;
}

// ---------------------------------------------------------------------------
// Queries

const StereotypeApplication* stereotype_of(const ModelGraph& model, const ElementId& e) {
  if (!model.contains(e)) {
    throw ModelError(ModelError::Code::UnknownElement, "unknown element '" + e.value + "'");
  }
  return model.application(e);
}

bool has_stereotype(const ModelGraph& model, const ElementId& e, Stereotype s) {
  const auto* a = model.application(e);
  return a != nullptr && a->stereotype == s;
}

namespace {

void require_action(const ModelGraph& model, const ElementId& action) {
  const Element* e = model.find(action);
  if (e == nullptr) {
    throw ModelError(ModelError::Code::UnknownElement, "unknown element '" + action.value + "'");
  }
  if (e->kind != ElementKind::ActionNode || !has_stereotype(model, action, Stereotype::Action)) {
    throw ModelError(ModelError::Code::NotAnAction, "'" + action.value + "' is not an Action node");
  }
}

std::vector<AnnotatedFlow> annotated_flows(const ModelGraph& model, const ElementId& action,
                                           bool incoming) {
  require_action(model, action);
  std::vector<AnnotatedFlow> out;
  for (const auto& f : model.flows()) {  // sorted by id
    if ((incoming ? f.target : f.source) != action) continue;
    const auto* app = model.application(f.id);
    if (app == nullptr) continue;
    if (app->stereotype == Stereotype::Predicate || app->stereotype == Stereotype::Function) {
      out.push_back({&f, app});
    }
  }
  return out;
}

bool by_name_then_id(const Element* a, const Element* b) {
  if (a->name != b->name) return name_less(a->name, b->name);
  return a->id < b->id;
}

}  // namespace

std::vector<AnnotatedFlow> incoming_annotated_flows(const ModelGraph& model,
                                                    const ElementId& action) {
  return annotated_flows(model, action, true);
}

std::vector<AnnotatedFlow> outgoing_annotated_flows(const ModelGraph& model,
                                                    const ElementId& action) {
  return annotated_flows(model, action, false);
}

std::vector<const Element*> elements_in_domain(const ModelGraph& model, const ElementId& domain) {
  std::vector<const Element*> out;
  std::vector<ElementId> stack{domain};
  while (!stack.empty()) {
    ElementId cur = stack.back();
    stack.pop_back();
    for (const Element* child : model.children(cur)) {
      if (has_stereotype(model, child->id, Stereotype::Domain)) continue;
      out.push_back(child);
      stack.push_back(child->id);
    }
  }
  std::sort(out.begin(), out.end(), [](const Element* a, const Element* b) { return a->id < b->id; });
  return out;
}

std::vector<const Element*> types_in_domain(const ModelGraph& model, const ElementId& domain) {
  const Element* d = model.find(domain);
  if (d == nullptr) {
    throw ModelError(ModelError::Code::UnknownElement, "unknown element '" + domain.value + "'");
  }
  if (d->kind != ElementKind::Package || !has_stereotype(model, domain, Stereotype::Domain)) {
    throw ModelError(ModelError::Code::NotADomain, "'" + domain.value + "' is not a Domain package");
  }
  std::vector<const Element*> out;
  for (const Element* e : elements_in_domain(model, domain)) {
    if (e->kind == ElementKind::Class && has_stereotype(model, e->id, Stereotype::Type)) {
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end(), by_name_then_id);
  return out;
}

std::vector<const Element*> domains(const ModelGraph& model) {
  std::vector<const Element*> out;
  for (const auto& a : model.applications()) {
    if (a.stereotype == Stereotype::Domain) out.push_back(model.find(a.element));
  }
  std::sort(out.begin(), out.end(), by_name_then_id);
  return out;
}

std::optional<ElementId> owning_domain(const ModelGraph& model, const ElementId& e) {
  const Element* cur = model.find(e);
  while (cur != nullptr) {
    if (has_stereotype(model, cur->id, Stereotype::Domain)) return cur->id;
    cur = cur->owner ? model.find(*cur->owner) : nullptr;
  }
  return std::nullopt;
}

std::string qualified_name(const ModelGraph& model, const ElementId& e) {
  std::vector<std::string> parts;
  const Element* cur = model.find(e);
  if (cur == nullptr) return e.value;
  while (cur != nullptr) {
    parts.push_back(cur->name.empty() ? cur->id.value : cur->name);
    cur = cur->owner ? model.find(*cur->owner) : nullptr;
  }
  std::string out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (!out.empty()) out += "::";
    out += *it;
  }
  return out;
}

}  // namespace mbplan::model
