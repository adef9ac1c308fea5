#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mbplan/diagnostic.hpp"

namespace mbplan::model {

struct ElementId {
  std::string value;

  friend auto operator<=>(const ElementId&, const ElementId&) = default;
  friend bool operator==(const ElementId&, const ElementId&) = default;
};

enum class ElementKind { Package, Class, Activity, ActionNode, FlowNode };
enum class FlowFlavor { ObjectFlow, ControlFlow };
enum class Stereotype { Domain, Type, Predicate, Function, Action };

inline constexpr ElementKind kAllKinds[] = {ElementKind::Package, ElementKind::Class,
                                            ElementKind::Activity, ElementKind::ActionNode,
                                            ElementKind::FlowNode};
inline constexpr Stereotype kAllStereotypes[] = {Stereotype::Domain, Stereotype::Type,
                                                 Stereotype::Predicate, Stereotype::Function,
                                                 Stereotype::Action};

std::string_view to_string(ElementKind k);
std::string_view to_string(FlowFlavor f);
std::string_view to_string(Stereotype s);
std::optional<ElementKind> parse_element_kind(std::string_view s);
std::optional<FlowFlavor> parse_flow_flavor(std::string_view s);
std::optional<Stereotype> parse_stereotype(std::string_view s);

/// The element kind each stereotype may be applied to.
ElementKind applicable_kind(Stereotype s);

struct Element {
  ElementId id;
  ElementKind kind = ElementKind::Package;
  std::string name;
  std::optional<ElementId> owner;

  friend bool operator==(const Element&, const Element&) = default;
};

/// Endpoints are action nodes of one activity, or the activity itself
/// standing for its boundary.
struct Flow {
  ElementId id;
  FlowFlavor flavor = FlowFlavor::ControlFlow;
  ElementId source;
  ElementId target;

  friend bool operator==(const Flow&, const Flow&) = default;
};

struct Generalization {
  ElementId specific;
  ElementId general;

  friend auto operator<=>(const Generalization&, const Generalization&) = default;
  friend bool operator==(const Generalization&, const Generalization&) = default;
};

struct TypeRef {
  ElementId type;
  friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

struct Parameter {
  std::string variable;  // e.g. "?From"
  ElementId type;
  friend bool operator==(const Parameter&, const Parameter&) = default;
};

using ParameterList = std::vector<Parameter>;
using NameList = std::vector<std::string>;
using TagValue = std::variant<std::string, double, bool, TypeRef, ParameterList, NameList>;
using TagMap = std::map<std::string, TagValue, std::less<>>;

// Tag keys understood by validation and compilation.
namespace tags {
inline constexpr std::string_view kParameters = "parameters";
inline constexpr std::string_view kArguments = "arguments";
inline constexpr std::string_view kNegated = "negated";
inline constexpr std::string_view kRole = "role";
}  // namespace tags

struct StereotypeApplication {
  ElementId element;
  Stereotype stereotype = Stereotype::Domain;
  TagMap tags;

  template <typename T>
  const T* tag(std::string_view key) const {
    auto it = tags.find(key);
    return it == tags.end() ? nullptr : std::get_if<T>(&it->second);
  }
  bool has_tag(std::string_view key) const { return tags.find(key) != tags.end(); }

  friend bool operator==(const StereotypeApplication&, const StereotypeApplication&) = default;
};

/// Thrown by queries whose precondition on the argument element fails.
class ModelError : public std::invalid_argument {
 public:
  enum class Code { UnknownElement, NotAnAction, NotADomain };
  ModelError(Code code, const std::string& what) : std::invalid_argument(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Immutable, validated system model. Built only through ModelBuilder, so
/// every instance satisfies referential integrity, the stereotype/kind table,
/// an acyclic containment forest and an acyclic generalization relation.
class ModelGraph {
 public:
  ModelGraph() = default;

  // All four lists are sorted (by id, or by (specific, general)).
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Flow>& flows() const { return flows_; }
  const std::vector<Generalization>& generalizations() const { return generalizations_; }
  const std::vector<StereotypeApplication>& applications() const { return applications_; }

  const Element* find(const ElementId& id) const;
  const Flow* find_flow(const ElementId& id) const;
  const StereotypeApplication* application(const ElementId& id) const;
  bool contains(const ElementId& id) const { return find(id) != nullptr; }

  std::vector<const Element*> children(const ElementId& id) const;
  /// Direct generalization targets of a class.
  std::vector<ElementId> parents(const ElementId& id) const;

  friend bool operator==(const ModelGraph& a, const ModelGraph& b) {
    return a.elements_ == b.elements_ && a.flows_ == b.flows_ &&
           a.generalizations_ == b.generalizations_ && a.applications_ == b.applications_;
  }

 private:
  friend class ModelBuilder;

  std::vector<Element> elements_;
  std::vector<Flow> flows_;
  std::vector<Generalization> generalizations_;
  std::vector<StereotypeApplication> applications_;
  std::map<ElementId, std::size_t> element_index_;
  std::map<ElementId, std::size_t> flow_index_;
  std::map<ElementId, std::size_t> application_index_;
  std::multimap<ElementId, ElementId> children_;
};

/// Collects model parts and checks every structural invariant in build().
/// Diagnostics use rule ids `model.*`.
class ModelBuilder {
 public:
  ModelBuilder& add_element(Element e);
  ModelBuilder& add_element(std::string id, ElementKind kind, std::string name,
                            std::optional<std::string> owner = std::nullopt);
  ModelBuilder& add_flow(Flow f);
  /// Adds the FlowNode element and its Flow together.
  ModelBuilder& add_flow(std::string id, std::string name, std::string owner, std::string source,
                         std::string target, FlowFlavor flavor = FlowFlavor::ObjectFlow);
  ModelBuilder& add_generalization(std::string specific, std::string general);
  ModelBuilder& apply(StereotypeApplication a);
  ModelBuilder& apply(std::string element, Stereotype s, TagMap tags = {});

  Result<ModelGraph> build() const;

 private:
  std::vector<Element> elements_;
  std::vector<Flow> flows_;
  std::vector<Generalization> generalizations_;
  std::vector<StereotypeApplication> applications_;
};

struct AnnotatedFlow {
  const Flow* flow = nullptr;
  const StereotypeApplication* application = nullptr;
};

/// The application on `e`, or nullptr. Throws ModelError(UnknownElement).
const StereotypeApplication* stereotype_of(const ModelGraph& model, const ElementId& e);

/// Predicate/Function-annotated flows targeting `action`, ordered by flow id.
/// Throws ModelError(NotAnAction) unless `action` is an Action-stereotyped node.
std::vector<AnnotatedFlow> incoming_annotated_flows(const ModelGraph& model,
                                                    const ElementId& action);
std::vector<AnnotatedFlow> outgoing_annotated_flows(const ModelGraph& model,
                                                    const ElementId& action);

/// Type-stereotyped classes owned (transitively) by a Domain package,
/// ordered by (name, id). Throws ModelError(NotADomain).
std::vector<const Element*> types_in_domain(const ModelGraph& model, const ElementId& domain);

/// Elements transitively owned by `domain`, not descending into nested
/// Domain packages. Ordered by id.
std::vector<const Element*> elements_in_domain(const ModelGraph& model, const ElementId& domain);

/// Domain-stereotyped packages, ordered by (name, id).
std::vector<const Element*> domains(const ModelGraph& model);

/// Nearest enclosing Domain package (the element itself if it is one).
std::optional<ElementId> owning_domain(const ModelGraph& model, const ElementId& e);

/// `outer::inner::name`; unnamed elements contribute their id.
std::string qualified_name(const ModelGraph& model, const ElementId& e);

bool has_stereotype(const ModelGraph& model, const ElementId& e, Stereotype s);

}  // namespace mbplan::model
