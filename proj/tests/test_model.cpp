#include <doctest.h>

#include <algorithm>

#include "generators.hpp"
#include "mbplan/model.hpp"

using namespace mbplan;
using namespace mbplan::model;

namespace {

std::vector<std::string> rules_of(const Diagnostics& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d.rule);
  return out;
}

bool has_rule(const Diagnostics& ds, const std::string& rule) {
  auto r = rules_of(ds);
  return std::find(r.begin(), r.end(), rule) != r.end();
}

/// MoveToNextRivet with its flows. Ids are chosen so that id order differs
/// from insertion order.
ModelBuilder rivet_builder() {
  ModelBuilder b;
  b.add_element("dom", ElementKind::Package, "CollarScrewing");
  b.apply("dom", Stereotype::Domain);
  b.add_element("rivet", ElementKind::Class, "Rivet", "dom");
  b.apply("rivet", Stereotype::Type);
  b.add_element("act", ElementKind::Activity, "Process", "dom");
  b.add_element("move", ElementKind::ActionNode, "MoveToNextRivet", "act");
  b.apply("move", Stereotype::Action,
          {{"parameters", ParameterList{{"?From", ElementId{"rivet"}}, {"?To", ElementId{"rivet"}}}}});
  b.add_flow("f3", "EnergySupply", "act", "act", "move", FlowFlavor::ControlFlow);
  b.apply("f3", Stereotype::Predicate);
  b.add_flow("f1", "CollarScrewed", "act", "act", "move", FlowFlavor::ControlFlow);
  b.apply("f1", Stereotype::Predicate);
  b.add_flow("f2", "RivetDistanceInformation", "act", "act", "move");
  b.apply("f2", Stereotype::Function);
  b.add_flow("f4", "MovedToNextRivet", "act", "move", "act", FlowFlavor::ControlFlow);
  b.apply("f4", Stereotype::Predicate);
  b.add_flow("f5", "Unannotated", "act", "move", "act", FlowFlavor::ControlFlow);
  return b;
}

}  // namespace

TEST_CASE("stereotype and element kind compatibility, all 25 pairs") {
  for (Stereotype st : kAllStereotypes) {
    for (ElementKind kind : kAllKinds) {
      CAPTURE(to_string(st));
      CAPTURE(to_string(kind));
      ModelBuilder b;
      b.add_element("pkg", ElementKind::Package, "P");
      b.add_element("act", ElementKind::Activity, "A", "pkg");
      b.add_element("n1", ElementKind::ActionNode, "N1", "act");
      b.add_element("n2", ElementKind::ActionNode, "N2", "act");
      std::string target;
      switch (kind) {
        case ElementKind::Package: target = "pkg"; break;
        case ElementKind::Activity: target = "act"; break;
        case ElementKind::ActionNode: target = "n1"; break;
        case ElementKind::Class:
          b.add_element("cls", ElementKind::Class, "C", "pkg");
          target = "cls";
          break;
        case ElementKind::FlowNode:
          b.add_flow("fl", "F", "act", "n1", "n2");
          target = "fl";
          break;
      }
      b.apply(target, st);
      auto built = b.build();
      const bool allowed = (st == Stereotype::Domain && kind == ElementKind::Package) ||
                           (st == Stereotype::Type && kind == ElementKind::Class) ||
                           (st == Stereotype::Predicate && kind == ElementKind::FlowNode) ||
                           (st == Stereotype::Function && kind == ElementKind::FlowNode) ||
                           (st == Stereotype::Action && kind == ElementKind::ActionNode);
      CHECK(built.ok() == allowed);
      if (!allowed) CHECK(has_rule(built.diagnostics(), "model.incompatible-stereotype"));
    }
  }
}

TEST_CASE("stereotype_of") {
  auto m = rivet_builder().build();
  REQUIRE(m.ok());
  const auto* app = stereotype_of(*m, ElementId{"move"});
  REQUIRE(app != nullptr);
  CHECK(app->stereotype == Stereotype::Action);
  CHECK(stereotype_of(*m, ElementId{"act"}) == nullptr);
  CHECK_THROWS_AS(stereotype_of(*m, ElementId{"nope"}), ModelError);
}

TEST_CASE("annotated flows of MoveToNextRivet") {
  auto m = rivet_builder().build();
  REQUIRE(m.ok());
  auto in = incoming_annotated_flows(*m, ElementId{"move"});
  REQUIRE(in.size() == 3);
  CHECK(in[0].flow->id.value == "f1");
  CHECK(in[1].flow->id.value == "f2");
  CHECK(in[2].flow->id.value == "f3");
  CHECK(in[1].application->stereotype == Stereotype::Function);

  auto out = outgoing_annotated_flows(*m, ElementId{"move"});
  REQUIRE(out.size() == 1);  // f5 carries no stereotype
  CHECK(m->find(out[0].flow->id)->name == "MovedToNextRivet");

  CHECK_THROWS_AS(incoming_annotated_flows(*m, ElementId{"rivet"}), ModelError);
  try {
    outgoing_annotated_flows(*m, ElementId{"act"});
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(e.code() == ModelError::Code::NotAnAction);
  }
}

TEST_CASE("action without flows") {
  ModelBuilder b;
  b.add_element("pkg", ElementKind::Package, "P");
  b.add_element("act", ElementKind::Activity, "A", "pkg");
  b.add_element("n", ElementKind::ActionNode, "N", "act");
  b.apply("n", Stereotype::Action);
  auto m = b.build();
  REQUIRE(m.ok());
  CHECK(incoming_annotated_flows(*m, ElementId{"n"}).empty());
  CHECK(outgoing_annotated_flows(*m, ElementId{"n"}).empty());
}

TEST_CASE("types_in_domain") {
  ModelBuilder b;
  b.add_element("dom", ElementKind::Package, "assembly");
  b.apply("dom", Stereotype::Domain);
  b.add_element("t", ElementKind::Class, "tool", "dom");
  b.apply("t", Stereotype::Type);
  b.add_element("p", ElementKind::Class, "part", "dom");
  b.apply("p", Stereotype::Type);
  b.add_element("plain", ElementKind::Class, "helper", "dom");
  b.add_element("sub", ElementKind::Package, "sub", "dom");
  b.add_element("nested", ElementKind::Class, "fixture", "sub");
  b.apply("nested", Stereotype::Type);
  auto m = b.build();
  REQUIRE(m.ok());

  std::vector<std::string> names;
  for (const auto* e : types_in_domain(*m, ElementId{"dom"})) names.push_back(e->name);
  CHECK(names == std::vector<std::string>{"fixture", "part", "tool"});
  CHECK_THROWS_AS(types_in_domain(*m, ElementId{"sub"}), ModelError);
  CHECK(qualified_name(*m, ElementId{"nested"}) == "assembly::sub::fixture");
  CHECK(owning_domain(*m, ElementId{"nested"}) == ElementId{"dom"});
}

TEST_CASE("domain with only plain classes has no types") {
  ModelBuilder b;
  b.add_element("dom", ElementKind::Package, "d");
  b.apply("dom", Stereotype::Domain);
  b.add_element("c", ElementKind::Class, "c", "dom");
  auto m = b.build();
  REQUIRE(m.ok());
  CHECK(types_in_domain(*m, ElementId{"dom"}).empty());
}

TEST_CASE("structural errors") {
  SUBCASE("duplicate and empty ids") {
    ModelBuilder b;
    b.add_element("a", ElementKind::Package, "A");
    b.add_element("a", ElementKind::Package, "B");
    b.add_element("", ElementKind::Package, "C");
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    CHECK(has_rule(m.diagnostics(), "model.duplicate-id"));
    CHECK(has_rule(m.diagnostics(), "model.empty-id"));
  }
  SUBCASE("owner admission") {
    ModelBuilder b;
    b.add_element("c", ElementKind::Class, "C");
    b.add_element("p", ElementKind::Package, "P", "c");
    b.add_element("n", ElementKind::ActionNode, "N");
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    CHECK(has_rule(m.diagnostics(), "model.bad-owner"));
  }
  SUBCASE("containment cycle") {
    ModelBuilder b;
    b.add_element("p", ElementKind::Package, "P", "q");
    b.add_element("q", ElementKind::Package, "Q", "p");
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    CHECK(has_rule(m.diagnostics(), "model.containment-cycle"));
  }
  SUBCASE("dangling flow endpoint") {
    ModelBuilder b;
    b.add_element("p", ElementKind::Package, "P");
    b.add_element("act", ElementKind::Activity, "A", "p");
    b.add_element("n", ElementKind::ActionNode, "N", "act");
    b.add_flow("f", "F", "act", "n", "ghost");
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    CHECK(has_rule(m.diagnostics(), "model.dangling-ref"));
  }
  SUBCASE("flow endpoints in another activity") {
    ModelBuilder b;
    b.add_element("p", ElementKind::Package, "P");
    b.add_element("a1", ElementKind::Activity, "A1", "p");
    b.add_element("a2", ElementKind::Activity, "A2", "p");
    b.add_element("n1", ElementKind::ActionNode, "N1", "a1");
    b.add_element("n2", ElementKind::ActionNode, "N2", "a2");
    b.add_flow("f", "F", "a1", "n1", "n2");
    b.add_flow("g", "G", "a1", "n1", "n1");
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    auto rules = rules_of(m.diagnostics());
    CHECK(std::count(rules.begin(), rules.end(), "model.flow-endpoint") == 2);
  }
  SUBCASE("flow without node") {
    ModelBuilder b;
    b.add_element("p", ElementKind::Package, "P");
    b.add_element("act", ElementKind::Activity, "A", "p");
    b.add_element("n", ElementKind::ActionNode, "N", "act");
    b.add_flow(Flow{ElementId{"f"}, FlowFlavor::ControlFlow, ElementId{"act"}, ElementId{"n"}});
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    CHECK(has_rule(m.diagnostics(), "model.flow-without-node"));
  }
  SUBCASE("generalization cycle and kinds") {
    ModelBuilder b;
    b.add_element("p", ElementKind::Package, "P");
    b.add_element("a", ElementKind::Class, "A", "p");
    b.add_element("b", ElementKind::Class, "B", "p");
    b.add_generalization("a", "b");
    b.add_generalization("b", "a");
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    CHECK(has_rule(m.diagnostics(), "model.generalization-cycle"));
    b.add_generalization("a", "p");
    auto m2 = b.build();
    REQUIRE_FALSE(m2.ok());
    CHECK(has_rule(m2.diagnostics(), "model.generalization-kind"));
  }
  SUBCASE("two applications on one element") {
    ModelBuilder b;
    b.add_element("c", ElementKind::Class, "C");
    b.apply("c", Stereotype::Type);
    b.apply("c", Stereotype::Type);
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    CHECK(has_rule(m.diagnostics(), "model.duplicate-application"));
  }
  SUBCASE("tag references must resolve") {
    ModelBuilder b;
    b.add_element("p", ElementKind::Package, "P");
    b.add_element("act", ElementKind::Activity, "A", "p");
    b.add_element("n", ElementKind::ActionNode, "N", "act");
    b.apply("n", Stereotype::Action, {{"parameters", ParameterList{{"?x", ElementId{"ghost"}}}}});
    auto m = b.build();
    REQUIRE_FALSE(m.ok());
    CHECK(has_rule(m.diagnostics(), "model.dangling-ref"));
  }
}

TEST_CASE("built graphs are acyclic and flow queries partition annotated flows") {
  testing::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    ModelGraph m = testing::random_valid_model(rng);
    // every annotated flow is incoming for at most one action and outgoing for at most one
    std::map<std::string, int> in, out;
    for (const auto& e : m.elements()) {
      if (!has_stereotype(m, e.id, Stereotype::Action)) continue;
      for (const auto& f : incoming_annotated_flows(m, e.id)) ++in[f.flow->id.value];
      for (const auto& f : outgoing_annotated_flows(m, e.id)) ++out[f.flow->id.value];
    }
    for (const auto& f : m.flows()) {
      if (m.application(f.id) == nullptr) continue;
      const bool boundary_source = m.find(f.source)->kind == ElementKind::Activity;
      const bool boundary_target = m.find(f.target)->kind == ElementKind::Activity;
      CHECK(in[f.id.value] == (boundary_target ? 0 : 1));
      CHECK(out[f.id.value] == (boundary_source ? 0 : 1));
    }
    // containment forest: walking owners terminates
    for (const auto& e : m.elements()) {
      std::size_t steps = 0;
      for (auto cur = e.owner; cur; cur = m.find(*cur)->owner) REQUIRE(++steps <= m.elements().size());
    }
  }
}
