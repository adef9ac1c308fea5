// One line per criterion: `AC<n> PASS|FAIL <title> (<seconds> s, limit <limit> s) <detail>`.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "files.hpp"
#include "generators.hpp"
#include "mbplan/cli.hpp"
#include "mbplan/compiler.hpp"
#include "mbplan/fixtures.hpp"
#include "mbplan/ingest.hpp"
#include "mbplan/names.hpp"
#include "mbplan/pddl.hpp"
#include "mbplan/planner.hpp"
#include "mbplan/profile.hpp"
#include "oracles.hpp"

using namespace mbplan;
namespace fs = std::filesystem;

namespace {

constexpr double kLimitAc1 = 1.0;
constexpr double kLimitAc2 = 1.0;
constexpr double kLimitAc3 = 30.0;
constexpr double kLimitAc4 = 60.0;
constexpr double kLimitAc5 = 10.0;
constexpr double kLimitAc6 = 10.0;

constexpr int kRoundTripAsts = 1000;
constexpr int kRoundTripModels = 1000;
constexpr int kOracleTasks = 200;
constexpr std::size_t kOracleStateLimit = 5000;

/// Failure detail, empty when the criterion holds.
using Check = std::function<std::string()>;

struct Criterion {
  const char* id;
  const char* title;
  double limit;
  Check check;
};

const char* kAssembleAction = R"((:action assemble-part
 :parameters (?p - part ?t - tool)
 :precondition (available ?t)
 :effect (assembled ?p)))";

const char* kMoveAction = R"((:action MoveToNextRivet
   :parameters (?From - Rivet ?To - Rivet)
   :precondition
        (and
            (CollarScrewed ?From)
            (EnergySupply)
        )
    :effect
        (and
            (MovedToNextRivet ?To )
            (increase
               (total-cost)
               (RivetDistanceInformation ?From ?To))
        )
))";

std::optional<fixtures::Fixture> find_fixture(const std::string& name) {
  for (auto& f : fixtures::fixture_catalog()) {
    if (f.name == name) return f;
  }
  return std::nullopt;
}

std::string render_text(const Diagnostics& ds) {
  std::ostringstream os;
  render_all(os, ds);
  return os.str();
}

/// Compiles the fixture's single domain; sets `error` on failure.
std::optional<pddl::PddlDomain> compile_fixture(const fixtures::Fixture& f, std::string& error) {
  auto m = ingest::load_model(testing::read_text(f.model));
  if (!m) {
    error = render_text(m.diagnostics());
    return std::nullopt;
  }
  auto ds = model::domains(*m);
  if (ds.size() != 1) {
    error = f.name + ": expected one domain";
    return std::nullopt;
  }
  auto d = compiler::compile_domain(*m, ds[0]->id);
  if (!d) {
    error = render_text(d.diagnostics());
    return std::nullopt;
  }
  return std::move(d).value();
}

/// Tokens of the `(:action name ...)` block inside printed domain text.
std::vector<std::string> action_tokens(const std::string& domain_text, const std::string& name) {
  auto toks = pddl::tokens(domain_text);
  for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
    if (toks[i] != "(" || toks[i + 1] != ":action" || toks[i + 2] != name) continue;
    int depth = 0;
    for (std::size_t j = i; j < toks.size(); ++j) {
      depth += toks[j] == "(" ? 1 : toks[j] == ")" ? -1 : 0;
      if (depth == 0) return {toks.begin() + static_cast<std::ptrdiff_t>(i), toks.begin() + static_cast<std::ptrdiff_t>(j) + 1};
    }
  }
  return {};
}

std::string ac1() {
  std::string error;
  auto assemble = find_fixture("assemble-part");
  auto collar = find_fixture("collar-screwing-6rivets");
  if (!assemble || !collar) return "fixture missing";
  auto d1 = compile_fixture(*assemble, error);
  if (!d1) return error;
  auto d5 = compile_fixture(*collar, error);
  if (!d5) return error;
  if (d1->actions.size() != 1) return "assemble-part domain has " + std::to_string(d1->actions.size()) + " actions";
  if (action_tokens(pddl::print_domain(*d1), "assemble-part") != pddl::tokens(kAssembleAction)) {
    return "assemble-part differs from the reference action";
  }
  if (action_tokens(pddl::print_domain(*d5), "MoveToNextRivet") != pddl::tokens(kMoveAction)) {
    return "MoveToNextRivet differs from the reference action";
  }
  return {};
}

std::string ac2() {
  struct Row {
    const char* name;
    bool valid;
  };
  const Row table[] = {
      {"d", true},          {"Robot_1", true},        {"", false},       {"2fast", false},
      {"my-domain", false}, {"assembly", true},       {"A", true},       {"_x", false},
      {"x_", true},         {"CollarScrewing", true}, {"a b", false},    {"a.b", false},
      {"Z9", true},         {"9Z", false},            {"über", false},   {"a-", false},
      {"abc_DEF_123", true}, {"?x", false},           {"x?", false},     {"domain", true},
  };
  for (const auto& r : table) {
    if (is_valid_domain_name(r.name) != r.valid) return std::string("name '") + r.name + "' misclassified";
    if (testing::domain_name_oracle(r.name) != r.valid) return std::string("oracle disagrees on '") + r.name + "'";
  }
  const auto p02 = profile::RuleSet::none().enable("P02");
  for (const auto& f : fixtures::fixture_catalog()) {
    auto m = ingest::load_model(testing::read_text(f.model));
    if (!m) continue;  // dangling-flow fixture fails before validation
    auto findings = profile::validate(*m, p02);
    const bool want = f.name == "neg-duplicate-type";
    if (want && findings.size() != 1) return f.name + ": expected one P02 finding, got " + std::to_string(findings.size());
    if (want && findings[0].message.find("'tool'") == std::string::npos) return f.name + ": finding does not name 'tool'";
    if (!want && !findings.empty()) return f.name + ": unexpected P02 finding";
  }
  return {};
}

std::string ac3() {
  testing::Rng rng(2024);
  for (int i = 0; i < kRoundTripAsts; ++i) {
    pddl::PddlDomain d = testing::random_domain(rng);
    auto back = pddl::parse_domain(pddl::print_domain(d));
    if (!back || !(*back == d)) return "domain AST #" + std::to_string(i) + " does not round-trip";
    pddl::PddlProblem p = testing::random_problem(d, rng);
    auto pback = pddl::parse_problem(pddl::print_problem(p), &d);
    if (!pback || !(*pback == p)) return "problem AST #" + std::to_string(i) + " does not round-trip";
  }
  for (int i = 0; i < kRoundTripModels; ++i) {
    model::ModelGraph m = testing::random_valid_model(rng);
    if (has_errors(profile::validate(m, profile::RuleSet::all(), profile::Context::Generation))) {
      return "generated model #" + std::to_string(i) + " does not validate";
    }
    for (const auto* dom : model::domains(m)) {
      auto d = compiler::compile_domain(m, dom->id);
      if (!d) return "model #" + std::to_string(i) + ": " + render_text(d.diagnostics());
      if (!pddl::parse_domain(pddl::print_domain(*d))) return "model #" + std::to_string(i) + " does not reparse";
    }
  }
  return {};
}

std::string ac4() {
  testing::Rng rng(4242);
  int done = 0, solvable = 0, attempts = 0;
  while (done < kOracleTasks) {
    if (++attempts > 10 * kOracleTasks) return "could not draw enough small tasks";
    testing::TaskShape shape;
    shape.atoms = 8 + static_cast<std::size_t>(attempts % 5);
    shape.actions = 15 + static_cast<std::size_t>(attempts % 25);
    planner::GroundTask t = testing::random_task(rng, shape);
    auto oracle = testing::exhaustive_search(t, kOracleStateLimit);
    if (!oracle.complete) continue;
    auto r = planner::solve(t);
    const bool solved = r.status == planner::SolveStatus::Solved;
    if (solved != oracle.optimal_cost.has_value()) return "task #" + std::to_string(done) + ": solvability differs";
    if (solved && r.plan.total_cost != *oracle.optimal_cost) {
      return "task #" + std::to_string(done) + ": cost " + format_number(r.plan.total_cost) + " vs oracle " +
             format_number(*oracle.optimal_cost);
    }
    solvable += solved;
    ++done;
  }
  if (solvable < kOracleTasks / 5) return "too few solvable tasks (" + std::to_string(solvable) + ")";
  return {};
}

std::string ac5() {
  std::string error;
  auto f = find_fixture("collar-screwing-6rivets");
  if (!f) return "fixture missing";
  auto d = compile_fixture(*f, error);
  if (!d) return error;
  auto data = compiler::load_instance(testing::read_text(*f->instance));
  if (!data) return render_text(data.diagnostics());
  auto p = compiler::compile_problem(*d, *data, data->problem_name);
  if (!p) return render_text(p.diagnostics());
  auto t = planner::ground(*d, *p);
  if (!t) return render_text(t.diagnostics());

  auto r = planner::solve(*t);
  if (r.status != planner::SolveStatus::Solved) return "not solved";
  auto oracle = testing::exhaustive_search(*t);
  if (!oracle.complete || !oracle.optimal_cost) return "oracle incomplete";
  if (r.plan.total_cost != *oracle.optimal_cost) {
    return "cost " + format_number(r.plan.total_cost) + " vs oracle " + format_number(*oracle.optimal_cost);
  }
  auto is_change = [](const planner::GroundAction& a) { return a.schema == "ChangeEndEffector"; };
  auto by_count = testing::cost_by_count(*t, is_change);
  if (!by_count[1] || *by_count[1] != *oracle.optimal_cost) return "one change is not optimal by the oracle";
  if (by_count[0] || (by_count[2] && *by_count[2] <= *by_count[1])) return "one change is not strictly optimal";

  std::size_t changes = 0;
  std::string screw_sequence;
  for (std::size_t i : r.plan.steps) {
    const auto& a = t->actions[i];
    changes += is_change(a);
    if (a.schema.rfind("ScrewCollarType", 0) == 0) {
      char kind = a.schema.back();
      if (screw_sequence.empty() || screw_sequence.back() != kind) screw_sequence += kind;
    }
  }
  if (changes != 1) return "plan has " + std::to_string(changes) + " end-effector changes";
  if (screw_sequence.size() != 2) return "rivet types interleave: " + screw_sequence;
  if (auto rep = planner::validate_plan(*t, r.plan); !rep.accepted) return "plan rejected: " + rep.reason;
  return {};
}

struct Run {
  std::vector<int> codes;
  std::vector<std::string> bytes;
};

Run pipeline(const fixtures::Fixture& f, const fs::path& dir) {
  Run run;
  auto step = [&](std::vector<std::string> args) {
    std::ostringstream out, err;
    run.codes.push_back(cli::run(args, out, err));
    run.bytes.push_back(out.str());
  };
  const fs::path out = dir / "out";
  step({"validate", f.model.string()});
  step({"generate", f.model.string(), "--instance", f.instance->string(), "--out", out.string()});
  step({"solve", (out / "domain.pddl").string(), (out / "problem.pddl").string(), "--out", (dir / "plan.txt").string()});
  step({"check", (out / "domain.pddl").string(), (out / "problem.pddl").string(), (dir / "plan.txt").string()});
  for (const char* name : {"out/domain.pddl", "out/problem.pddl", "plan.txt"}) {
    run.bytes.push_back(testing::read_text(dir / name));
  }
  return run;
}

std::string ac6() {
  int positives = 0;
  for (const auto& f : fixtures::fixture_catalog()) {
    if (f.negative()) continue;
    ++positives;
    testing::TempDir a, b;
    Run first = pipeline(f, a.path());
    Run second = pipeline(f, b.path());
    const char* stages[] = {"validate", "generate", "solve", "check"};
    for (std::size_t i = 0; i < first.codes.size(); ++i) {
      if (first.codes[i] != 0 || second.codes[i] != 0) return f.name + ": " + stages[i] + " exited non-zero";
    }
    // generate echoes the per-run output paths
    first.bytes[1].clear();
    second.bytes[1].clear();
    if (first.bytes != second.bytes) return f.name + ": runs differ";
  }
  if (positives == 0) return "no positive fixtures";
  return {};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"AC1", "golden emission of the reference actions", kLimitAc1, ac1},
      {"AC2", "domain-name rule and duplicate-type detection", kLimitAc2, ac2},
      {"AC3", "round-trip of random ASTs and random valid models", kLimitAc3, ac3},
      {"AC4", "planner cost equals exhaustive search", kLimitAc4, ac4},
      {"AC5", "six-rivet case: single reconfiguration, contiguous types", kLimitAc5, ac5},
      {"AC6", "pipeline exits 0 at every stage, byte-deterministic", kLimitAc6, ac6},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = c.check();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (detail.empty() && seconds >= c.limit) detail = "too slow";
    const bool pass = detail.empty();
    failures += !pass;
    char timing[64];
    std::snprintf(timing, sizeof timing, "(%.3f s, limit %.0f s)", seconds, c.limit);
    std::cout << c.id << (pass ? " PASS " : " FAIL ") << c.title << " " << timing;
    if (!pass) std::cout << " " << detail;
    std::cout << "\n";
  }
  return failures == 0 ? 0 : 1;
}
