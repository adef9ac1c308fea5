#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "files.hpp"
#include "mbplan/cli.hpp"
#include "mbplan/fixtures.hpp"

using namespace mbplan;
namespace fs = std::filesystem;
using testing::read_text;
using testing::TempDir;
using testing::write_text;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fixture_dir(const std::string& name) { return fixtures::default_root() / name; }

std::string model_of(const std::string& name) { return (fixture_dir(name) / "model.pm1").string(); }
std::string instance_of(const std::string& name) { return (fixture_dir(name) / "instance.pi1").string(); }

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) out.push_back(fs::relative(e.path(), dir).string());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) n += line.find(needle) != std::string::npos;
  return n;
}

}  // namespace

TEST_CASE("validate") {
  auto clean = run({"validate", model_of("assemble-part")});
  CHECK(clean.code == cli::kOk);
  CHECK(clean.out.empty());
  CHECK(clean.err.empty());

  auto dup = run({"validate", model_of("neg-duplicate-type")});
  CHECK(dup.code == cli::kFindings);
  CHECK(count_lines_with(dup.err, "P02") == 1);
  CHECK(dup.err.find("error P02") != std::string::npos);

  auto json = run({"validate", model_of("neg-bad-domain-name"), "--json"});
  CHECK(json.code == cli::kFindings);
  CHECK(json.out.find("\"rule\": \"P01\"") != std::string::npos);

  auto disabled = run({"validate", model_of("neg-bad-domain-name"), "--rules", "-P01"});
  CHECK(disabled.code == cli::kOk);

  CHECK(run({"validate", "/nonexistent/model.pm1"}).code == cli::kInputError);
  CHECK(run({"validate", model_of("neg-dangling-flow")}).code == cli::kInputError);
  CHECK(run({"validate", model_of("assemble-part"), "--rules", "P99"}).code == cli::kInputError);
}

TEST_CASE("usage") {
  CHECK(run({}).code == cli::kInputError);
  CHECK(run({"frobnicate"}).code == cli::kInputError);
  CHECK(run({"solve", "only-one"}).code == cli::kInputError);
  auto help = run({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("generate") != std::string::npos);
  CHECK(run({"solve", "a", "b", "--cap", "0"}).code == cli::kInputError);
  CHECK(run({"solve", "a", "b", "--heuristic", "magic"}).code == cli::kInputError);
}

TEST_CASE("generate") {
  TempDir tmp;
  SUBCASE("case study with instance") {
    auto out = tmp / "gen";
    auto r = run({"generate", model_of("collar-screwing-2rivets"), "--instance",
                  instance_of("collar-screwing-2rivets"), "--out", out.string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(listing(out) == std::vector<std::string>{"domain.pddl", "problem.pddl"});
    const std::string domain = read_text(out / "domain.pddl");
    CHECK(domain.find("(:action MoveToNextRivet") != std::string::npos);
    const std::string problem = read_text(out / "problem.pddl");

    auto again = run({"generate", model_of("collar-screwing-2rivets"), "--instance",
                      instance_of("collar-screwing-2rivets"), "--out", out.string()});
    REQUIRE(again.code == cli::kOk);
    CHECK(read_text(out / "domain.pddl") == domain);
    CHECK(read_text(out / "problem.pddl") == problem);
    CHECK(listing(out).size() == 2);
  }
  SUBCASE("model only") {
    auto out = tmp / "only";
    REQUIRE(run({"generate", model_of("assemble-part"), "--out", out.string()}).code == cli::kOk);
    CHECK(listing(out) == std::vector<std::string>{"domain.pddl"});
  }
  SUBCASE("invalid model writes nothing") {
    auto out = tmp / "bad";
    CHECK(run({"generate", model_of("neg-duplicate-type"), "--out", out.string()}).code == cli::kFindings);
    CHECK_FALSE(fs::exists(out));
  }
  SUBCASE("failure leaves an existing directory unchanged") {
    auto out = tmp / "keep";
    fs::create_directories(out);
    write_text(out / "domain.pddl", "old");
    write_text(tmp / "bad.pi1", R"({"format_version":"1","problem":"p","goal":[]})");
    auto r = run({"generate", model_of("assemble-part"), "--instance", (tmp / "bad.pi1").string(), "--out",
                  out.string()});
    CHECK(r.code == cli::kFindings);
    CHECK(r.err.find("compile.empty-goal") != std::string::npos);
    CHECK(listing(out) == std::vector<std::string>{"domain.pddl"});
    CHECK(read_text(out / "domain.pddl") == "old");

    CHECK(run({"generate", model_of("assemble-part"), "--instance", (tmp / "missing.pi1").string(), "--out",
               out.string()})
              .code == cli::kInputError);
    CHECK(read_text(out / "domain.pddl") == "old");
  }
  SUBCASE("domain selection") {
    auto out = tmp / "sel";
    CHECK(run({"generate", model_of("assemble-part"), "--out", out.string(), "--domain", "nope"}).code ==
          cli::kFindings);
    CHECK(run({"generate", model_of("assemble-part"), "--out", out.string(), "--domain", "ASSEMBLY"}).code ==
          cli::kOk);
  }
}

TEST_CASE("solve and check") {
  TempDir tmp;
  const fs::path golden = fixture_dir("collar-screwing-6rivets") / "golden";
  const std::string d = (golden / "domain.pddl").string();
  const std::string p = (golden / "problem.pddl").string();

  auto plan_path = tmp / "plan.txt";
  auto r = run({"solve", d, p, "--out", plan_path.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out == read_text(plan_path));
  CHECK(r.out.find("; cost = 10") != std::string::npos);
  CHECK(count_lines_with(r.out, "ChangeEndEffector") == 1);
  CHECK(run({"solve", d, p, "--heuristic", "hmax"}).out == r.out);

  auto ok = run({"check", d, p, plan_path.string()});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out == "accepted cost = 10\n");

  write_text(tmp / "bad.txt", "(ScrewCollarTypeB r2 eB)\n");
  auto rej = run({"check", d, p, (tmp / "bad.txt").string()});
  CHECK(rej.code == cli::kFindings);
  CHECK(rej.err.rfind("rejected at step 1", 0) == 0);
  CHECK(rej.err.find("unmet (Mounted eB)") != std::string::npos);

  write_text(tmp / "garbled.txt", "(ScrewCollarTypeB r2\n");
  CHECK(run({"check", d, p, (tmp / "garbled.txt").string()}).code == cli::kInputError);
  CHECK(run({"check", d, p, (tmp / "none.txt").string()}).code == cli::kInputError);

  SUBCASE("unsolvable and resource limit") {
    write_text(tmp / "d.pddl", "(define (domain d) (:predicates (g) (h)) (:action a :parameters () :effect (h)))");
    write_text(tmp / "p.pddl", "(define (problem p) (:domain d) (:init) (:goal (g)))");
    CHECK(run({"solve", (tmp / "d.pddl").string(), (tmp / "p.pddl").string()}).code == cli::kUnsolvable);
    CHECK(run({"solve", d, p, "--cap", "1"}).code == cli::kResourceLimit);
    CHECK_FALSE(fs::exists(tmp / "never.txt"));
    CHECK(run({"solve", d, p, "--cap", "1", "--out", (tmp / "never.txt").string()}).code ==
          cli::kResourceLimit);
    CHECK_FALSE(fs::exists(tmp / "never.txt"));
  }
  SUBCASE("parse errors exit 1") {
    write_text(tmp / "broken.pddl", "(define (domain d) (:predicates (g)");
    CHECK(run({"solve", (tmp / "broken.pddl").string(), p}).code == cli::kInputError);
  }
}

TEST_CASE("external planner") {
  TempDir tmp;
  const fs::path golden = fixture_dir("collar-screwing-2rivets") / "golden";
  const std::string d = (golden / "domain.pddl").string();
  const std::string p = (golden / "problem.pddl").string();

  write_text(tmp / "canned.txt",
             "0: (ScrewCollarTypeA r1 eA)\n1: (MoveToNextRivet r1 r2)\n2: (ChangeEndEffector eA eB)\n"
             "3: (ScrewCollarTypeB r2 eB)\n");
  auto r = run({"solve", d, p, "--external-planner", "cp '" + (tmp / "canned.txt").string() + "' {plan}"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("(MoveToNextRivet r1 r2)\n(ChangeEndEffector eA eB)") != std::string::npos);
  CHECK(r.out.find("; cost = 4") != std::string::npos);

  auto args = run({"solve", d, p, "--external-planner",
                   "test -f {domain} && test -f {problem} && cp '" + (tmp / "canned.txt").string() + "' {plan}"});
  CHECK(args.code == cli::kOk);

  write_text(tmp / "wrong.txt", "(ScrewCollarTypeB r2 eB)\n");
  auto bad = run({"solve", d, p, "--external-planner", "cp '" + (tmp / "wrong.txt").string() + "' {plan}"});
  CHECK(bad.code == cli::kFindings);

  CHECK(run({"solve", d, p, "--external-planner", "true"}).code == cli::kUnsolvable);
}

TEST_CASE("fmt and parse") {
  TempDir tmp;
  const fs::path golden = fixture_dir("assemble-part") / "golden";
  write_text(tmp / "messy.pddl", "(define (domain assembly)(:requirements :typing)(:types part tool)"
                                 "(:predicates (assembled ?p - part)(available ?t - tool))"
                                 "(:action assemble-part :parameters (?p - part ?t - tool)"
                                 " :precondition (available ?t) :effect (assembled ?p)))");
  auto f = run({"fmt", (tmp / "messy.pddl").string()});
  CHECK(f.code == cli::kOk);
  CHECK(f.out == read_text(golden / "domain.pddl"));

  auto pf = run({"fmt", (golden / "problem.pddl").string(), "--domain", (golden / "domain.pddl").string()});
  CHECK(pf.code == cli::kOk);
  CHECK(pf.out == read_text(golden / "problem.pddl"));

  CHECK(run({"fmt", (tmp / "messy.pddl").string(), "--out", (tmp / "clean.pddl").string()}).code == cli::kOk);
  CHECK(read_text(tmp / "clean.pddl") == f.out);

  write_text(tmp / "junk.pddl", "hello");
  CHECK(run({"fmt", (tmp / "junk.pddl").string()}).code == cli::kInputError);

  auto ok = run({"parse", (golden / "domain.pddl").string(), (golden / "problem.pddl").string()});
  CHECK(ok.code == cli::kOk);
  CHECK(count_lines_with(ok.out, ": ok") == 2);
  write_text(tmp / "bad.pddl", "(define (domain d) (:predicates (p))");
  auto bad = run({"parse", (tmp / "bad.pddl").string()});
  CHECK(bad.code == cli::kInputError);
  CHECK(bad.err.find("pddl.syntax") != std::string::npos);
}

TEST_CASE("pipeline on every positive fixture") {
  for (const auto& fx : fixtures::fixture_catalog()) {
    if (fx.negative()) continue;
    CAPTURE(fx.name);
    TempDir tmp;
    auto out = tmp / "out";
    REQUIRE(run({"validate", fx.model.string()}).code == cli::kOk);
    REQUIRE(run({"generate", fx.model.string(), "--instance", fx.instance->string(), "--out", out.string()}).code ==
            cli::kOk);
    const std::string d = (out / "domain.pddl").string();
    const std::string p = (out / "problem.pddl").string();
    auto plan = tmp / "plan.txt";
    auto s = run({"solve", d, p, "--out", plan.string()});
    REQUIRE(s.code == cli::kOk);
    auto c = run({"check", d, p, plan.string()});
    CHECK(c.code == cli::kOk);
    CHECK(c.out == "accepted cost = " + fx.get("cost").value_or("?") + "\n");
  }
}
