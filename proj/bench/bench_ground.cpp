#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "mbplan/pddl.hpp"
#include "mbplan/planner.hpp"

using namespace mbplan;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const pddl::PddlDomain& collar_domain() {
  static const pddl::PddlDomain d =
      pddl::parse_domain(read_file(MBPLAN_FIXTURE_DIR "/collar-screwing-6rivets/golden/domain.pddl")).value();
  return d;
}

/// n rivets on a line, alternating A/B, unit spacing.
pddl::PddlProblem collar_problem(int n) {
  std::ostringstream p;
  p << "(define (problem rivets) (:domain CollarScrewing) (:objects";
  for (int i = 1; i <= n; ++i) p << " r" << i << (i % 2 ? " - RivetA" : " - RivetB");
  p << " eA - EffectorA eB - EffectorB)\n(:init (Mounted eA) (MovedToNextRivet r1) (EnergySupply) (= (ToolChangeCost) 3)";
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) p << " (= (RivetDistanceInformation r" << i << " r" << j << ") " << (i > j ? i - j : j - i) << ")";
  }
  p << ")\n(:goal (and";
  for (int i = 1; i <= n; ++i) p << " (CollarScrewed r" << i << ")";
  p << ")) (:metric minimize (total-cost)))";
  return pddl::parse_problem(p.str(), &collar_domain()).value();
}

void BM_GroundParallel(benchmark::State& state) {
  const auto problem = collar_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(planner::ground(collar_domain(), problem));
}

void BM_GroundSerial(benchmark::State& state) {
  const auto problem = collar_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(planner::ground_serial(collar_domain(), problem));
}

void BM_Solve(benchmark::State& state, planner::Heuristic h) {
  const auto task = planner::ground(collar_domain(), collar_problem(static_cast<int>(state.range(0)))).value();
  std::size_t expanded = 0;
  for (auto _ : state) {
    auto r = planner::solve(task, {1'000'000, h});
    expanded = r.expanded;
    benchmark::DoNotOptimize(r);
  }
  state.counters["expanded"] = static_cast<double>(expanded);
}

}  // namespace

BENCHMARK(BM_GroundParallel)->Arg(20)->Arg(80)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GroundSerial)->Arg(20)->Arg(80)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, dijkstra, planner::Heuristic::None)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, hmax, planner::Heuristic::HMax)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
