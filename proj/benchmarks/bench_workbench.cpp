#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "pddlwb/planner.hpp"
#include "pddlwb/validator.hpp"
#include "pddlwb/workspace.hpp"

namespace {

using namespace pddlwb;

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(PDDLWB_FIXTURES_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A logistics instance with n packages shuttled from a to b by one truck.
pddl::ProblemAst shuttle_problem(int n) {
  pddl::ProblemAst p;
  p.name = "shuttle";
  p.domain_name = "minilog";
  p.objects = {{"trk", "truck"}, {"a", "location"}, {"b", "location"}};
  p.init.push_back({"at", {"trk", "a"}});
  for (int i = 0; i < n; ++i) {
    const std::string pkg = "pkg" + std::to_string(i);
    p.objects.push_back({pkg, "package"});
    p.init.push_back({"at", {pkg, "a"}});
    p.goal.push_back({true, {"at", {pkg, "b"}}});
  }
  return p;
}

pddl::Plan shuttle_plan(int n) {
  pddl::Plan plan;
  for (int i = 0; i < n; ++i) plan.steps.push_back({"load", {"pkg" + std::to_string(i), "trk", "a"}});
  plan.steps.push_back({"drive", {"trk", "a", "b"}});
  for (int i = 0; i < n; ++i) plan.steps.push_back({"unload", {"pkg" + std::to_string(i), "trk", "b"}});
  return plan;
}

void BM_ParseDomain(benchmark::State& state) {
  const std::string text = fixture("d1.pddl");
  for (auto _ : state) benchmark::DoNotOptimize(pddl::parse_domain(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseDomain);

void BM_PrintParseRoundTrip(benchmark::State& state) {
  const auto d = pddl::parse_domain(fixture("gripper.pddl"));
  for (auto _ : state) benchmark::DoNotOptimize(pddl::parse_domain(pddl::print_domain(d)));
}
BENCHMARK(BM_PrintParseRoundTrip);

void BM_CheckConsistency(benchmark::State& state) {
  const auto project = ws::project_from_pddl(pddl::parse_domain(fixture("d1.pddl")),
                                             {shuttle_problem(static_cast<int>(state.range(0)))});
  for (auto _ : state) benchmark::DoNotOptimize(ws::check_consistency(project));
}
BENCHMARK(BM_CheckConsistency)->Arg(1)->Arg(16)->Arg(128);

void BM_Validate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto d = pddl::parse_domain(fixture("d1.pddl"));
  const auto p = shuttle_problem(n);
  const auto plan = shuttle_plan(n);
  for (auto _ : state) benchmark::DoNotOptimize(val::validate(d, p, plan));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * plan.steps.size()));
}
BENCHMARK(BM_Validate)->RangeMultiplier(4)->Range(1, 64);

void BM_BfsPlan(benchmark::State& state) {
  const auto d = pddl::parse_domain(fixture("d1.pddl"));
  const auto p = shuttle_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(planner::bfs_plan(d, p));
}
BENCHMARK(BM_BfsPlan)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_BfsBlocks(benchmark::State& state) {
  const auto d = pddl::parse_domain(fixture("blocks.pddl"));
  const auto p = pddl::parse_problem(fixture("blocks-p1.pddl"));
  for (auto _ : state) benchmark::DoNotOptimize(planner::bfs_plan(d, p));
}
BENCHMARK(BM_BfsBlocks)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
