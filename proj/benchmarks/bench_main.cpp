#include <benchmark/benchmark.h>

#include "halftsp/degreecut.hpp"
#include "halftsp/oracle.hpp"
#include "halftsp/pipeline.hpp"

using namespace halftsp;

static void BM_MinCuts(benchmark::State& state) {
  const auto g = build_support_graph(generate_instance("envelope", static_cast<int>(state.range(0)), 0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_min_cuts(g));
  state.SetLabel("n=" + std::to_string(g.n));
}
BENCHMARK(BM_MinCuts)->Arg(3)->Arg(4)->Arg(5);

static void BM_FitLambda(benchmark::State& state) {
  const auto inst = generate_instance("k5_degree", static_cast<int>(state.range(0)), 0);
  const auto g = build_support_graph(inst);
  Multigraph mg;
  mg.n = g.n;
  for (const auto& e : g.edges) mg.add_edge(e.u, e.v);
  const std::vector<double> target(mg.m(), (g.n - 1.0) / mg.m());
  for (auto _ : state) benchmark::DoNotOptimize(fit_lambda(mg, target));
}
BENCHMARK(BM_FitLambda)->Arg(6)->Arg(10)->Arg(14);

static void BM_HierarchicalSample(benchmark::State& state) {
  const auto prepared = prepare_instance(generate_instance("cycle_chain", static_cast<int>(state.range(0)), 0));
  Rng rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(sample_hierarchical_tree(prepared.model, rng));
}
BENCHMARK(BM_HierarchicalSample)->Arg(2)->Arg(4)->Arg(8);

static void BM_RunOJoin(benchmark::State& state) {
  const auto inst = generate_instance("envelope", 4, 0);
  RunConfig config;
  config.generator = "envelope:4";
  config.samples = 200;
  config.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_ojoin(inst, config));
  state.SetItemsProcessed(state.iterations() * config.samples);
}
BENCHMARK(BM_RunOJoin)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_ExactOracle(benchmark::State& state) {
  const auto prepared = prepare_instance(generate_instance("cycle_chain", static_cast<int>(state.range(0)), 0));
  ExactOptions opts;
  opts.check_feasibility = false;
  for (auto _ : state) benchmark::DoNotOptimize(exact_pipeline_expectations(prepared, ChargingParams{}, opts));
}
BENCHMARK(BM_ExactOracle)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_DegreeCutModel(benchmark::State& state) {
  const auto g = build_support_graph(generate_instance("k5_degree", static_cast<int>(state.range(0)), 0));
  const auto dec = decompose_matching(g, degreecut_nu(g));
  for (auto _ : state) benchmark::DoNotOptimize(fit_degreecut_model(g, dec.matchings.front()));
}
BENCHMARK(BM_DegreeCutModel)->Arg(5)->Arg(8)->Arg(11)->Unit(benchmark::kMillisecond);

static void BM_MinTJoin(benchmark::State& state) {
  const auto inst = generate_instance("random_half_integral", 16, 3);
  const auto metric = scale_metric(metric_closure(inst));
  const std::uint64_t odd = (std::uint64_t{1} << state.range(0)) - 1;
  for (auto _ : state) benchmark::DoNotOptimize(min_tjoin(odd, metric));
}
BENCHMARK(BM_MinTJoin)->Arg(6)->Arg(10)->Arg(14);
BENCHMARK_MAIN();
