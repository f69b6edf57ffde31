#include <benchmark/benchmark.h>

#include "gbc/ballgraph.hpp"
#include "gbc/coarsen.hpp"
#include "gbc/gnn.hpp"
#include "gbc/log.hpp"
#include "gbc/synthetic.hpp"

namespace {

gbc::Graph planted(std::int64_t n) {
  gbc::set_log_level("off");
  gbc::PlantedPartitionSpec spec;
  spec.num_nodes = static_cast<std::size_t>(n);
  return gbc::planted_partition(spec);
}

void BM_AdaptiveCoarsen(benchmark::State& state) {
  const gbc::Graph g = planted(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gbc::sgbgc(g, gbc::CoarsenParams{}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AdaptiveCoarsen)->RangeMultiplier(2)->Range(2000, 32000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_RatioCoarsen(benchmark::State& state) {
  const gbc::Graph g = planted(state.range(0));
  gbc::CoarsenParams params;
  params.target_ratio = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(gbc::coarsen_to_ratio(g, params));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RatioCoarsen)->RangeMultiplier(2)->Range(2000, 32000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_BallGraph(benchmark::State& state) {
  const gbc::Graph g = planted(state.range(0));
  const gbc::Partition p = gbc::sgbgc(g, gbc::CoarsenParams{});
  for (auto _ : state) benchmark::DoNotOptimize(gbc::build_ball_graph(g, p));
}
BENCHMARK(BM_BallGraph)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_GcnEpoch(benchmark::State& state) {
  const gbc::Graph g = planted(state.range(0));
  const gbc::GcnInput in = gbc::GcnInput::from_graph(g);
  const gbc::GcnModel m = gbc::GcnModel::glorot(static_cast<Eigen::Index>(g.num_features()), 64, 4, 0);
  std::vector<gbc::NodeId> nodes(g.num_nodes());
  for (gbc::NodeId v = 0; v < nodes.size(); ++v) nodes[v] = v;
  for (auto _ : state) benchmark::DoNotOptimize(gbc::loss_and_gradients(m, in, g.labels(), nodes, 5e-4, false));
}
BENCHMARK(BM_GcnEpoch)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
