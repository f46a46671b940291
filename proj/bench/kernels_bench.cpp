// Serial reference kernels against their OpenMP counterparts on the planted
// block graphs used by the complexity probe.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "trussrag/kernels.hpp"
#include "trussrag/truss.hpp"
#include "trussrag/verification.hpp"

using namespace trussrag;

namespace {

const AttributedGraph& graph(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<AttributedGraph>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<AttributedGraph>(synthetic_probe_graph(n, 7, 64));
  return *slot;
}

std::vector<float> query(std::size_t dim) {
  std::vector<float> q(dim, 0.0f);
  q[0] = 1.0f;
  return q;
}

void set_counters(benchmark::State& state, const AttributedGraph& g) {
  state.counters["nodes"] = static_cast<double>(g.node_count());
  state.counters["edges"] = static_cast<double>(g.edge_count());
  state.counters["threads"] = kernel_threads();
}

void BM_edge_supports_serial(benchmark::State& state) {
  const auto& g = graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(edge_supports_serial(g));
  set_counters(state, g);
}

void BM_edge_supports(benchmark::State& state) {
  const auto& g = graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(edge_supports(g));
  set_counters(state, g);
}

void BM_cosine_relevance_serial(benchmark::State& state) {
  const auto& g = graph(state.range(0));
  const auto q = query(64);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_relevance_serial(g, q));
  set_counters(state, g);
}

void BM_cosine_relevance(benchmark::State& state) {
  const auto& g = graph(state.range(0));
  const auto q = query(64);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_relevance(g, q));
  set_counters(state, g);
}

void BM_knn_top_k_serial(benchmark::State& state) {
  const auto& g = graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(knn_top_k_serial(g, 5));
  set_counters(state, g);
}

void BM_knn_top_k(benchmark::State& state) {
  const auto& g = graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(knn_top_k(g, 5));
  set_counters(state, g);
}

void BM_truss_decomposition(benchmark::State& state) {
  const auto& g = graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(truss_decomposition(g));
  set_counters(state, g);
}

}  // namespace

BENCHMARK(BM_edge_supports_serial)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_edge_supports)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cosine_relevance_serial)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_cosine_relevance)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_knn_top_k_serial)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_knn_top_k)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_truss_decomposition)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
