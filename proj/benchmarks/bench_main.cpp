#include <benchmark/benchmark.h>

#include <vector>

#include "fujita/fujita.hpp"
#include "fujita/heat_kernel.hpp"
#include "fujita/operators.hpp"
#include "fujita/semilinear.hpp"

using namespace fujita;

namespace {

Vertex origin(const WeightedGraph& g) {
  const std::vector<int> o(static_cast<std::size_t>(g.family()->dimension), 0);
  return g.lattice_vertex(o);
}

void BM_DirichletOperatorZ2(benchmark::State& state) {
  const auto g = lattice(2, 40, MeasureMode::Degree);
  const auto b = ball(g, origin(g), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dirichlet_operator(b));
  state.counters["interior"] = static_cast<double>(b.interior().size());
}
BENCHMARK(BM_DirichletOperatorZ2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_HeatKernelZ1(benchmark::State& state) {
  const auto g = lattice(1, 400, MeasureMode::Degree);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(heat_kernel(g, t, origin(g), origin(g), 1e-12));
}
BENCHMARK(BM_HeatKernelZ1)->Arg(1)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MolConstantData(benchmark::State& state) {
  const auto g = lattice(1, 201, MeasureMode::Degree);
  const std::vector<double> a(g.size(), 0.5);
  const auto p = truncated_problem(g, origin(g), 200, 2.0, a, 1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_mol(p));
}
BENCHMARK(BM_MolConstantData)->Unit(benchmark::kMillisecond);

void BM_MolKernelData(benchmark::State& state) {
  const auto g = lattice(1, 201, MeasureMode::Degree);
  const auto a = kernel_data(g, origin(g), 1e-3, 4.0, 100);
  const auto p = truncated_problem(g, origin(g), 200, 4.0, a, 1000.0);
  MolOptions opt;
  opt.output_times = {1000.0};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_mol(p, opt));
}
BENCHMARK(BM_MolKernelData)->Unit(benchmark::kMillisecond);

void BM_CdeSearch(benchmark::State& state) {
  const auto g = lattice(2, 6, MeasureMode::Degree);
  CdeSearchOptions opt;
  opt.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cde_search(g, 2.0, 0.0, opt));
}
BENCHMARK(BM_CdeSearch)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FujitaProduct(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fujita_product(1.0, 1e-14));
}
BENCHMARK(BM_FujitaProduct);

}  // namespace

BENCHMARK_MAIN();
