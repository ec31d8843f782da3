// Serial reference path against the OpenMP path for each kernel.

#include <benchmark/benchmark.h>

#include "capcover/hull.hpp"
#include "capcover/kernels.hpp"
#include "capcover/metric.hpp"
#include "capcover/sampling.hpp"

#include <cmath>
#include <random>

using namespace capcover;

namespace {

struct Fixture {
  InscribedPolytope poly;
  std::vector<Vec3> queries;
  std::vector<double> values;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    const ConvexBody e = make_ellipsoid({2, 1, 1});
    out.poly = convex_hull(sample_h_kappa(e, 2000, 1));
    const MetricMesh mesh = build_metric_mesh(e, 0.05);
    out.queries.assign(mesh.positions().begin(), mesh.positions().end());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    out.values.resize(1 << 20);
    for (double& v : out.values) v = u(rng);
    return out;
  }();
  return f;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::kParallel : Exec::kSerial; }

void BM_ParallelMap(benchmark::State& state) {
  const std::size_t n = 1 << 18;
  for (auto _ : state) {
    auto out = parallel_map(n, [](std::size_t i) { return std::sin(0.001 * static_cast<double>(i)); },
                            exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_Argmax(benchmark::State& state) {
  const auto& v = fixture().values;
  for (auto _ : state) benchmark::DoNotOptimize(argmax(v, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * v.size());
}

void BM_DistancesToPolytope(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    auto d = distances_to_polytope(f.poly, f.queries, exec_of(state));
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(state.iterations() * f.queries.size());
}

void BM_BruteForceHausdorff(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_hausdorff(f.poly, f.queries, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * f.queries.size());
}

}  // namespace

// Argument 0 is the serial path, 1 the OpenMP path. Wall time, since CPU
// time only counts the calling thread.
BENCHMARK(BM_ParallelMap)->Arg(0)->Arg(1)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Argmax)->Arg(0)->Arg(1)->UseRealTime()->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DistancesToPolytope)->Arg(0)->Arg(1)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceHausdorff)->Arg(0)->Arg(1)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
