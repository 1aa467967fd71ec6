#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "cvxnav/kernels.hpp"
#include "cvxnav/oracle.hpp"
#include "cvxnav/surfaces.hpp"

namespace {

using namespace cvxnav;

const Surface3D& ellipsoid() {
  static const Surface3D s = builtin_surface("ellipsoid_of_revolution", {{"kappa", 4.0}});
  return s;
}

template <bool Parallel>
void BM_ArgminGrid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Surface3D& s = ellipsoid();
  const Vec3 x(1.7, -0.4, 0.9);
  auto f = [&](int i, int j) {
    return (s.eval(s.u_axis.grid_point(i, n), s.v_axis.grid_point(j, n)) - x).squaredNorm();
  };
  for (auto _ : state) {
    GridMin m = Parallel ? parallel::argmin_grid(n, n, f) : serial::argmin_grid(n, n, f);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

template <bool Parallel>
void BM_NearestSample(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const std::vector<Vec3> samples = random_boundary_samples(ellipsoid(), count, kDefaultSeed);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  std::vector<Vec3> queries(256);
  for (Vec3& q : queries) q = Vec3(ud(rng), ud(rng), ud(rng));
  for (auto _ : state) {
    auto d = Parallel ? parallel::nearest_sample_distances<3>(samples, queries)
                      : serial::nearest_sample_distances<3>(samples, queries);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(count * queries.size()));
}

void BM_OracleProjection(benchmark::State& state) {
  OracleOptions opt;
  opt.grid_density = static_cast<int>(state.range(0));
  opt.parallel = state.range(1) != 0;
  const Vec3 x(1.7, -0.4, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(project_parametric(ellipsoid(), x, opt));
}

}  // namespace

BENCHMARK(BM_ArgminGrid<false>)->Arg(180)->Arg(720);
BENCHMARK(BM_ArgminGrid<true>)->Arg(180)->Arg(720);
BENCHMARK(BM_NearestSample<false>)->Arg(1024)->Arg(16384);
BENCHMARK(BM_NearestSample<true>)->Arg(1024)->Arg(16384);
BENCHMARK(BM_OracleProjection)->Args({180, 0})->Args({180, 1})->Args({720, 0})->Args({720, 1});

BENCHMARK_MAIN();
