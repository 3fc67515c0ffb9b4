#include <benchmark/benchmark.h>

#include <random>

#include "cvlab/geometry.hpp"
#include "cvlab/scenario_io.hpp"
#include "cvlab/simulate.hpp"
#include "cvlab/verify.hpp"

using namespace cvlab;

namespace {

Region random_region(std::mt19937_64& rng, int boxes, Coord space) {
  std::uniform_int_distribution<Coord> lo(0, space - 2);
  std::vector<Box> out;
  for (int i = 0; i < boxes; ++i) {
    const Vec3 a{lo(rng), lo(rng), lo(rng)};
    std::uniform_int_distribution<Coord> ext(1, 8);
    out.emplace_back(a, Vec3{a[0] + ext(rng), a[1] + ext(rng), a[2] + ext(rng)});
  }
  return Region(out);
}

const Scenario& shipped() {
  static const Scenario s = load_scenario(CVLAB_SOURCE_DIR "/scenarios/cyber_virtual.yaml");
  return s;
}

void BM_RccRelate(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Region a = random_region(rng, static_cast<int>(state.range(0)), 64);
  const Region b = random_region(rng, static_cast<int>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(rcc_relate(a, b));
}
BENCHMARK(BM_RccRelate)->Arg(1)->Arg(8)->Arg(32);

void BM_RegionUnion(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<Region> parts;
  for (int i = 0; i < state.range(0); ++i) parts.push_back(random_region(rng, 1, 64));
  for (auto _ : state) benchmark::DoNotOptimize(region_union(parts));
}
BENCHMARK(BM_RegionUnion)->Arg(4)->Arg(16)->Arg(64);

void BM_CheckCollisionSweep(benchmark::State& state) {
  const auto comps = resolve_components(shipped());
  for (auto _ : state) benchmark::DoNotOptimize(check_collision(comps, shipped().horizon));
}
BENCHMARK(BM_CheckCollisionSweep);

void BM_EncodeGrid(benchmark::State& state) {
  const auto comps = resolve_components(shipped());
  GridOptions options;
  options.cell_size = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(encode_grid(comps, shipped().horizon, options));
}
BENCHMARK(BM_EncodeGrid)->Arg(100)->Arg(50);

void BM_SolveGrid(benchmark::State& state) {
  const auto comps = resolve_components(shipped());
  GridOptions options;
  options.cell_size = state.range(0);
  const GridEncoding encoding = encode_grid(comps, shipped().horizon, options);
  for (auto _ : state) benchmark::DoNotOptimize(solve_grid(encoding));
}
BENCHMARK(BM_SolveGrid)->Arg(100)->Arg(50);

void BM_Run(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run(shipped(), shipped().horizon, 7));
}
BENCHMARK(BM_Run);

}  // namespace

BENCHMARK_MAIN();
