// Serial reference vs OpenMP paths for the data-parallel kernels.
// Thread count follows L2FIELD_THREADS / OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "l2field/kernels.hpp"
#include "l2field/sampler.hpp"
#include "l2field/set_models.hpp"
#include "l2field/spectral.hpp"

using namespace l2field;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::serial : Exec::parallel; }

std::vector<Vec> line_design(int n) {
  std::vector<Vec> d;
  for (int i = 1; i <= n; ++i) d.push_back(Vec::Constant(1, static_cast<double>(i) / n));
  return d;
}

void BM_GramLevy(benchmark::State& st) {
  const Kernel k = Kernel::levy(0.35);
  std::vector<Vec> design;
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 512; ++i) design.push_back(Vec{{u(rng), u(rng), u(rng)}});
  for (auto _ : st) benchmark::DoNotOptimize(gram_matrix(k, design, exec_of(st)));
}

void BM_GramL2fbm(benchmark::State& st) {
  const SpacePtr space = make_grid_space(2, 64, 1.0);
  const Kernel k = Kernel::l2fbm(space, 0.3);
  std::vector<Vec> design;
  Rng rng(11);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 96; ++i) design.push_back(indicator_rect(space, Rect(Vec{{u(rng), u(rng)}})).coeffs());
  for (auto _ : st) benchmark::DoNotOptimize(gram_matrix(k, design, exec_of(st)));
}

void BM_SamplePaths(benchmark::State& st) {
  const Gram g = gram(Kernel::fbm1d(0.3), line_design(64));
  const CholeskyFactor f = cholesky_factor(g);
  for (auto _ : st) benchmark::DoNotOptimize(sample_paths(f, 8192, 3, exec_of(st)));
}

void BM_Chentsov(benchmark::State& st) {
  McConfig cfg;
  cfg.n_samples = 200000;
  cfg.seed = 5;
  for (auto _ : st)
    benchmark::DoNotOptimize(chentsov_symdiff_measure(3, Vec{{1.0, 0.2, -0.4}}, Vec::Zero(3), cfg, exec_of(st)));
}

void BM_Takenaka(benchmark::State& st) {
  McConfig cfg;
  cfg.n_samples = 100000;
  cfg.seed = 9;
  for (auto _ : st)
    benchmark::DoNotOptimize(takenaka_symdiff_measure(2, 0.25, Vec{{0.6, 0.8}}, Vec::Zero(2), cfg, exec_of(st)));
}

void BM_SpectralSynth(benchmark::State& st) {
  const FreqGrid grid = FreqGrid::log_spaced(1e-4, 1e4, 1024, 1.0);
  std::vector<double> t;
  for (int i = 0; i < 16; ++i) t.push_back(i / 15.0);
  for (auto _ : st) benchmark::DoNotOptimize(synth_fbm_spectral(0.5, t, grid, 1024, 13, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_GramLevy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramL2fbm)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SamplePaths)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Chentsov)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Takenaka)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectralSynth)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
