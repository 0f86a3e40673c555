#include <benchmark/benchmark.h>

#include <vector>

#include "defosc/algebra.hpp"
#include "defosc/evolve.hpp"
#include "defosc/liouvillian.hpp"
#include "defosc/steady.hpp"
#include "defosc/thermo.hpp"

namespace {

using namespace defosc;

BathModel squeezed_bath() { return BathModel::squeezed(0.2, 0.5, complex(0.1, 0.05)); }

void BM_GeneratorAssembly(benchmark::State& state) {
  const ModeParams mode{1.0, static_cast<std::size_t>(state.range(0))};
  const Deformation def = Deformation::q_deformed(0.1);
  const BathModel bath = squeezed_bath();
  for (auto _ : state) {
    GeneratorMatrix gen(def, bath, mode);
    benchmark::DoNotOptimize(gen.spectral_scale());
  }
}
BENCHMARK(BM_GeneratorAssembly)->Arg(16)->Arg(32)->Arg(64);

void apply_bench(benchmark::State& state, GeneratorStorage storage) {
  const ModeParams mode{1.0, static_cast<std::size_t>(state.range(0))};
  const GeneratorMatrix gen(Deformation::q_deformed(0.1), squeezed_bath(), mode, storage);
  const std::size_t size = mode.dim * mode.dim;
  std::vector<complex> in(size, complex(1.0 / static_cast<double>(size), 0.0));
  std::vector<complex> out(size);
  for (auto _ : state) {
    gen.apply(in, out);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(size));
}

void BM_ApplySparse(benchmark::State& state) { apply_bench(state, GeneratorStorage::sparse); }
void BM_ApplyMatrixFree(benchmark::State& state) { apply_bench(state, GeneratorStorage::matrix_free); }
BENCHMARK(BM_ApplySparse)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_ApplyMatrixFree)->Arg(16)->Arg(32)->Arg(64);

void BM_IntegrateThermal(benchmark::State& state) {
  const ModeParams mode{1.0, static_cast<std::size_t>(state.range(0))};
  const Deformation def = Deformation::q_deformed(0.1);
  const GeneratorMatrix gen(def, BathModel::thermal(0.1, 1.0), mode);
  const DensityMatrix rho0 = DensityMatrix::fock(mode.dim, 3);
  IntegrateOptions options;
  options.keep_states = false;
  options.compute_min_eig = false;
  for (auto _ : state) {
    auto traj = integrate(gen, rho0, 1.0, gen.recommended_step(), 1000000, options);
    benchmark::DoNotOptimize(traj.records.back().observables.mean_N);
  }
}
BENCHMARK(BM_IntegrateThermal)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PartitionSeries(benchmark::State& state) {
  const double beta = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition_q(beta, 0.05).value);
  }
}
BENCHMARK(BM_PartitionSeries)->Arg(1)->Arg(10)->Arg(100);

void BM_SteadyNullspace(benchmark::State& state) {
  const ModeParams mode{1.0, static_cast<std::size_t>(state.range(0))};
  const RateChain chain = transition_rates(Deformation::q_deformed(0.1), BathModel::thermal(0.1, 0.5), mode);
  for (auto _ : state) {
    benchmark::DoNotOptimize(steady_nullspace(chain).p.data());
  }
}
BENCHMARK(BM_SteadyNullspace)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
