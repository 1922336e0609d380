#include <benchmark/benchmark.h>

#include "fsat/ensembles.hpp"
#include "fsat/fidelity.hpp"
#include "fsat/linalg.hpp"

using namespace fsat;

namespace {

void BM_SpectralDecompose(benchmark::State& state) {
  const UnitaryOperator u = sample_cue(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(u));
}
BENCHMARK(BM_SpectralDecompose)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_FidelityWindow(benchmark::State& state) {
  const Index dim = state.range(0);
  int nq = 0;
  while ((Index{1} << nq) < dim) ++nq;
  const UnitaryOperator u = sample_cue(dim, 1);
  const auto up = perturbation_unitary(PerturbationSpec::qubit(nq, 0.2));
  const OverlapMatrix ov = overlap_matrix(spectral_decompose(u), spectral_decompose(perturbed_map(up, u)));
  for (auto _ : state) benchmark::DoNotOptimize(eigenstate_fidelity_window(ov, 2000, 2000));
}
BENCHMARK(BM_FidelityWindow)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
