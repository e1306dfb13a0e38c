#include <benchmark/benchmark.h>

#include "bbz/operators.hpp"
#include "bbz/profiles.hpp"
#include "bbz/spectra.hpp"

namespace {

bbz::SolitonProfile profile(std::size_t n) {
  const bbz::SolitonParams p = bbz::params_of_alpha(3.0, bbz::Branch::Minus);
  return bbz::build_profile(p, bbz::ProfileGrid::full(bbz::default_half_length(p.amp_A), n));
}

void BM_MorseIndex(benchmark::State& state) {
  const bbz::DiscretizedOperator op =
      bbz::assemble(profile(static_cast<std::size_t>(state.range(0))), bbz::OperatorKind::Lplus);
  for (auto _ : state) benchmark::DoNotOptimize(bbz::morse_index(op));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MorseIndex)->Arg(1025)->Arg(4097)->Arg(16385)->Arg(65537)->Complexity(benchmark::oN);

void BM_DMatrix(benchmark::State& state) {
  const bbz::SolitonProfile p = profile(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bbz::d_matrix(p));
}
BENCHMARK(BM_DMatrix)->Arg(16385);

void BM_EigenReduced(benchmark::State& state) {
  const bbz::SolitonProfile p = profile(static_cast<std::size_t>(state.range(0)));
  const bbz::DiscretizedOperator lp = bbz::assemble(p, bbz::OperatorKind::Lplus);
  const bbz::DiscretizedOperator lm = bbz::assemble(p, bbz::OperatorKind::Lminus);
  const bbz::VectorPolicy policy{0.97 * bbz::essential_edge(p.params.psi0)};
  for (auto _ : state) benchmark::DoNotOptimize(bbz::eigen_reduced(lp, lm, policy));
}
BENCHMARK(BM_EigenReduced)->Arg(257)->Arg(513)->Unit(benchmark::kMillisecond);

void BM_AnalyzeSpectrum(benchmark::State& state) {
  const bbz::SolitonProfile p = profile(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bbz::analyze_spectrum(p));
}
BENCHMARK(BM_AnalyzeSpectrum)->Arg(513)->Arg(1025)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
