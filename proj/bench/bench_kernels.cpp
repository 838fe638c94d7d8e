// Serial reference kernels against the fused / OpenMP ones.
//
//   bench_kernels --benchmark_filter=Build
//
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>

#include "qchaos/floquet.hpp"
#include "qchaos/imperfections.hpp"
#include "qchaos/sawtooth.hpp"

using namespace qchaos;

namespace {

InterGatePropagator propagator(int nq, double coupling) {
  ImperfectionParams ip;
  ip.delta = 1e-3;
  ip.coupling = coupling;
  return make_propagator(sample_disorder(nq, ip, 1, 0), 1.0);
}

template <CMatrix (*Build)(const GateSequence&, const InterGatePropagator*)>
void BM_Build(benchmark::State& state) {
  const int nq = static_cast<int>(state.range(0));
  const auto seq = compile_iteration(make_params(std::sqrt(2.0), nq));
  const auto e = propagator(nq, state.range(1) ? 1e-3 : 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(Build(seq, &e));
  state.SetLabel(state.range(1) ? "J=delta" : "J=0");
}

template <FloquetSpectrum (*Solve)(const CMatrix&, bool)>
void BM_Diagonalize(benchmark::State& state) {
  const int nq = static_cast<int>(state.range(0));
  const auto e = propagator(nq, 0.0);
  const CMatrix u = build_floquet(compile_iteration(make_params(std::sqrt(2.0), nq)), &e);
  for (auto _ : state) benchmark::DoNotOptimize(Solve(u, true));
}

void build_args(benchmark::internal::Benchmark* b) {
  for (int nq = 5; nq <= 8; ++nq) b->Args({nq, 0});
  for (int nq = 5; nq <= 7; ++nq) b->Args({nq, 1});
  b->Unit(benchmark::kMillisecond);
}

void diag_args(benchmark::internal::Benchmark* b) {
  for (int nq = 5; nq <= 9; ++nq) b->Args({nq});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Build<build_floquet_reference>)->Name("Build/serial_reference")->Apply(build_args);
BENCHMARK(BM_Build<build_floquet>)->Name("Build/fused_openmp")->Apply(build_args);
BENCHMARK(BM_Diagonalize<diagonalize_schur>)->Name("Diagonalize/schur")->Apply(diag_args);
BENCHMARK(BM_Diagonalize<diagonalize>)->Name("Diagonalize/cayley")->Apply(diag_args);
BENCHMARK_MAIN();
