// Micro-benchmarks for the hot paths: spectral decomposition, response
// assembly and inversion, information-bound evaluation, residue probing
// and the dynamics integrators.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include <aptsense/dynamics.hpp>
#include <aptsense/hamiltonian.hpp>
#include <aptsense/laurent.hpp>
#include <aptsense/metrology.hpp>
#include <aptsense/params.hpp>
#include <aptsense/transfer.hpp>

namespace {

using namespace aptsense;

SystemParams bench_params() {
  SystemParams p;
  p.delta = 1.3;
  p.big_gamma = 1.0;
  p.gamma0 = 0.4;
  p.gamma_c = 0.5;
  p.gamma_bath = 1.0;
  return p;
}

void BM_Eigensystem(benchmark::State& state) {
  const Eigen::Matrix2cd h = build_effective_hamiltonian(bench_params());
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigensystem(h));
  }
}
BENCHMARK(BM_Eigensystem);

void BM_InverseTransferAssembly(benchmark::State& state) {
  const SystemParams p = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_transfer_matrix(p, 0.3));
  }
}
BENCHMARK(BM_InverseTransferAssembly);

void BM_TransferInversion(benchmark::State& state) {
  const SystemParams p = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(transfer_matrix(p, 0.3));
  }
}
BENCHMARK(BM_TransferInversion);

void BM_TransferDeterminant(benchmark::State& state) {
  const SystemParams p = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(transfer_determinant(p, 0.3));
  }
}
BENCHMARK(BM_TransferDeterminant);

void BM_CriticalFrequencies(benchmark::State& state) {
  const SystemParams p = make_params(4.0, 1.0, -1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(critical_frequencies(p));
  }
}
BENCHMARK(BM_CriticalFrequencies);

void BM_QfiPoint(benchmark::State& state) {
  const SystemParams p = bench_params();
  const ProbeConfig probe;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfi(p, 0.3, probe));
  }
}
BENCHMARK(BM_QfiPoint);

void BM_QcrbSweep100(benchmark::State& state) {
  const SystemParams p = bench_params();
  const ProbeConfig probe;
  std::vector<double> omegas(100);
  for (int i = 0; i < 100; ++i) omegas[i] = 0.01 + 0.05 * i;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcrb_sweep(p, omegas, probe));
  }
}
BENCHMARK(BM_QcrbSweep100);

void BM_ResidueProbe(benchmark::State& state) {
  const SystemParams p = make_params(2.0, 1.0, -1.0);
  const std::vector<double> radii = {1e-2, 1e-3, 1e-4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerical_residue(p, 0.0, 2, radii));
  }
}
BENCHMARK(BM_ResidueProbe);

void BM_SemiclassicalEvolve(benchmark::State& state) {
  const FullFrameParams p = make_full_frame(1.0, 0.0, 1.0, 1.0);
  std::vector<double> times(100);
  for (int i = 0; i < 100; ++i) times[i] = 0.01 * (i + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        semiclassical_evolve(p, {0.2, 0.0}, {0.2, 0.0}, times));
  }
}
BENCHMARK(BM_SemiclassicalEvolve);

void BM_PropagatorEvolve(benchmark::State& state) {
  const FullFrameParams p = make_full_frame(1.0, 0.0, 1.0, 1.0);
  const Eigen::Matrix2cd h = build_full_hamiltonian(p);
  std::vector<double> times(100);
  for (int i = 0; i < 100; ++i) times[i] = 0.01 * (i + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagator_evolve(h, {0.2, 0.0}, {0.2, 0.0}, times));
  }
}
BENCHMARK(BM_PropagatorEvolve);

void BM_MasterEquationShortRun(benchmark::State& state) {
  const FullFrameParams p = make_full_frame(1.0, 0.0, 1.0, 1.0);
  FockLindbladConfig cfg;
  cfg.n_max = 3;
  cfg.alpha_a = 0.1;
  cfg.alpha_b = 0.1;
  cfg.dt = 1e-3;
  cfg.t_final = 1e-2;  // ten fixed steps on the 16-dimensional space
  for (auto _ : state) {
    benchmark::DoNotOptimize(lindblad_evolve(p, cfg));
  }
}
BENCHMARK(BM_MasterEquationShortRun);

}  // namespace

BENCHMARK_MAIN();
