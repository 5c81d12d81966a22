#include <benchmark/benchmark.h>

#include "qoc/objective.hpp"
#include "qoc/rng.hpp"

#include <numbers>

using namespace qoc;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Fixture {
  SpinSystem sys;
  SystemOperators ops;
  PulseSequence pulse;
  ControlTask task;
  RfiDistribution rfi;
  std::vector<NoiseTrajectory> noise;

  Fixture(int n, int segments, int trajectories)
      : task(ControlTask::gate_synthesis(Operator())) {
    sys.n = n;
    sys.couplings = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      sys.offsets.push_back(kTwoPi * 100.0 * (k + 1));
      if (k + 1 < n) sys.couplings(k, k + 1) = sys.couplings(k + 1, k) = 20.0;
    }
    ops = SystemOperators::build(sys);
    task = n == 2 ? ControlTask::state_transfer(thermal_z_state(2), lls_state())
                  : ControlTask::gate_synthesis(pi_x_gate(n, 1));
    rfi.scales = {0.8, 0.9, 1.0, 1.1, 1.2};
    rfi.probs = {0.1, 0.2, 0.4, 0.2, 0.1};

    auto rng = make_rng(1);
    std::uniform_real_distribution<double> u(-kTwoPi * 100.0, kTwoPi * 100.0);
    pulse = PulseSequence::zero(segments, 1e-4);
    for (int j = 0; j < segments; ++j) {
      pulse.amps_x[j] = u(rng);
      pulse.amps_y[j] = u(rng);
    }
    std::uniform_real_distribution<double> e(-2.5, 2.5);
    noise.resize(trajectories);
    for (auto& t : noise) {
      t.etas_hz.resize(segments);
      for (auto& x : t.etas_hz) x = e(rng);
    }
  }
};

void BM_FidelityParallel(benchmark::State& state) {
  Fixture f(int(state.range(0)), 600, 6);
  for (auto _ : state)
    benchmark::DoNotOptimize(fidelity(f.ops, f.pulse, f.task, f.rfi, f.noise));
}

void BM_FidelitySerial(benchmark::State& state) {
  Fixture f(int(state.range(0)), 600, 6);
  for (auto _ : state)
    benchmark::DoNotOptimize(ref::fidelity(f.ops, f.pulse, f.task, f.rfi, f.noise));
}

void BM_GradientParallel(benchmark::State& state) {
  Fixture f(int(state.range(0)), 600, 6);
  for (auto _ : state) {
    GradientField g = gradient(f.ops, f.pulse, f.task, f.rfi, f.noise);
    benchmark::DoNotOptimize(g.gx.data());
  }
}

void BM_GradientSerial(benchmark::State& state) {
  Fixture f(int(state.range(0)), 600, 6);
  for (auto _ : state) {
    GradientField g = ref::gradient(f.ops, f.pulse, f.task, f.rfi, f.noise);
    benchmark::DoNotOptimize(g.gx.data());
  }
}

BENCHMARK(BM_FidelitySerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FidelityParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
