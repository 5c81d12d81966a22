#include "qoc/hybrid.hpp"

#include "qoc/rng.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qoc {

void OptimizerConfig::validate() const {
  if (epsilon < 0.0) throw std::invalid_argument("OptimizerConfig: epsilon must be >= 0");
  if (kappa < 0) throw std::invalid_argument("OptimizerConfig: kappa must be >= 0");
  if (!(t0 > 0.0)) throw std::invalid_argument("OptimizerConfig: t0 must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("OptimizerConfig: gamma must be in (0, 1)");
  if (!(neighbor_scale > 0.0))
    throw std::invalid_argument("OptimizerConfig: neighbor_scale must be > 0");
  if (!(target_fidelity > 0.0 && target_fidelity <= 1.0))
    throw std::invalid_argument("OptimizerConfig: target_fidelity must be in (0, 1]");
  if (max_iters < 0) throw std::invalid_argument("OptimizerConfig: max_iters must be >= 0");
  if (algorithm == Algorithm::Rsagrape) {
    if (!(zeta_hz > 0.0))
      throw std::invalid_argument("OptimizerConfig: RSAGRAPE requires zeta_hz > 0");
    if (noise_ensemble < 1)
      throw std::invalid_argument("OptimizerConfig: RSAGRAPE requires noise_ensemble >= 1");
  }
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::TargetReached: return "target_reached";
    case StopReason::IterationCap: return "iteration_cap";
    case StopReason::TimeBudget: return "time_budget";
    case StopReason::EvalBudget: return "eval_budget";
  }
  return "unknown";
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Grape: return "grape";
    case Algorithm::Sagrape: return "sagrape";
    case Algorithm::Rsagrape: return "rsagrape";
  }
  return "unknown";
}

PulseSequence freeze_cpmg(const PulseSequence& pulse, int n_pulses,
                          double pi_amplitude) {
  pulse.validate();
  if (n_pulses < 1) throw std::invalid_argument("freeze_cpmg: n_pulses must be >= 1");
  if (!(pi_amplitude > 0.0))
    throw std::invalid_argument("freeze_cpmg: pi_amplitude must be > 0");
  const long block = std::lround(std::numbers::pi / (pi_amplitude * pulse.tau));
  if (block < 1)
    throw std::invalid_argument(
        "freeze_cpmg: pi-pulse duration must round to at least one segment");
  PulseSequence out = pulse;
  long prev_end = 0;
  for (int k = 1; k <= n_pulses; ++k) {
    const double center = (2.0 * k - 1.0) / (2.0 * n_pulses) * pulse.segments;
    const long start = std::lround(center - 0.5 * double(block));
    if (start < prev_end)
      throw std::invalid_argument("freeze_cpmg: pi-pulse blocks overlap");
    if (start + block > pulse.segments)
      throw std::invalid_argument("freeze_cpmg: pi-pulse block exceeds sequence length");
    for (long j = start; j < start + block; ++j) {
      out.amps_x[j] = pi_amplitude;
      out.amps_y[j] = 0.0;
      out.frozen[j] = 1;
    }
    prev_end = start + block;
  }
  return out;
}

namespace {

class Stopwatch {
 public:
  void add(std::chrono::steady_clock::time_point t0) {
    seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  double seconds() const { return seconds_; }

 private:
  double seconds_ = 0.0;
};

}  // namespace

OptimizationResult optimize(const SpinSystem& sys, const ControlTask& task,
                            const RfiDistribution& rfi, const PulseSequence& pulse0,
                            const OptimizerConfig& config) {
  config.validate();
  pulse0.validate();
  rfi.validate();
  const SystemOperators ops = SystemOperators::build(sys);
  task.validate(ops.dim);

  const bool noisy = config.algorithm == Algorithm::Rsagrape;
  const int kappa = config.algorithm == Algorithm::Grape ? 0 : config.kappa;

  // Proposal and noise randomness live on separate streams so zeta -> 0
  // reproduces the SAGRAPE iterate sequence exactly.
  AnnealState anneal;
  anneal.temperature = config.t0;
  anneal.cooling = config.gamma;
  anneal.step_scale = config.neighbor_scale;
  anneal.rng = make_rng(config.seed, 1);
  std::mt19937_64 noise_rng = make_rng(config.seed, 2);

  Stopwatch clock;
  std::uint64_t evals = 0;

  auto draw_noise = [&]() {
    std::vector<NoiseTrajectory> trajs;
    if (!noisy) return trajs;
    std::uniform_real_distribution<double> u(-config.zeta_hz / 2.0,
                                             config.zeta_hz / 2.0);
    trajs.resize(static_cast<std::size_t>(config.noise_ensemble));
    for (auto& t : trajs) {
      t.zeta_hz = config.zeta_hz;
      t.etas_hz.resize(static_cast<std::size_t>(pulse0.segments));
      for (double& e : t.etas_hz) e = u(noise_rng);
    }
    return trajs;
  };

  auto objective = [&](const PulseSequence& p) {
    const auto trajs = draw_noise();
    const auto t0 = std::chrono::steady_clock::now();
    const double phi = fidelity(ops, p, task, rfi, trajs);
    clock.add(t0);
    evals += 1;
    return phi;
  };

  auto noiseless_objective = [&](const PulseSequence& p) {
    const auto t0 = std::chrono::steady_clock::now();
    const double phi = fidelity(ops, p, task, rfi);
    clock.add(t0);
    evals += 1;
    return phi;
  };

  auto objective_gradient = [&](const PulseSequence& p) {
    const auto trajs = draw_noise();
    const auto t0 = std::chrono::steady_clock::now();
    GradientField g = gradient(ops, p, task, rfi, trajs);
    clock.add(t0);
    evals += 2;  // a sweep costs roughly two objective evaluations
    return g;
  };

  OptimizationResult result;
  result.seed = config.seed;

  PulseSequence pulse = pulse0;
  double phi = objective(pulse);
  double phi_check = noisy ? noiseless_objective(pulse) : phi;
  result.trace.push_back({0, evals, clock.seconds(), phi});
  result.best_pulse = pulse;
  double best_phi = phi_check;

  StopReason reason = StopReason::IterationCap;
  bool stopped = false;
  if (phi_check >= config.target_fidelity) {
    reason = StopReason::TargetReached;
    stopped = true;
  }

  for (int iter = 1; iter <= config.max_iters && !stopped; ++iter) {
    if (kappa > 0) {
      SweepResult sweep = sa_sweep(pulse, phi, objective, kappa, anneal);
      pulse = std::move(sweep.pulse);
      phi = sweep.fidelity;
    }
    const GradientField g = objective_gradient(pulse);
    pulse = grape_step(pulse, g, config.epsilon, config.amp_max);
    phi = objective(pulse);
    phi_check = noisy ? noiseless_objective(pulse) : phi;
    result.trace.push_back({iter, evals, clock.seconds(), phi});
    if (phi_check > best_phi) {
      best_phi = phi_check;
      result.best_pulse = pulse;
    }
    if (phi_check >= config.target_fidelity) {
      reason = StopReason::TargetReached;
      stopped = true;
    } else if (config.max_evals > 0 && evals >= config.max_evals) {
      reason = StopReason::EvalBudget;
      stopped = true;
    } else if (config.budget_s > 0.0 && clock.seconds() >= config.budget_s) {
      reason = StopReason::TimeBudget;
      stopped = true;
    }
  }

  result.stop_reason = reason;
  result.evals = evals;
  result.final_fidelity = fidelity(ops, result.best_pulse, task, rfi);
  return result;
}

namespace {

OptimizationResult optimize_checked(const SpinSystem& sys, const ControlTask& task,
                                    const RfiDistribution& rfi,
                                    const PulseSequence& pulse0,
                                    const OptimizerConfig& config, Algorithm expect) {
  if (config.algorithm != expect)
    throw std::invalid_argument("optimize: config.algorithm does not match entry point");
  return optimize(sys, task, rfi, pulse0, config);
}

}  // namespace

OptimizationResult optimize_grape(const SpinSystem& sys, const ControlTask& task,
                                  const RfiDistribution& rfi,
                                  const PulseSequence& pulse0,
                                  const OptimizerConfig& config) {
  return optimize_checked(sys, task, rfi, pulse0, config, Algorithm::Grape);
}

OptimizationResult optimize_sagrape(const SpinSystem& sys, const ControlTask& task,
                                    const RfiDistribution& rfi,
                                    const PulseSequence& pulse0,
                                    const OptimizerConfig& config) {
  return optimize_checked(sys, task, rfi, pulse0, config, Algorithm::Sagrape);
}

OptimizationResult optimize_rsagrape(const SpinSystem& sys, const ControlTask& task,
                                     const RfiDistribution& rfi,
                                     const PulseSequence& pulse0,
                                     const OptimizerConfig& config) {
  return optimize_checked(sys, task, rfi, pulse0, config, Algorithm::Rsagrape);
}

}  // namespace qoc
