#include "qoc/simulate.hpp"

#include "qoc/propagate.hpp"
#include "qoc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace qoc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

}  // namespace

NoiseProcess::NoiseProcess(const NoiseModel& model, std::mt19937_64& rng)
    : model_(model), rng_(&rng) {
  if (model_.kind == NoiseModel::Kind::OrnsteinUhlenbeck) {
    if (!(model_.tau_c_s > 0.0))
      throw std::invalid_argument("NoiseProcess: OU correlation time must be > 0");
    std::normal_distribution<double> n(0.0, model_.sigma_hz);
    current_ = n(*rng_);  // stationary start
  }
}

double NoiseProcess::step(double dt) {
  if (model_.kind == NoiseModel::Kind::UniformPerSegment) {
    if (model_.zeta_hz <= 0.0) return 0.0;
    std::uniform_real_distribution<double> u(-model_.zeta_hz / 2.0,
                                             model_.zeta_hz / 2.0);
    return u(*rng_);
  }
  const double value = current_;
  const double decay = std::exp(-dt / model_.tau_c_s);
  std::normal_distribution<double> n(0.0,
                                     model_.sigma_hz * std::sqrt(1.0 - decay * decay));
  current_ = current_ * decay + n(*rng_);
  return value;
}

std::vector<double> singlet_order_samples(const SpinSystem& sys,
                                          const PulseSequence& pulse,
                                          double strength_hz, int trials,
                                          std::uint64_t seed,
                                          const SingletOrderOptions& opts) {
  if (sys.n != 2)
    throw std::invalid_argument("singlet_order: requires a two-spin system");
  if (trials < 1) throw std::invalid_argument("singlet_order: trials must be >= 1");
  pulse.validate();
  const SystemOperators ops = SystemOperators::build(sys);
  const Operator rho0 = thermal_z_state(2);
  const Operator rhoF = lls_state();
  const double den = rho0.norm() * rhoF.norm();

  const double prep = pulse.duration();
  const double total = prep + opts.storage_s;
  const double refresh = opts.refresh_s > 0.0 ? opts.refresh_s : total + pulse.tau;
  const int n_blocks = std::max(1, int(std::ceil(total / refresh)));

  std::vector<double> orders(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(t));
    std::vector<double> field(static_cast<std::size_t>(n_blocks), 0.0);
    if (strength_hz > 0.0) {
      std::uniform_real_distribution<double> u(-strength_hz / 2.0, strength_hz / 2.0);
      for (double& f : field) f = u(rng);
    }
    auto field_at = [&](double time) {
      const int b = std::min(n_blocks - 1, int(time / refresh));
      return field[static_cast<std::size_t>(b)];
    };

    Operator rho = rho0;
    for (int j = 1; j <= pulse.segments; ++j) {
      const double eta = field_at((j - 0.5) * pulse.tau);
      const Operator h = segment_hamiltonian(ops, pulse, j, 1.0, &eta);
      const Operator u = expm_hermitian(h, pulse.tau);
      rho = u * rho * u.adjoint();
    }
    // Storage: spin lock suppresses the drift, only the z-field acts.
    double time = prep;
    const double end = prep + opts.storage_s;
    while (time < end - 1e-15) {
      const int b = std::min(n_blocks - 1, int(time / refresh));
      const double block_end = std::min(end, (b + 1) * refresh);
      const double dt = block_end - time;
      const Operator u =
          expm_hermitian(kTwoPi * field[static_cast<std::size_t>(b)] * ops.hz, dt);
      rho = u * rho * u.adjoint();
      time = block_end;
    }
    orders[static_cast<std::size_t>(t)] = (rhoF * rho).trace().real() / den;
  }
  return orders;
}

double singlet_order(const SpinSystem& sys, const PulseSequence& pulse,
                     double strength_hz, int trials, std::uint64_t seed,
                     const SingletOrderOptions& opts) {
  return mean_of(singlet_order_samples(sys, pulse, strength_hz, trials, seed, opts));
}

namespace {

struct FitResult {
  double t2 = 0.0;
  bool ok = true;
};

// Log-linear least squares on the normalized envelope; points below 5% of
// the first point are treated as noise floor and excluded.
FitResult fit_t2(const std::vector<double>& times, const std::vector<double>& env) {
  const double e0 = env.front();
  if (!(e0 > 0.0)) return {0.0, false};
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < env.size(); ++i) {
    // Everything from the first sub-threshold point on is noise floor.
    if (env[i] < 0.05 * e0 || env[i] <= 0.0) break;
    ts.push_back(times[i]);
    ys.push_back(std::log(env[i] / e0));
  }
  if (ts.size() < 2) return {0.0, false};
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  const double n = double(ts.size());
  const double denom = n * stt - st * st;
  if (denom == 0.0) return {0.0, false};
  const double slope = (n * sty - st * sy) / denom;
  if (slope >= 0.0 || -1.0 / slope >= kNoDecayT2) return {kNoDecayT2, true};
  return {-1.0 / slope, true};
}

}  // namespace

CpmgT2Result cpmg_t2(const SpinSystem& sys, const PulseSequence& pi_pulse,
                     double delta_s, const NoiseModel& noise, int trials,
                     int max_echoes, std::uint64_t seed, double dt_s) {
  pi_pulse.validate();
  if (trials < 10) throw std::invalid_argument("cpmg_t2: trials must be >= 10");
  if (max_echoes < 1) throw std::invalid_argument("cpmg_t2: max_echoes must be >= 1");
  if (!(dt_s > 0.0)) throw std::invalid_argument("cpmg_t2: dt must be > 0");
  const double pulse_dur = pi_pulse.duration();
  if (!(delta_s > pulse_dur))
    throw std::invalid_argument("cpmg_t2: delta must exceed the pi-pulse duration");

  const SystemOperators ops = SystemOperators::build(sys);
  const Operator rho0 = ops.hx;  // transverse magnetization
  const int half_steps = std::max(1, int(std::ceil((delta_s / 2.0) / dt_s)));
  const double half_dt = (delta_s / 2.0) / half_steps;
  const double period = delta_s + pulse_dur;

  // Per-trial transverse components; the dephasing signal appears only in
  // the magnitude of the trial-averaged vector, not the per-trial magnitude.
  std::vector<std::vector<double>> env_x(
      static_cast<std::size_t>(trials),
      std::vector<double>(static_cast<std::size_t>(max_echoes)));
  std::vector<std::vector<double>> env_y = env_x;

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(t));
    NoiseProcess process(noise, rng);
    Operator rho = rho0;
    auto free_evolve = [&](int steps, double dt) {
      for (int s = 0; s < steps; ++s) {
        const double eta = process.step(dt);
        const Operator u = expm_hermitian(ops.h0 + kTwoPi * eta * ops.hz, dt);
        rho = u * rho * u.adjoint();
      }
    };
    for (int k = 0; k < max_echoes; ++k) {
      free_evolve(half_steps, half_dt);
      for (int j = 1; j <= pi_pulse.segments; ++j) {
        const double eta = process.step(pi_pulse.tau);
        const Operator u = expm_hermitian(
            segment_hamiltonian(ops, pi_pulse, j, 1.0, &eta), pi_pulse.tau);
        rho = u * rho * u.adjoint();
      }
      free_evolve(half_steps, half_dt);
      env_x[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] =
          (rho * ops.hx).trace().real();
      env_y[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] =
          (rho * ops.hy).trace().real();
    }
  }

  std::vector<double> times(static_cast<std::size_t>(max_echoes));
  std::vector<double> mean_env(static_cast<std::size_t>(max_echoes), 0.0);
  for (int k = 0; k < max_echoes; ++k) {
    times[static_cast<std::size_t>(k)] = (k + 1) * period;
    double mx = 0.0, my = 0.0;
    for (int t = 0; t < trials; ++t) {
      mx += env_x[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
      my += env_y[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
    }
    mean_env[static_cast<std::size_t>(k)] = std::hypot(mx, my) / double(trials);
  }
  const FitResult fit = fit_t2(times, mean_env);
  return {fit.t2, fit.ok};
}

SpectroscopyResult noise_spectrum(const SpinSystem& sys, const PulseSequence& pi_pulse,
                                  const std::vector<double>& deltas_s,
                                  const NoiseModel& noise, int trials, int max_echoes,
                                  std::uint64_t seed, double dt_s) {
  if (deltas_s.empty())
    throw std::invalid_argument("noise_spectrum: deltas must be nonempty");
  SpectroscopyResult result;
  for (std::size_t i = 0; i < deltas_s.size(); ++i) {
    const double delta = deltas_s[i];
    if (!(delta > 0.0))
      throw std::invalid_argument("noise_spectrum: deltas must be positive");
    const CpmgT2Result t2 = cpmg_t2(sys, pi_pulse, delta, noise, trials, max_echoes,
                                    splitmix64(seed + i), dt_s);
    SpectroscopyRow row;
    row.delta_s = delta;
    row.nu_hz = 1.0 / (2.0 * delta);
    row.t2_s = t2.t2_s;
    row.s_per_s = std::numbers::pi * std::numbers::pi / (4.0 * t2.t2_s);
    row.fit_ok = t2.fit_ok;
    result.rows.push_back(row);
  }
  return result;
}

PulseSequence random_initial_pulse(const PulseInit& init, std::uint64_t seed) {
  PulseSequence p = PulseSequence::zero(init.segments, init.tau);
  if (init.init_amp > 0.0) {
    auto rng = make_rng(seed, 3);
    std::uniform_real_distribution<double> u(-init.init_amp, init.init_amp);
    for (int j = 0; j < p.segments; ++j) {
      p.amps_x[j] = u(rng);
      p.amps_y[j] = u(rng);
    }
  }
  if (init.cpmg.n_pulses > 0)
    p = freeze_cpmg(p, init.cpmg.n_pulses, init.cpmg.pi_amplitude);
  return p;
}

BenchmarkResult benchmark_convergence(const SpinSystem& sys, const ControlTask& task,
                                      const RfiDistribution& rfi,
                                      const std::vector<BenchmarkAlgorithm>& algorithms,
                                      int trials, const PulseInit& init,
                                      std::uint64_t seed) {
  if (trials < 1)
    throw std::invalid_argument("benchmark_convergence: trials must be >= 1");
  if (algorithms.empty())
    throw std::invalid_argument("benchmark_convergence: no algorithms given");
  BenchmarkResult result;
  result.algorithms.resize(algorithms.size());
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    result.algorithms[a].name = algorithms[a].name;
    result.algorithms[a].trials.resize(static_cast<std::size_t>(trials));
  }
  const std::ptrdiff_t total = std::ptrdiff_t(algorithms.size()) * trials;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    const std::size_t a = static_cast<std::size_t>(i) / trials;
    const int t = int(i % trials);
    // One initial guess per trial index, shared across algorithms.
    const PulseSequence p0 =
        random_initial_pulse(init, splitmix64(seed) + static_cast<std::uint64_t>(t));
    OptimizerConfig cfg = algorithms[a].config;
    cfg.seed = splitmix64(splitmix64(seed + 0x9e37) ^
                          (a * 0x10001ULL + static_cast<std::uint64_t>(t)));
    result.algorithms[a].trials[static_cast<std::size_t>(t)] =
        optimize(sys, task, rfi, p0, cfg);
  }
  return result;
}

RobustnessPoint robustness_point(const std::string& label, double strength_hz,
                                 const std::vector<double>& samples) {
  RobustnessPoint p;
  p.label = label;
  p.strength_hz = strength_hz;
  p.mean_order = mean_of(samples);
  p.stderr_order = stderr_of(samples, p.mean_order);
  p.trials = int(samples.size());
  return p;
}

void write_convergence_csv(const std::string& path, const BenchmarkResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "algorithm,trial,iteration,evals,wallclock_s,fidelity\n";
  char buf[128];
  for (const AlgorithmRuns& runs : result.algorithms)
    for (std::size_t t = 0; t < runs.trials.size(); ++t)
      for (const TracePoint& p : runs.trials[t].trace) {
        std::snprintf(buf, sizeof buf, "%.6f,%.17g", p.wallclock_s, p.fidelity);
        out << runs.name << ',' << t << ',' << p.iteration << ',' << p.evals << ','
            << buf << '\n';
      }
}

void write_spectroscopy_csv(const std::string& path, const SpectroscopyResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "delta_s,nu_hz,t2_s,s_per_s,fit_ok\n";
  char buf[160];
  for (const SpectroscopyRow& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d", r.delta_s, r.nu_hz,
                  r.t2_s, r.s_per_s, r.fit_ok ? 1 : 0);
    out << buf << '\n';
  }
}

void write_robustness_csv(const std::string& path,
                          const std::vector<RobustnessPoint>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "pulse_label,noise_strength,mean_order,stderr,trials\n";
  char buf[160];
  for (const RobustnessPoint& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", p.strength_hz, p.mean_order,
                  p.stderr_order);
    out << p.label << ',' << buf << ',' << p.trials << '\n';
  }
}

}  // namespace qoc
