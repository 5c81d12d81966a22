#pragma once

#include "qoc/hybrid.hpp"
#include "qoc/objective.hpp"
#include "qoc/pulse.hpp"
#include "qoc/spinsys.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qoc {

/// Dephasing field model for the Monte-Carlo test bench, in Hz.
struct NoiseModel {
  enum class Kind { UniformPerSegment, OrnsteinUhlenbeck };
  Kind kind = Kind::UniformPerSegment;
  double zeta_hz = 0.0;    // uniform range: draws in [-zeta/2, +zeta/2]
  double sigma_hz = 0.0;   // OU rms
  double tau_c_s = 0.0;    // OU correlation time
};

/// Stateful sampler; one instance per trajectory. OU is advanced with the
/// exact discretization, uniform draws are i.i.d. per step.
class NoiseProcess {
 public:
  NoiseProcess(const NoiseModel& model, std::mt19937_64& rng);
  double step(double dt);  // value (Hz) held over the next dt seconds

 private:
  NoiseModel model_;
  std::mt19937_64* rng_;
  double current_ = 0.0;
};

struct SpectroscopyRow {
  double delta_s = 0.0;
  double nu_hz = 0.0;    // 1 / (2 delta)
  double t2_s = 0.0;
  double s_per_s = 0.0;  // pi^2 / (4 T2)
  bool fit_ok = true;
};

struct SpectroscopyResult {
  std::vector<SpectroscopyRow> rows;
};

struct CpmgT2Result {
  double t2_s = 0.0;
  bool fit_ok = true;
};

/// Reported when the envelope does not decay over the echo train.
inline constexpr double kNoDecayT2 = 1e9;

struct SingletOrderOptions {
  double storage_s = 0.0;   // noise-only storage window after preparation
  double refresh_s = 0.0;   // z-field refresh interval; 0 = one value per trial
};

/// Per-trial singlet orders: preparation pulse applied under a random
/// piecewise-constant global z-field of the given range, then the overlap
/// with -I_1 . I_2 is measured.
std::vector<double> singlet_order_samples(const SpinSystem& sys,
                                          const PulseSequence& pulse,
                                          double strength_hz, int trials,
                                          std::uint64_t seed,
                                          const SingletOrderOptions& opts = {});

double singlet_order(const SpinSystem& sys, const PulseSequence& pulse,
                     double strength_hz, int trials, std::uint64_t seed,
                     const SingletOrderOptions& opts = {});

/// CPMG echo train [delta/2 - pi - delta/2] x max_echoes under per-trial
/// noise; the trial-averaged transverse envelope is fitted to A exp(-t/T2).
CpmgT2Result cpmg_t2(const SpinSystem& sys, const PulseSequence& pi_pulse,
                     double delta_s, const NoiseModel& noise, int trials,
                     int max_echoes, std::uint64_t seed, double dt_s);

SpectroscopyResult noise_spectrum(const SpinSystem& sys, const PulseSequence& pi_pulse,
                                  const std::vector<double>& deltas_s,
                                  const NoiseModel& noise, int trials, int max_echoes,
                                  std::uint64_t seed, double dt_s);

struct BenchmarkAlgorithm {
  std::string name;
  OptimizerConfig config;  // seed field is overridden per trial
};

struct PulseInit {
  int segments = 0;
  double tau = 0.0;
  double init_amp = 0.0;  // rad/s; random initial amplitudes in [-a, +a]
  CpmgSpec cpmg;
};

struct AlgorithmRuns {
  std::string name;
  std::vector<OptimizationResult> trials;
};

struct BenchmarkResult {
  std::vector<AlgorithmRuns> algorithms;
};

/// `trials` optimizations per algorithm from shared per-trial random
/// initial pulses; per-trial seeds derive from `seed`.
BenchmarkResult benchmark_convergence(const SpinSystem& sys, const ControlTask& task,
                                      const RfiDistribution& rfi,
                                      const std::vector<BenchmarkAlgorithm>& algorithms,
                                      int trials, const PulseInit& init,
                                      std::uint64_t seed);

PulseSequence random_initial_pulse(const PulseInit& init, std::uint64_t seed);

struct RobustnessPoint {
  std::string label;
  double strength_hz = 0.0;
  double mean_order = 0.0;
  double stderr_order = 0.0;
  int trials = 0;
};

RobustnessPoint robustness_point(const std::string& label, double strength_hz,
                                 const std::vector<double>& samples);

void write_convergence_csv(const std::string& path, const BenchmarkResult& result);
void write_spectroscopy_csv(const std::string& path, const SpectroscopyResult& result);
void write_robustness_csv(const std::string& path,
                          const std::vector<RobustnessPoint>& points);

}  // namespace qoc
