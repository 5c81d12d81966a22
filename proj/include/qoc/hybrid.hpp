#pragma once

#include "qoc/anneal.hpp"
#include "qoc/objective.hpp"
#include "qoc/pulse.hpp"
#include "qoc/spinsys.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qoc {

enum class Algorithm { Grape, Sagrape, Rsagrape };

struct CpmgSpec {
  int n_pulses = 0;                 // 0 = no CPMG integration
  double pi_amplitude = 0.0;        // rad/s
};

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::Grape;
  double epsilon = 0.0;             // GRAPE step size
  int kappa = 0;                    // SA iterations per outer iteration
  double t0 = 1.0;                  // initial temperature
  double gamma = 0.99;              // cooling factor
  double neighbor_scale = 2.0 * 3.14159265358979323846 * 50.0;  // rad/s
  double zeta_hz = 0.0;             // noise range (RSAGRAPE)
  int noise_ensemble = 10;          // K trajectories per evaluation (RSAGRAPE)
  int max_iters = 1000;
  double target_fidelity = 1.0;     // in (0, 1]
  double budget_s = 0.0;            // accounted evaluation seconds, 0 = off
  std::uint64_t max_evals = 0;      // evaluation units, 0 = off
  double amp_max = 0.0;             // rad/s, 0 = unclamped
  std::uint64_t seed = 0;
  CpmgSpec cpmg;

  void validate() const;
};

enum class StopReason { TargetReached, IterationCap, TimeBudget, EvalBudget };

std::string to_string(StopReason r);
std::string to_string(Algorithm a);

struct TracePoint {
  int iteration = 0;
  std::uint64_t evals = 0;   // accounted units: objective = 1, gradient = 2
  double wallclock_s = 0.0;  // cumulative evaluation time
  double fidelity = 0.0;     // traced objective (noisy for RSAGRAPE)
};

struct OptimizationResult {
  PulseSequence best_pulse;
  std::vector<TracePoint> trace;
  double final_fidelity = 0.0;  // noiseless re-evaluation of best_pulse
  StopReason stop_reason = StopReason::IterationCap;
  std::uint64_t evals = 0;
  std::uint64_t seed = 0;
};

/// Overlay n_pulses frozen pi-pulse blocks (w_x = pi_amplitude, w_y = 0)
/// centered at fractions (2k-1)/(2 n_pulses) of the duration; each block
/// spans round(pi / (pi_amplitude tau)) segments.
PulseSequence freeze_cpmg(const PulseSequence& pulse, int n_pulses,
                          double pi_amplitude);

OptimizationResult optimize(const SpinSystem& sys, const ControlTask& task,
                            const RfiDistribution& rfi, const PulseSequence& pulse0,
                            const OptimizerConfig& config);

// Per-algorithm entry points; the config's algorithm field must match.
OptimizationResult optimize_grape(const SpinSystem& sys, const ControlTask& task,
                                  const RfiDistribution& rfi,
                                  const PulseSequence& pulse0,
                                  const OptimizerConfig& config);
OptimizationResult optimize_sagrape(const SpinSystem& sys, const ControlTask& task,
                                    const RfiDistribution& rfi,
                                    const PulseSequence& pulse0,
                                    const OptimizerConfig& config);
OptimizationResult optimize_rsagrape(const SpinSystem& sys, const ControlTask& task,
                                     const RfiDistribution& rfi,
                                     const PulseSequence& pulse0,
                                     const OptimizerConfig& config);

}  // namespace qoc
