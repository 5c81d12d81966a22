#pragma once

#include "qoc/hybrid.hpp"
#include "qoc/objective.hpp"
#include "qoc/pulse.hpp"
#include "qoc/simulate.hpp"
#include "qoc/spinsys.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qoc {

/// Fully-validated run configuration. Parsing either succeeds with every
/// default resolved (and echoed in `resolved`) or throws with a
/// key-addressed message; unknown keys are hard errors.
struct RunConfig {
  SpinSystem system;
  ControlTask task;

  // pulse block
  int segments = 0;
  double duration_s = 0.0;
  std::string initial = "zero";  // zero | random | file
  std::string pulse_file;
  double init_amp = 0.0;  // rad/s

  RfiDistribution rfi;
  OptimizerConfig optimizer;
  std::string output_dir = "out";

  struct BenchmarkBlock {
    bool present = false;
    int trials = 0;
    std::vector<BenchmarkAlgorithm> algorithms;
  } benchmark;

  struct NoisespecBlock {
    bool present = false;
    std::vector<double> deltas_s;
    NoiseModel noise;
    int trials = 0;
    int max_echoes = 0;
    double dt_s = 0.0;
    double pi_amplitude = 0.0;  // rad/s; hard pi pulse, one segment
  } noisespec;

  struct RobustnessBlock {
    bool present = false;
    std::vector<std::pair<std::string, std::string>> pulses;  // label -> shape file
    std::vector<double> strengths_hz;
    int trials = 0;
    double storage_s = 0.0;
    double refresh_s = 0.0;
  } robustness;

  nlohmann::json resolved;  // config echo with all defaults applied

  /// Materialize the initial pulse (zero/random/file plus CPMG freezing).
  PulseSequence initial_pulse() const;
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_json(const nlohmann::json& doc);

}  // namespace qoc
