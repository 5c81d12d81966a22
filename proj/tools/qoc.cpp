// Command-line front end: config-driven optimization runs, convergence
// benchmarks, noise spectroscopy, and robustness simulations.

#include "qoc/config.hpp"
#include "qoc/hybrid.hpp"
#include "qoc/objective.hpp"
#include "qoc/rng.hpp"
#include "qoc/shapefile.hpp"
#include "qoc/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "path to the run config (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", args.seed, "seed override");
  cmd->add_option("--jobs", args.jobs, "worker thread count (0 = library default)");
}

qoc::RunConfig load(const CommonArgs& args) {
  qoc::RunConfig cfg = qoc::parse_run_config(args.config_path);
  if (!args.out_dir.empty()) {
    cfg.output_dir = args.out_dir;
    cfg.resolved["output_dir"] = args.out_dir;
  }
  if (args.seed) {
    cfg.optimizer.seed = *args.seed;
    cfg.resolved["optimizer"]["seed"] = *args.seed;
    for (auto& algo : cfg.benchmark.algorithms) algo.config.seed = *args.seed;
  }
#ifdef _OPENMP
  if (args.jobs > 0) omp_set_num_threads(args.jobs);
#endif
  fs::create_directories(cfg.output_dir);
  return cfg;
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << doc.dump(2) << '\n';
}

void write_manifest(const qoc::RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["config"] = cfg.resolved;
  m["outputs"] = outputs;
  write_json(cfg.output_dir + "/manifest.json", m);
}

void write_trace_csv(const std::string& path,
                     const std::vector<qoc::TracePoint>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "iteration,evals,wallclock_s,fidelity\n";
  char buf[96];
  for (const qoc::TracePoint& p : trace) {
    std::snprintf(buf, sizeof buf, "%d,%llu,%.6f,%.17g\n", p.iteration,
                  static_cast<unsigned long long>(p.evals), p.wallclock_s, p.fidelity);
    out << buf;
  }
}

int cmd_optimize(const CommonArgs& args) {
  const qoc::RunConfig cfg = load(args);
  const qoc::PulseSequence pulse0 = cfg.initial_pulse();
  qoc::OptimizationResult result;
  try {
    result = qoc::optimize(cfg.system, cfg.task, cfg.rfi, pulse0, cfg.optimizer);
  } catch (const std::exception& e) {
    std::cerr << "optimize: numeric failure: " << e.what() << '\n';
    return 1;
  }
  qoc::export_pulse(result.best_pulse, cfg.output_dir + "/pulse.shape");
  write_trace_csv(cfg.output_dir + "/trace.csv", result.trace);

  json summary;
  summary["final_fidelity"] = result.final_fidelity;
  if (cfg.task.kind == qoc::ControlTask::Kind::StateTransfer)
    summary["attainability_bound"] =
        qoc::attainability_bound(cfg.task.rho0, cfg.task.rhoF);
  summary["stop_reason"] = qoc::to_string(result.stop_reason);
  summary["iterations"] = result.trace.back().iteration;
  summary["evals"] = result.evals;
  summary["seed"] = result.seed;
  summary["config"] = cfg.resolved;
  write_json(cfg.output_dir + "/result.json", summary);
  write_manifest(cfg, "optimize", {"pulse.shape", "trace.csv", "result.json"});
  std::cout << "final fidelity " << result.final_fidelity << " ("
            << qoc::to_string(result.stop_reason) << ")\n";
  return 0;
}

int cmd_benchmark(const CommonArgs& args) {
  const qoc::RunConfig cfg = load(args);
  if (!cfg.benchmark.present)
    throw std::invalid_argument("config: benchmark block required for this command");
  qoc::PulseInit init;
  init.segments = cfg.segments;
  init.tau = cfg.duration_s / cfg.segments;
  init.init_amp = cfg.init_amp;
  init.cpmg = cfg.optimizer.cpmg;
  const qoc::BenchmarkResult result = qoc::benchmark_convergence(
      cfg.system, cfg.task, cfg.rfi, cfg.benchmark.algorithms, cfg.benchmark.trials,
      init, cfg.optimizer.seed);
  qoc::write_convergence_csv(cfg.output_dir + "/convergence.csv", result);
  write_manifest(cfg, "benchmark", {"convergence.csv"});
  for (const qoc::AlgorithmRuns& runs : result.algorithms) {
    double mean_inf = 0.0;
    for (const qoc::OptimizationResult& r : runs.trials)
      mean_inf += 1.0 - r.final_fidelity;
    std::cout << runs.name << ": mean final infidelity "
              << mean_inf / double(runs.trials.size()) << '\n';
  }
  return 0;
}

int cmd_noisespec(const CommonArgs& args) {
  const qoc::RunConfig cfg = load(args);
  if (!cfg.noisespec.present)
    throw std::invalid_argument("config: noisespec block required for this command");
  // Hard pi pulse: one segment at the configured amplitude.
  qoc::PulseSequence pi_pulse = qoc::PulseSequence::zero(
      1, std::numbers::pi / cfg.noisespec.pi_amplitude);
  pi_pulse.amps_x[0] = cfg.noisespec.pi_amplitude;
  const qoc::SpectroscopyResult result = qoc::noise_spectrum(
      cfg.system, pi_pulse, cfg.noisespec.deltas_s, cfg.noisespec.noise,
      cfg.noisespec.trials, cfg.noisespec.max_echoes, cfg.optimizer.seed,
      cfg.noisespec.dt_s);
  qoc::write_spectroscopy_csv(cfg.output_dir + "/spectroscopy.csv", result);
  write_manifest(cfg, "noisespec", {"spectroscopy.csv"});
  for (const qoc::SpectroscopyRow& row : result.rows)
    std::cout << "nu " << row.nu_hz << " Hz: T2 " << row.t2_s << " s, S "
              << row.s_per_s << " 1/s" << (row.fit_ok ? "" : " (fit failed)") << '\n';
  return 0;
}

int cmd_robustness(const CommonArgs& args) {
  const qoc::RunConfig cfg = load(args);
  if (!cfg.robustness.present)
    throw std::invalid_argument("config: robustness block required for this command");
  qoc::SingletOrderOptions opts;
  opts.storage_s = cfg.robustness.storage_s;
  opts.refresh_s = cfg.robustness.refresh_s;
  std::vector<qoc::RobustnessPoint> points;
  for (std::size_t p = 0; p < cfg.robustness.pulses.size(); ++p) {
    const auto& [label, file] = cfg.robustness.pulses[p];
    const qoc::PulseSequence pulse = qoc::import_pulse(file);
    for (std::size_t s = 0; s < cfg.robustness.strengths_hz.size(); ++s) {
      const double strength = cfg.robustness.strengths_hz[s];
      const auto samples = qoc::singlet_order_samples(
          cfg.system, pulse, strength, cfg.robustness.trials,
          qoc::splitmix64(cfg.optimizer.seed + 1000 * p + s), opts);
      points.push_back(qoc::robustness_point(label, strength, samples));
    }
  }
  qoc::write_robustness_csv(cfg.output_dir + "/robustness.csv", points);
  write_manifest(cfg, "robustness", {"robustness.csv"});
  for (const qoc::RobustnessPoint& pt : points)
    std::cout << pt.label << " @ " << pt.strength_hz << " Hz: " << pt.mean_order
              << " +/- " << pt.stderr_order << '\n';
  return 0;
}

int cmd_export(const CommonArgs& args) {
  const qoc::RunConfig cfg = load(args);
  const qoc::PulseSequence pulse = cfg.initial_pulse();
  qoc::export_pulse(pulse, cfg.output_dir + "/pulse.shape");
  write_manifest(cfg, "export", {"pulse.shape"});
  std::cout << "wrote " << cfg.output_dir << "/pulse.shape\n";
  return 0;
}

int cmd_validate(const CommonArgs& args) {
  qoc::parse_run_config(args.config_path);
  std::cout << "config OK\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust pulse-engineering toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* optimize = app.add_subcommand("optimize", "run one optimization");
  auto* benchmark = app.add_subcommand("benchmark", "convergence benchmark");
  auto* noisespec = app.add_subcommand("noisespec", "CPMG noise spectroscopy");
  auto* robustness = app.add_subcommand("robustness", "singlet-order robustness scan");
  auto* export_cmd = app.add_subcommand("export", "write the config's pulse as a shape file");
  auto* validate = app.add_subcommand("validate", "parse and validate a config");
  for (CLI::App* cmd : {optimize, benchmark, noisespec, robustness, export_cmd, validate})
    add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) return cmd_optimize(args);
    if (benchmark->parsed()) return cmd_benchmark(args);
    if (noisespec->parsed()) return cmd_noisespec(args);
    if (robustness->parsed()) return cmd_robustness(args);
    if (export_cmd->parsed()) return cmd_export(args);
    if (validate->parsed()) return cmd_validate(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
