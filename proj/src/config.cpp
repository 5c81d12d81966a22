#include "qoc/config.hpp"

#include "qoc/shapefile.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

namespace qoc {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) fail(where + "." + key, "unknown key");
}

const json& require(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) fail(where + "." + key, "missing required key");
  return j.at(key);
}

double get_num(const json& j, const std::string& where, const std::string& key) {
  const json& v = require(j, where, key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

double get_num_or(const json& j, const std::string& where, const std::string& key,
                  double def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number()) fail(where + "." + key, "expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& where, const std::string& key) {
  const json& v = require(j, where, key);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

int get_int_or(const json& j, const std::string& where, const std::string& key,
               int def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number_integer()) fail(where + "." + key, "expected an integer");
  return j.at(key).get<int>();
}

std::string get_str_or(const json& j, const std::string& where, const std::string& key,
                       const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_string()) fail(where + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> get_vec(const json& j, const std::string& where,
                            const std::string& key) {
  const json& v = require(j, where, key);
  if (!v.is_array()) fail(where + "." + key, "expected an array");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) fail(where + "." + key, "expected numeric entries");
    out.push_back(x.get<double>());
  }
  return out;
}

// Matrices are arrays of rows; entries are either numbers or [re, im].
Operator parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty matrix");
  const std::size_t rows = j.size();
  Operator m(rows, rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j.at(r);
    if (!row.is_array() || row.size() != rows) fail(where, "matrix must be square");
    for (std::size_t c = 0; c < rows; ++c) {
      const json& e = row.at(c);
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e.at(0).is_number() &&
                 e.at(1).is_number()) {
        m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
      } else {
        fail(where, "matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

SpinSystem parse_system(const json& j, const std::string& where) {
  check_keys(j, where, {"n", "offsets_hz", "couplings_hz"});
  SpinSystem sys;
  sys.n = get_int(j, where, "n");
  if (sys.n < 1 || sys.n > 6) fail(where + ".n", "must be in [1, 6]");
  const std::vector<double> offsets_hz = get_vec(j, where, "offsets_hz");
  if (int(offsets_hz.size()) != sys.n)
    fail(where + ".offsets_hz", "must have exactly n entries");
  for (double o : offsets_hz) sys.offsets.push_back(kTwoPi * o);

  const json& c = require(j, where, "couplings_hz");
  sys.couplings = Eigen::MatrixXd::Zero(sys.n, sys.n);
  if (c.is_array() && (c.empty() || c.at(0).is_number())) {
    // Upper triangle, row-major (1,2), (1,3), ..., (2,3), ...
    const std::size_t expect = std::size_t(sys.n) * (sys.n - 1) / 2;
    if (c.size() != expect)
      fail(where + ".couplings_hz", "upper-triangle list must have n(n-1)/2 entries");
    std::size_t i = 0;
    for (int k = 0; k < sys.n; ++k)
      for (int l = k + 1; l < sys.n; ++l) {
        if (!c.at(i).is_number()) fail(where + ".couplings_hz", "expected numbers");
        sys.couplings(k, l) = sys.couplings(l, k) = c.at(i).get<double>();
        ++i;
      }
  } else if (c.is_array()) {
    const Operator full = parse_matrix(c, where + ".couplings_hz");
    if (full.rows() != sys.n) fail(where + ".couplings_hz", "matrix must be n x n");
    for (int k = 0; k < sys.n; ++k)
      for (int l = 0; l < sys.n; ++l) {
        if (full(k, l).imag() != 0.0)
          fail(where + ".couplings_hz", "couplings must be real");
        sys.couplings(k, l) = full(k, l).real();
      }
  } else {
    fail(where + ".couplings_hz", "expected a list or matrix");
  }
  sys.validate();
  return sys;
}

Operator parse_state(const json& j, const std::string& where, int n) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "thermal_z") return thermal_z_state(n);
    if (name == "lls") {
      if (n != 2) fail(where, "lls target requires a two-spin system");
      return lls_state();
    }
    if (name == "neg_thermal_z") return Operator(-thermal_z_state(n));
    fail(where, "unknown state name '" + name + "'");
  }
  Operator m = parse_matrix(j, where);
  if (m.rows() != (1 << n)) fail(where, "state dimension must be 2^n");
  return m;
}

Operator parse_gate(const json& j, const std::string& where, int n) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "cnot") {
      if (n != 2) fail(where, "cnot target requires a two-spin system");
      return cnot_gate();
    }
    fail(where, "unknown gate name '" + name + "'");
  }
  if (j.is_object()) {
    check_keys(j, where, {"pi_x_on"});
    const int k = get_int(j, where, "pi_x_on");
    if (k < 1 || k > n) fail(where + ".pi_x_on", "spin index out of range");
    return pi_x_gate(n, k);
  }
  Operator m = parse_matrix(j, where);
  if (m.rows() != (1 << n)) fail(where, "gate dimension must be 2^n");
  return m;
}

ControlTask parse_task(const json& j, const std::string& where, int n) {
  const std::string type = get_str_or(j, where, "type", "");
  if (type == "state") {
    check_keys(j, where, {"type", "rho0", "rhoF"});
    return ControlTask::state_transfer(parse_state(require(j, where, "rho0"), where + ".rho0", n),
                                       parse_state(require(j, where, "rhoF"), where + ".rhoF", n));
  }
  if (type == "gate") {
    check_keys(j, where, {"type", "target"});
    return ControlTask::gate_synthesis(parse_gate(require(j, where, "target"), where + ".target", n));
  }
  fail(where + ".type", "must be 'state' or 'gate'");
}

RfiDistribution parse_rfi(const json& j, const std::string& where) {
  check_keys(j, where, {"scales", "probs"});
  RfiDistribution rfi;
  rfi.scales = get_vec(j, where, "scales");
  rfi.probs = get_vec(j, where, "probs");
  if (rfi.scales.empty() || rfi.scales.size() != rfi.probs.size())
    fail(where, "scales and probs must be nonempty and equal length");
  double sum = 0.0;
  for (double p : rfi.probs) {
    if (p < 0.0) fail(where + ".probs", "probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) fail(where + ".probs", "probabilities must sum to 1");
  return rfi;
}

CpmgSpec parse_cpmg(const json& j, const std::string& where) {
  check_keys(j, where, {"n_pulses", "pi_amplitude_rad_s"});
  CpmgSpec cpmg;
  cpmg.n_pulses = get_int(j, where, "n_pulses");
  cpmg.pi_amplitude = get_num(j, where, "pi_amplitude_rad_s");
  if (cpmg.n_pulses < 1) fail(where + ".n_pulses", "must be >= 1");
  if (!(cpmg.pi_amplitude > 0.0)) fail(where + ".pi_amplitude_rad_s", "must be > 0");
  return cpmg;
}

Algorithm parse_algorithm(const std::string& name, const std::string& where) {
  if (name == "grape") return Algorithm::Grape;
  if (name == "sagrape") return Algorithm::Sagrape;
  if (name == "rsagrape") return Algorithm::Rsagrape;
  fail(where, "algorithm must be grape, sagrape, or rsagrape");
}

OptimizerConfig parse_optimizer(const json& j, const std::string& where,
                                const OptimizerConfig& base, bool allow_name) {
  std::set<std::string> allowed = {"algorithm",  "epsilon",       "kappa",
                                   "t0",         "gamma",         "neighbor_scale_hz",
                                   "zeta_hz",    "noise_ensemble", "max_iters",
                                   "target_fidelity", "budget_s", "max_evals",
                                   "seed",       "cpmg"};
  if (allow_name) allowed.insert("name");
  check_keys(j, where, allowed);
  OptimizerConfig cfg = base;
  if (j.contains("algorithm"))
    cfg.algorithm = parse_algorithm(get_str_or(j, where, "algorithm", ""), where + ".algorithm");
  cfg.epsilon = get_num_or(j, where, "epsilon", base.epsilon);
  cfg.kappa = get_int_or(j, where, "kappa", base.kappa);
  cfg.t0 = get_num_or(j, where, "t0", base.t0);
  cfg.gamma = get_num_or(j, where, "gamma", base.gamma);
  cfg.neighbor_scale =
      kTwoPi * get_num_or(j, where, "neighbor_scale_hz", base.neighbor_scale / kTwoPi);
  cfg.zeta_hz = get_num_or(j, where, "zeta_hz", base.zeta_hz);
  cfg.noise_ensemble = get_int_or(j, where, "noise_ensemble", base.noise_ensemble);
  cfg.max_iters = get_int_or(j, where, "max_iters", base.max_iters);
  cfg.target_fidelity = get_num_or(j, where, "target_fidelity", base.target_fidelity);
  cfg.budget_s = get_num_or(j, where, "budget_s", base.budget_s);
  if (j.contains("max_evals")) {
    if (!j.at("max_evals").is_number_unsigned() && !j.at("max_evals").is_number_integer())
      fail(where + ".max_evals", "expected an integer");
    cfg.max_evals = j.at("max_evals").get<std::uint64_t>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() && !j.at("seed").is_number_unsigned())
      fail(where + ".seed", "expected an integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("cpmg")) cfg.cpmg = parse_cpmg(j.at("cpmg"), where + ".cpmg");
  cfg.validate();
  return cfg;
}

NoiseModel parse_noise(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "zeta_hz", "sigma_hz", "tau_c_s"});
  NoiseModel model;
  const std::string kind = get_str_or(j, where, "kind", "");
  if (kind == "uniform") {
    model.kind = NoiseModel::Kind::UniformPerSegment;
    model.zeta_hz = get_num(j, where, "zeta_hz");
  } else if (kind == "ou") {
    model.kind = NoiseModel::Kind::OrnsteinUhlenbeck;
    model.sigma_hz = get_num(j, where, "sigma_hz");
    model.tau_c_s = get_num(j, where, "tau_c_s");
    if (!(model.tau_c_s > 0.0)) fail(where + ".tau_c_s", "must be > 0");
  } else {
    fail(where + ".kind", "must be 'uniform' or 'ou'");
  }
  return model;
}

json echo_optimizer(const OptimizerConfig& cfg) {
  json out;
  out["algorithm"] = to_string(cfg.algorithm);
  out["epsilon"] = cfg.epsilon;
  out["kappa"] = cfg.kappa;
  out["t0"] = cfg.t0;
  out["gamma"] = cfg.gamma;
  out["neighbor_scale_hz"] = cfg.neighbor_scale / kTwoPi;
  out["zeta_hz"] = cfg.zeta_hz;
  out["noise_ensemble"] = cfg.noise_ensemble;
  out["max_iters"] = cfg.max_iters;
  out["target_fidelity"] = cfg.target_fidelity;
  out["budget_s"] = cfg.budget_s;
  out["max_evals"] = cfg.max_evals;
  out["seed"] = cfg.seed;
  if (cfg.cpmg.n_pulses > 0)
    out["cpmg"] = {{"n_pulses", cfg.cpmg.n_pulses},
                   {"pi_amplitude_rad_s", cfg.cpmg.pi_amplitude}};
  return out;
}

}  // namespace

RunConfig parse_run_config_json(const json& doc) {
  check_keys(doc, "config",
             {"system", "task", "pulse", "rfi", "optimizer", "output_dir",
              "benchmark", "noisespec", "robustness"});
  RunConfig cfg;
  cfg.system = parse_system(require(doc, "config", "system"), "system");
  cfg.task = parse_task(require(doc, "config", "task"), "task", cfg.system.n);

  const json& pulse = require(doc, "config", "pulse");
  check_keys(pulse, "pulse",
             {"duration_s", "segments", "initial", "file", "init_amp_hz", "amp_max_hz"});
  cfg.duration_s = get_num(pulse, "pulse", "duration_s");
  cfg.segments = get_int(pulse, "pulse", "segments");
  if (cfg.segments < 1) fail("pulse.segments", "must be >= 1");
  if (!(cfg.duration_s > 0.0)) fail("pulse.duration_s", "must be > 0");
  cfg.initial = get_str_or(pulse, "pulse", "initial", "zero");
  if (cfg.initial != "zero" && cfg.initial != "random" && cfg.initial != "file")
    fail("pulse.initial", "must be zero, random, or file");
  cfg.pulse_file = get_str_or(pulse, "pulse", "file", "");
  if (cfg.initial == "file" && cfg.pulse_file.empty())
    fail("pulse.file", "required when initial = file");
  cfg.init_amp = kTwoPi * get_num_or(pulse, "pulse", "init_amp_hz", 50.0);

  cfg.rfi = parse_rfi(require(doc, "config", "rfi"), "rfi");

  OptimizerConfig defaults;
  cfg.optimizer = parse_optimizer(require(doc, "config", "optimizer"), "optimizer",
                                  defaults, false);
  cfg.optimizer.amp_max = kTwoPi * get_num_or(pulse, "pulse", "amp_max_hz", 0.0);
  cfg.output_dir = get_str_or(doc, "config", "output_dir", "out");

  if (doc.contains("benchmark")) {
    const json& b = doc.at("benchmark");
    check_keys(b, "benchmark", {"trials", "algorithms"});
    cfg.benchmark.present = true;
    cfg.benchmark.trials = get_int(b, "benchmark", "trials");
    if (cfg.benchmark.trials < 1) fail("benchmark.trials", "must be >= 1");
    const json& algos = require(b, "benchmark", "algorithms");
    if (!algos.is_array() || algos.empty())
      fail("benchmark.algorithms", "expected a nonempty array");
    for (std::size_t i = 0; i < algos.size(); ++i) {
      const std::string where = "benchmark.algorithms[" + std::to_string(i) + "]";
      BenchmarkAlgorithm algo;
      algo.config = parse_optimizer(algos.at(i), where, cfg.optimizer, true);
      algo.name = get_str_or(algos.at(i), where, "name", to_string(algo.config.algorithm));
      cfg.benchmark.algorithms.push_back(std::move(algo));
    }
  }

  if (doc.contains("noisespec")) {
    const json& s = doc.at("noisespec");
    check_keys(s, "noisespec",
               {"deltas_s", "noise", "trials", "max_echoes", "dt_s",
                "pi_amplitude_rad_s"});
    cfg.noisespec.present = true;
    cfg.noisespec.deltas_s = get_vec(s, "noisespec", "deltas_s");
    if (cfg.noisespec.deltas_s.empty()) fail("noisespec.deltas_s", "must be nonempty");
    for (double d : cfg.noisespec.deltas_s)
      if (!(d > 0.0)) fail("noisespec.deltas_s", "must be strictly positive");
    cfg.noisespec.noise = parse_noise(require(s, "noisespec", "noise"), "noisespec.noise");
    cfg.noisespec.trials = get_int(s, "noisespec", "trials");
    cfg.noisespec.max_echoes = get_int(s, "noisespec", "max_echoes");
    cfg.noisespec.dt_s = get_num(s, "noisespec", "dt_s");
    cfg.noisespec.pi_amplitude = get_num(s, "noisespec", "pi_amplitude_rad_s");
    if (!(cfg.noisespec.pi_amplitude > 0.0))
      fail("noisespec.pi_amplitude_rad_s", "must be > 0");
  }

  if (doc.contains("robustness")) {
    const json& r = doc.at("robustness");
    check_keys(r, "robustness",
               {"pulses", "strengths_hz", "trials", "storage_s", "refresh_s"});
    cfg.robustness.present = true;
    const json& pulses = require(r, "robustness", "pulses");
    if (!pulses.is_array() || pulses.empty())
      fail("robustness.pulses", "expected a nonempty array");
    for (std::size_t i = 0; i < pulses.size(); ++i) {
      const std::string where = "robustness.pulses[" + std::to_string(i) + "]";
      check_keys(pulses.at(i), where, {"label", "file"});
      cfg.robustness.pulses.emplace_back(get_str_or(pulses.at(i), where, "label", ""),
                                         get_str_or(pulses.at(i), where, "file", ""));
      if (cfg.robustness.pulses.back().second.empty()) fail(where + ".file", "required");
    }
    cfg.robustness.strengths_hz = get_vec(r, "robustness", "strengths_hz");
    cfg.robustness.trials = get_int(r, "robustness", "trials");
    if (cfg.robustness.trials < 1) fail("robustness.trials", "must be >= 1");
    cfg.robustness.storage_s = get_num_or(r, "robustness", "storage_s", 0.0);
    cfg.robustness.refresh_s = get_num_or(r, "robustness", "refresh_s", 0.0);
  }

  // Echo with every default resolved.
  json echo;
  echo["system"] = {{"n", cfg.system.n}};
  {
    json offs = json::array();
    for (double o : cfg.system.offsets) offs.push_back(o / kTwoPi);
    echo["system"]["offsets_hz"] = offs;
    json rows = json::array();
    for (int k = 0; k < cfg.system.n; ++k) {
      json row = json::array();
      for (int l = 0; l < cfg.system.n; ++l) row.push_back(cfg.system.couplings(k, l));
      rows.push_back(row);
    }
    echo["system"]["couplings_hz"] = rows;
  }
  echo["task"] = doc.at("task");
  echo["pulse"] = {{"duration_s", cfg.duration_s},
                   {"segments", cfg.segments},
                   {"initial", cfg.initial},
                   {"init_amp_hz", cfg.init_amp / kTwoPi},
                   {"amp_max_hz", cfg.optimizer.amp_max / kTwoPi}};
  if (!cfg.pulse_file.empty()) echo["pulse"]["file"] = cfg.pulse_file;
  echo["rfi"] = {{"scales", cfg.rfi.scales}, {"probs", cfg.rfi.probs}};
  echo["optimizer"] = echo_optimizer(cfg.optimizer);
  echo["output_dir"] = cfg.output_dir;
  if (cfg.benchmark.present) {
    json algos = json::array();
    for (const BenchmarkAlgorithm& a : cfg.benchmark.algorithms) {
      json e = echo_optimizer(a.config);
      e["name"] = a.name;
      algos.push_back(e);
    }
    echo["benchmark"] = {{"trials", cfg.benchmark.trials}, {"algorithms", algos}};
  }
  if (doc.contains("noisespec")) echo["noisespec"] = doc.at("noisespec");
  if (doc.contains("robustness")) {
    json r = doc.at("robustness");
    r["storage_s"] = cfg.robustness.storage_s;
    r["refresh_s"] = cfg.robustness.refresh_s;
    echo["robustness"] = r;
  }
  cfg.resolved = echo;
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return parse_run_config_json(doc);
}

PulseSequence RunConfig::initial_pulse() const {
  const double tau = duration_s / segments;
  PulseSequence p;
  if (initial == "file") {
    p = import_pulse(pulse_file);
    if (p.segments != segments || std::abs(p.tau - tau) > 1e-12 * tau)
      throw std::invalid_argument("config: pulse.file does not match pulse block");
    if (optimizer.cpmg.n_pulses > 0)
      p = freeze_cpmg(p, optimizer.cpmg.n_pulses, optimizer.cpmg.pi_amplitude);
    return p;
  }
  PulseInit init;
  init.segments = segments;
  init.tau = tau;
  init.init_amp = initial == "random" ? init_amp : 0.0;
  init.cpmg = optimizer.cpmg;
  return random_initial_pulse(init, optimizer.seed);
}

}  // namespace qoc
