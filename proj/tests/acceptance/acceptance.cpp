// Acceptance harness: one criterion per function, one pass/fail line each.
// Run all criteria or a single one with --only <1..9>.
#include "qoc/config.hpp"
#include "qoc/hybrid.hpp"
#include "qoc/objective.hpp"
#include "qoc/rng.hpp"
#include "qoc/shapefile.hpp"
#include "qoc/simulate.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace qoc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::printf("    check failed: %s\n", what.c_str());
    ++g_failures;
  }
}

PulseSequence random_pulse(int segments, double tau, double amp, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  PulseSequence p = PulseSequence::zero(segments, tau);
  for (int j = 0; j < segments; ++j) {
    p.amps_x[j] = u(rng);
    p.amps_y[j] = u(rng);
  }
  return p;
}

// ---------------------------------------------------------------------------
// 1. Gradient exactness against central finite differences.

bool criterion1() {
  // Scales chosen so the first-order gradient dominates both the finite
  // difference truncation and the subtraction roundoff: per-segment
  // rotation angles stay ~1e-5 rad while every gradient entry is
  // first-order nonzero at the test point, so the entrywise quotient is
  // numerically meaningful.
  const double tau = 5e-7, amp = 20.0, h = 0.5, tol = 1e-5;
  auto rng = make_rng(101);
  std::uniform_real_distribution<double> uscale(0.8, 1.2);
  std::uniform_real_distribution<double> uprob(0.1, 1.0);

  int checked = 0;
  double worst = 0.0;
  for (int n : {1, 2}) {
    SpinSystem sys;
    sys.n = n;
    sys.couplings = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) sys.offsets.push_back(kTwoPi * (1.1 + 0.9 * k));
    if (n == 2) sys.couplings(0, 1) = sys.couplings(1, 0) = 1.7;
    const SystemOperators ops = SystemOperators::build(sys);

    const Operator tilted =
        collective_control(n, Axis::X) + 0.6 * collective_control(n, Axis::Y);
    std::vector<ControlTask> tasks;
    tasks.push_back(ControlTask::state_transfer(thermal_z_state(n), tilted));
    tasks.push_back(ControlTask::gate_synthesis(expm_hermitian(
        0.5 * collective_control(n, Axis::X) + 0.35 * collective_control(n, Axis::Y) +
            0.2 * dephasing_generator(n),
        1.0)));

    for (int segments : {5, 20}) {
      for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        RfiDistribution rfi;
        double psum = 0.0;
        for (int m = 0; m < 3; ++m) {
          rfi.scales.push_back(uscale(rng));
          rfi.probs.push_back(uprob(rng));
          psum += rfi.probs.back();
        }
        for (double& p : rfi.probs) p /= psum;

        const PulseSequence pulse =
            random_pulse(segments, tau, amp, 7000 + 10 * n + segments + ti);
        const GradientField g = gradient(ops, pulse, tasks[ti], rfi);
        for (int j = 0; j < segments; ++j)
          for (bool x : {true, false}) {
            PulseSequence plus = pulse, minus = pulse;
            (x ? plus.amps_x : plus.amps_y)[j] += h;
            (x ? minus.amps_x : minus.amps_y)[j] -= h;
            const double fd = (fidelity(ops, plus, tasks[ti], rfi) -
                               fidelity(ops, minus, tasks[ti], rfi)) / (2.0 * h);
            const double an = x ? g.gx[j] : g.gy[j];
            const double rel = std::abs(an - fd) / std::max(std::abs(fd), std::abs(an));
            worst = std::max(worst, rel);
            ++checked;
          }
      }
    }
  }
  std::printf("    %d entries, worst relative error %.3g (tol %.1g)\n", checked,
              worst, tol);
  expect(worst < tol, "gradient/finite-difference relative error < 1e-5");
  return g_failures == 0;
}

// ---------------------------------------------------------------------------
// 2. Unitarity and isospectrality invariants over 1e3 random cases.

bool criterion2() {
  auto rng = make_rng(202);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst_unit = 0.0, worst_spec = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 2 << (trial % 3);
    const double scale = std::pow(10.0, (trial % 7) - 3);
    Operator a(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
    const Operator ham = (0.5 * scale) * (a + a.adjoint().eval());
    const Operator u = expm_hermitian(ham, 1e-3 * (1 + trial % 5));
    worst_unit = std::max(worst_unit, unitarity_defect(u));

    Operator b(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) b(r, c) = Complex(gauss(rng), gauss(rng));
    const Operator rho = 0.5 * (b + b.adjoint().eval());
    const Operator rho2 = evolve_state(rho, u);
    Eigen::SelfAdjointEigenSolver<Operator> e1(rho), e2(rho2);
    worst_spec = std::max(worst_spec,
                          (e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff());
  }
  std::printf("    1000 cases, worst unitarity defect %.3g, worst spectrum drift %.3g\n",
              worst_unit, worst_spec);
  expect(worst_unit < 1e-10, "unitarity within 1e-10");
  expect(worst_spec < 1e-10, "isospectrality within 1e-10");
  return g_failures == 0;
}

// ---------------------------------------------------------------------------
// 3. Acceptance-threshold kernel on a 1e4-point grid.

bool criterion3() {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i)
    for (int j = 1; j <= 100; ++j) {
      const double dphi = -1.0 + 2.0 * i / 99.0;
      const double temp = j / 100.0;
      const double d = threshold(dphi, temp);
      const double direct = -std::min(1.0, temp * std::exp(dphi / temp));
      worst = std::max(worst, std::abs(d - direct));
      expect(d <= 0.0 && d >= -1.0, "threshold bounded in [-1, 0]");
      if (dphi >= 0.0) expect(dphi >= d, "improving move accepted");
      if (g_failures) return false;
    }
  std::printf("    10000 grid points, worst deviation from direct formula %.3g\n",
              worst);
  expect(worst < 1e-14, "threshold matches direct evaluation");
  return g_failures == 0;
}

// ---------------------------------------------------------------------------
// 4. Selective pi pulse on spin 1 of a 3-spin system (surrogate offsets).

bool criterion4() {
  SpinSystem sys;
  sys.n = 3;
  sys.offsets = {kTwoPi * -2000.0, 0.0, kTwoPi * 2500.0};  // surrogate values
  sys.couplings = Eigen::MatrixXd::Zero(3, 3);
  sys.couplings(0, 1) = sys.couplings(1, 0) = 50.0;
  sys.couplings(0, 2) = sys.couplings(2, 0) = 30.0;
  sys.couplings(1, 2) = sys.couplings(2, 1) = 10.0;

  RfiDistribution rfi;
  rfi.scales = {0.8, 1.0, 1.2};
  rfi.probs = {0.2, 0.6, 0.2};

  const auto task = ControlTask::gate_synthesis(pi_x_gate(3, 1));

  OptimizerConfig cfg;
  cfg.algorithm = Algorithm::Sagrape;
  cfg.epsilon = 3e9;
  cfg.kappa = 50;
  cfg.t0 = 1.0;
  cfg.gamma = 0.99;
  cfg.neighbor_scale = kTwoPi * 20.0;
  cfg.max_iters = 500;
  cfg.target_fidelity = 0.99;
  cfg.seed = 404;

  const PulseSequence p0 = random_pulse(360, 1e-6, kTwoPi * 300.0, 404);
  const OptimizationResult r = optimize_sagrape(sys, task, rfi, p0, cfg);
  std::printf("    fidelity %.6f after %d outer iterations (%s)\n", r.final_fidelity,
              int(r.trace.back().iteration), to_string(r.stop_reason).c_str());
  // Note: with the surrogate offsets above, independent multi-restart runs all
  // plateau at ~0.873 (RFI-averaged) / ~0.908 (nominal amplitude), so this
  // target appears unreachable at the pinned 360 us duration.  The criterion is
  // kept as stated and reports its honest result.
  expect(r.final_fidelity >= 0.99, "SAGRAPE-50 selective pi fidelity >= 0.99");
  return g_failures == 0;
}

// ---------------------------------------------------------------------------
// Shared TCP system (two-spin, 127.4 Hz offset difference, J = 8.8 Hz).

SpinSystem tcp_system() {
  SpinSystem sys;
  sys.n = 2;
  sys.offsets = {0.0, kTwoPi * 127.4};
  sys.couplings = Eigen::MatrixXd::Zero(2, 2);
  sys.couplings(0, 1) = sys.couplings(1, 0) = 8.8;
  return sys;
}

RfiDistribution tcp_rfi() {
  RfiDistribution rfi;
  rfi.scales = {0.9, 1.0, 1.1};
  rfi.probs = {0.2, 0.6, 0.2};
  return rfi;
}

// ---------------------------------------------------------------------------
// 5. LLS preparation with RSAGRAPE and six frozen CPMG pi pulses.

OptimizationResult run_lls(Algorithm algo, int n_cpmg, std::uint64_t seed,
                           int max_iters) {
  const SpinSystem sys = tcp_system();
  const auto task = ControlTask::state_transfer(thermal_z_state(2), lls_state());
  const double bound = attainability_bound(thermal_z_state(2), lls_state());

  OptimizerConfig cfg;
  cfg.algorithm = algo;
  cfg.epsilon = 1e5;
  cfg.kappa = algo == Algorithm::Grape ? 0 : 10;
  cfg.neighbor_scale = kTwoPi * 10.0;
  cfg.max_iters = max_iters;
  cfg.target_fidelity = 0.995 * bound;
  cfg.seed = seed;
  if (algo == Algorithm::Rsagrape) {
    cfg.zeta_hz = 5.0;
    cfg.noise_ensemble = 10;
  }
  if (n_cpmg > 0) {
    cfg.cpmg.n_pulses = n_cpmg;
    cfg.cpmg.pi_amplitude = 9941.0;
  }

  PulseSequence p0 = random_pulse(250, 0.079 / 250.0, kTwoPi * 40.0, seed);
  if (n_cpmg > 0) p0 = freeze_cpmg(p0, n_cpmg, 9941.0);
  return optimize(sys, task, tcp_rfi(), p0, cfg);
}

bool criterion5() {
  const double bound = attainability_bound(thermal_z_state(2), lls_state());
  const OptimizationResult r = run_lls(Algorithm::Rsagrape, 6, 505, 4000);
  std::printf("    noiseless fidelity %.6f, bound %.6f, ratio %.4f (%s)\n",
              r.final_fidelity, bound, r.final_fidelity / bound,
              to_string(r.stop_reason).c_str());
  expect(r.final_fidelity >= 0.99 * bound,
         "RSAGRAPE+CPMG noiseless fidelity >= 0.99 x attainability bound");
  return g_failures == 0;
}

// ---------------------------------------------------------------------------
// 6. Convergence ordering: SAGRAPE-50 vs GRAPE at a fixed evaluation budget.

bool criterion6() {
  const SpinSystem sys = tcp_system();
  const int segments = 600;
  const double tau = 0.120 / segments;
  const std::uint64_t budget = 6000;
  const int seeds = 5;

  struct TaskSpec {
    const char* name;
    ControlTask task;
    double epsilon;
  };
  const std::vector<TaskSpec> specs = {
      // Shared conservative step size: the ordering claim lives in the regime
      // where neither algorithm converges within the budget.
      {"lls", ControlTask::state_transfer(thermal_z_state(2), lls_state()), 500.0},
      {"cnot", ControlTask::gate_synthesis(cnot_gate()), 500.0},
  };

  for (const TaskSpec& spec : specs) {
    OptimizerConfig grape;
    grape.algorithm = Algorithm::Grape;
    grape.epsilon = spec.epsilon;
    grape.max_iters = 1000000;
    grape.max_evals = budget;
    OptimizerConfig sagrape = grape;
    sagrape.algorithm = Algorithm::Sagrape;
    sagrape.kappa = 50;
    sagrape.neighbor_scale = kTwoPi * 10.0;

    PulseInit init;
    init.segments = segments;
    init.tau = tau;
    init.init_amp = kTwoPi * 50.0;
    const BenchmarkResult r = benchmark_convergence(
        sys, spec.task, tcp_rfi(), {{"grape", grape}, {"sagrape", sagrape}}, seeds,
        init, 606);

    double means[2] = {0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
      std::printf("    %s %-8s final infidelities:", spec.name,
                  r.algorithms[a].name.c_str());
      for (const OptimizationResult& t : r.algorithms[a].trials) {
        means[a] += 1.0 - t.final_fidelity;
        std::printf(" %.4f", 1.0 - t.final_fidelity);
      }
      means[a] /= seeds;
      std::printf("  (mean %.4f)\n", means[a]);
    }
    expect(means[1] <= means[0],
           std::string(spec.name) + ": SAGRAPE-50 mean infidelity <= GRAPE");
  }
  return g_failures == 0;
}

// ---------------------------------------------------------------------------
// 7. Robustness ordering of prepared singlet order under z-noise.

bool criterion7() {
  const SpinSystem sys = tcp_system();
  std::printf("    optimizing the three preparation pulses...\n");
  const PulseSequence grape = run_lls(Algorithm::Grape, 0, 707, 4000).best_pulse;
  const PulseSequence grape_cpmg = run_lls(Algorithm::Grape, 6, 707, 4000).best_pulse;
  const PulseSequence rsag_cpmg = run_lls(Algorithm::Rsagrape, 6, 707, 4000).best_pulse;

  const std::vector<double> strengths = {0.0, 2.0, 5.0, 10.0, 20.0, 40.0};
  const int trials = 200;
  struct Curve {
    const char* name;
    const PulseSequence* pulse;
    std::vector<double> mean, se;
  };
  std::vector<Curve> curves = {{"grape", &grape, {}, {}},
                               {"grape+cpmg", &grape_cpmg, {}, {}},
                               {"rsagrape+cpmg", &rsag_cpmg, {}, {}}};
  // Field redrawn every 20 ms: slow enough for the CPMG train (echo spacing
  // ~13 ms) to refocus most of it, fast enough that the residual rewards
  // noise-trained pulses.
  SingletOrderOptions opts;
  opts.refresh_s = 0.020;
  for (Curve& c : curves) {
    for (std::size_t s = 0; s < strengths.size(); ++s) {
      const auto samples =
          singlet_order_samples(sys, *c.pulse, strengths[s], trials, 7000 + s, opts);
      const RobustnessPoint p = robustness_point(c.name, strengths[s], samples);
      c.mean.push_back(p.mean_order);
      c.se.push_back(p.stderr_order);
    }
    std::printf("    %-14s", c.name);
    for (double m : c.mean) std::printf(" %.4f", m);
    std::printf("\n");
  }
  // Ordering at moderate-to-high noise, within two standard errors.
  for (std::size_t s = 2; s < strengths.size(); ++s) {
    const double se01 = 2.0 * std::hypot(curves[0].se[s], curves[1].se[s]);
    const double se12 = 2.0 * std::hypot(curves[1].se[s], curves[2].se[s]);
    expect(curves[1].mean[s] >= curves[0].mean[s] - se01,
           "grape+cpmg >= grape at strength " + std::to_string(strengths[s]));
    expect(curves[2].mean[s] >= curves[1].mean[s] - se12,
           "rsagrape+cpmg >= grape+cpmg at strength " + std::to_string(strengths[s]));
  }
  return g_failures == 0;
}

// ---------------------------------------------------------------------------
// 8. Noise spectroscopy against a known Lorentzian spectrum.

bool criterion8() {
  SpinSystem sys;
  sys.n = 1;
  sys.offsets = {0.0};
  sys.couplings = Eigen::MatrixXd::Zero(1, 1);

  NoiseModel ou;
  ou.kind = NoiseModel::Kind::OrnsteinUhlenbeck;
  ou.sigma_hz = 1.5;
  ou.tau_c_s = 0.020;

  PulseSequence pi_pulse = PulseSequence::zero(1, std::numbers::pi / 9941.0);
  pi_pulse.amps_x[0] = 9941.0;

  // nu = 1/(2 delta) spanning one decade: 4, 8, 16, 40 Hz
  const std::vector<double> deltas = {0.125, 0.0625, 0.03125, 0.0125};
  const SpectroscopyResult res =
      noise_spectrum(sys, pi_pulse, deltas, ou, 300, 400, 808, 1e-3);

  for (const SpectroscopyRow& row : res.rows) {
    expect(row.nu_hz == 1.0 / (2.0 * row.delta_s), "nu identity exact");
    expect(row.s_per_s ==
               std::numbers::pi * std::numbers::pi / (4.0 * row.t2_s),
           "S identity exact");
    expect(row.fit_ok, "decay fit succeeded");
    // Two-sided Lorentzian PSD of the OU process at omega = pi/delta,
    // in the decay-rate normalization 1/T2 = (4/pi^2) S(omega).
    const double omega = std::numbers::pi / row.delta_s;
    const double sigma_rad = kTwoPi * ou.sigma_hz;
    const double s_true = 2.0 * sigma_rad * sigma_rad * ou.tau_c_s /
                          (1.0 + omega * omega * ou.tau_c_s * ou.tau_c_s);
    const double ratio = row.s_per_s / s_true;
    std::printf("    nu %5.1f Hz: S_meas %.4g, S_true %.4g, ratio %.2f\n", row.nu_hz,
                row.s_per_s, s_true, ratio);
    expect(ratio > 0.5 && ratio < 2.0, "recovered S within a factor of 2");
  }
  return g_failures == 0;
}

// ---------------------------------------------------------------------------
// 9. Determinism of CLI artifacts under identical config and seed.

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strip a named column from a CSV (timing columns vary between runs).
std::string drop_column(const std::string& csv, const std::string& column) {
  std::stringstream in(csv), out;
  std::string line;
  int drop = -1;
  bool header = true;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    int idx = 0;
    bool first = true;
    while (std::getline(ls, cell, ',')) {
      if (header && cell == column) drop = idx;
      if (idx != drop) {
        if (!first) out << ',';
        out << cell;
        first = false;
      }
      ++idx;
    }
    out << '\n';
    header = false;
  }
  return out.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QOC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

bool criterion9() {
  const fs::path dir = fs::temp_directory_path() / "qoc_acceptance_c9";
  fs::remove_all(dir);
  fs::create_directories(dir);

  json doc;
  doc["system"] = {{"n", 2}, {"offsets_hz", {0.0, 127.4}}, {"couplings_hz", {8.8}}};
  doc["task"] = {{"type", "state"}, {"rho0", "thermal_z"}, {"rhoF", "lls"}};
  doc["pulse"] = {{"duration_s", 0.02}, {"segments", 50}, {"initial", "random"},
                  {"init_amp_hz", 50.0}};
  doc["rfi"] = {{"scales", {0.9, 1.0, 1.1}}, {"probs", {0.2, 0.6, 0.2}}};
  doc["optimizer"] = {{"algorithm", "rsagrape"}, {"epsilon", 1e4}, {"kappa", 5},
                      {"zeta_hz", 5.0}, {"noise_ensemble", 3}, {"max_iters", 30},
                      {"seed", 909}};
  doc["benchmark"] = {{"trials", 2},
                      {"algorithms", {{{"algorithm", "grape"}, {"kappa", 0},
                                       {"max_iters", 10}},
                                      {{"algorithm", "sagrape"}, {"kappa", 5},
                                       {"max_iters", 10}}}}};
  doc["noisespec"] = {{"deltas_s", {0.02, 0.04}},
                      {"noise", {{"kind", "ou"}, {"sigma_hz", 2.0}, {"tau_c_s", 0.01}}},
                      {"trials", 20}, {"max_echoes", 40}, {"dt_s", 1e-3},
                      {"pi_amplitude_rad_s", 9941.0}};
  const fs::path cfg_path = dir / "run.json";

  // robustness needs an exported pulse to point at; generate it first
  doc["output_dir"] = (dir / "a").string();
  {
    std::ofstream out(cfg_path);
    out << doc.dump(2) << '\n';
  }
  expect(run_cli("optimize --config " + cfg_path.string()) == 0, "optimize run A");
  doc["robustness"] = {{"pulses", {{{"label", "p"},
                                    {"file", (dir / "a" / "pulse.shape").string()}}}},
                       {"strengths_hz", {0.0, 10.0}}, {"trials", 20}};

  auto run_all = [&](const std::string& out_dir) {
    doc["output_dir"] = out_dir;
    std::ofstream out(cfg_path);
    out << doc.dump(2) << '\n';
    out.close();
    expect(run_cli("optimize --config " + cfg_path.string()) == 0, "optimize");
    expect(run_cli("benchmark --config " + cfg_path.string()) == 0, "benchmark");
    expect(run_cli("noisespec --config " + cfg_path.string()) == 0, "noisespec");
    expect(run_cli("robustness --config " + cfg_path.string()) == 0, "robustness");
  };
  run_all((dir / "run1").string());
  run_all((dir / "run2").string());
  if (g_failures) return false;

  auto same = [&](const std::string& file, const char* timing_column) {
    std::string a = slurp(dir / "run1" / file);
    std::string b = slurp(dir / "run2" / file);
    expect(!a.empty(), file + " exists");
    if (timing_column) {
      a = drop_column(a, timing_column);
      b = drop_column(b, timing_column);
    }
    expect(a == b, file + " identical across reruns");
  };
  same("pulse.shape", nullptr);
  same("trace.csv", "wallclock_s");
  same("convergence.csv", "wallclock_s");
  same("spectroscopy.csv", nullptr);
  same("robustness.csv", nullptr);

  // result.json differs only through the echoed output_dir; compare the rest
  json r1 = json::parse(slurp(dir / "run1" / "result.json"));
  json r2 = json::parse(slurp(dir / "run2" / "result.json"));
  r1["config"].erase("output_dir");
  r2["config"].erase("output_dir");
  expect(r1 == r2, "result.json identical across reruns");

  fs::remove_all(dir);
  return g_failures == 0;
}

struct Criterion {
  int id;
  const char* name;
  bool (*fn)();
};

const Criterion kCriteria[] = {
    {1, "gradient exactness vs finite differences", criterion1},
    {2, "propagator unitarity and isospectrality", criterion2},
    {3, "annealing acceptance threshold kernel", criterion3},
    {4, "selective pi benchmark (3-spin surrogate)", criterion4},
    {5, "LLS preparation with RSAGRAPE + CPMG", criterion5},
    {6, "convergence ordering SAGRAPE-50 vs GRAPE", criterion6},
    {7, "robustness ordering under z-noise", criterion7},
    {8, "noise spectroscopy vs Lorentzian oracle", criterion8},
    {9, "deterministic CLI artifacts", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    g_failures = 0;
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::printf("    exception: %s\n", e.what());
      ok = false;
    }
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", c.id, c.name);
    if (!ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
