#include "qoc/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qoc {

namespace {

struct Term {
  double scale = 1.0;
  double weight = 1.0;
  const NoiseTrajectory* noise = nullptr;
};

// Member-major, trajectory-minor ordering; the reduction always follows
// this fixed order so serial and parallel paths agree bit-for-bit.
std::vector<Term> make_terms(const RfiDistribution& rfi,
                             std::span<const NoiseTrajectory> noise) {
  rfi.validate();
  std::vector<Term> terms;
  const std::size_t traj = std::max<std::size_t>(1, noise.size());
  terms.reserve(rfi.scales.size() * traj);
  for (std::size_t m = 0; m < rfi.scales.size(); ++m) {
    if (noise.empty()) {
      terms.push_back({rfi.scales[m], rfi.probs[m], nullptr});
    } else {
      for (const NoiseTrajectory& t : noise)
        terms.push_back({rfi.scales[m], rfi.probs[m] / double(noise.size()), &t});
    }
  }
  return terms;
}

double state_norm_product(const ControlTask& task) {
  const double n0 = task.rho0.norm();
  const double nF = task.rhoF.norm();
  if (n0 <= 0.0 || nF <= 0.0)
    throw std::invalid_argument("state fidelity: rho0 and rhoF must have nonzero norm");
  return n0 * nF;
}

const double* eta_at(const NoiseTrajectory* noise, int j) {
  return noise == nullptr ? nullptr : &noise->etas_hz[static_cast<std::size_t>(j) - 1];
}

double term_fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                     const ControlTask& task, const Term& term) {
  if (task.kind == ControlTask::Kind::StateTransfer) {
    Operator rho = task.rho0;
    for (int j = 1; j <= pulse.segments; ++j) {
      const Operator u = expm_hermitian(
          segment_hamiltonian(ops, pulse, j, term.scale, eta_at(term.noise, j)),
          pulse.tau);
      rho = u * rho * u.adjoint();
    }
    return (task.rhoF * rho).trace().real() / state_norm_product(task);
  }
  Operator x = Operator::Identity(ops.dim, ops.dim);
  for (int j = 1; j <= pulse.segments; ++j) {
    const Operator u = expm_hermitian(
        segment_hamiltonian(ops, pulse, j, term.scale, eta_at(term.noise, j)),
        pulse.tau);
    x = u * x;
  }
  const Complex c = (x.adjoint() * task.uF).trace();
  const double d2 = double(ops.dim) * double(ops.dim);
  return std::norm(c) / d2;
}

// One forward/backward sweep per term: O(N) propagator applications.
void term_gradient(const SystemOperators& ops, const PulseSequence& pulse,
                   const ControlTask& task, const Term& term, double* gx,
                   double* gy) {
  const int n = pulse.segments;
  const double tau = pulse.tau;
  const double r = term.scale;
  std::vector<Operator> us(n);
  for (int j = 1; j <= n; ++j)
    us[j - 1] = expm_hermitian(
        segment_hamiltonian(ops, pulse, j, r, eta_at(term.noise, j)), tau);

  if (task.kind == ControlTask::Kind::StateTransfer) {
    const double den = state_norm_product(task);
    std::vector<Operator> rho(n);  // rho_j includes U_j
    Operator cur = task.rho0;
    for (int j = 0; j < n; ++j) {
      cur = us[j] * cur * us[j].adjoint();
      rho[j] = cur;
    }
    Operator lambda = task.rhoF;
    for (int j = n; j >= 1; --j) {
      if (!pulse.frozen[j - 1]) {
        gx[j - 1] = 2.0 * tau * r * (lambda * ops.hx * rho[j - 1]).trace().imag() / den;
        gy[j - 1] = 2.0 * tau * r * (lambda * ops.hy * rho[j - 1]).trace().imag() / den;
      } else {
        gx[j - 1] = 0.0;
        gy[j - 1] = 0.0;
      }
      lambda = us[j - 1].adjoint() * lambda * us[j - 1];
    }
    return;
  }

  const double d2 = double(ops.dim) * double(ops.dim);
  std::vector<Operator> x(n);  // X_j = U_j ... U_1
  Operator cur = Operator::Identity(ops.dim, ops.dim);
  for (int j = 0; j < n; ++j) {
    cur = us[j] * cur;
    x[j] = cur;
  }
  Operator p = task.uF;  // P_j = U_{j+1}^dag ... U_N^dag U_F
  for (int j = n; j >= 1; --j) {
    if (!pulse.frozen[j - 1]) {
      const Complex tr_px = (p.adjoint() * x[j - 1]).trace();
      const Complex tr_xhp_x = (x[j - 1].adjoint() * ops.hx * p).trace();
      const Complex tr_xhp_y = (x[j - 1].adjoint() * ops.hy * p).trace();
      gx[j - 1] = -2.0 * tau * r * (tr_px * tr_xhp_x).imag() / d2;
      gy[j - 1] = -2.0 * tau * r * (tr_px * tr_xhp_y).imag() / d2;
    } else {
      gx[j - 1] = 0.0;
      gy[j - 1] = 0.0;
    }
    p = us[j - 1].adjoint() * p;
  }
}

double eval_fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                     const ControlTask& task, const RfiDistribution& rfi,
                     std::span<const NoiseTrajectory> noise, bool parallel) {
  pulse.validate();
  task.validate(ops.dim);
  const std::vector<Term> terms = make_terms(rfi, noise);
  std::vector<double> vals(terms.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(terms.size()); ++i)
      vals[i] = term_fidelity(ops, pulse, task, terms[i]);
  } else {
    for (std::size_t i = 0; i < terms.size(); ++i)
      vals[i] = term_fidelity(ops, pulse, task, terms[i]);
  }
  double phi = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) phi += terms[i].weight * vals[i];
  return phi;
}

GradientField eval_gradient(const SystemOperators& ops, const PulseSequence& pulse,
                            const ControlTask& task, const RfiDistribution& rfi,
                            std::span<const NoiseTrajectory> noise, bool parallel) {
  pulse.validate();
  task.validate(ops.dim);
  const std::vector<Term> terms = make_terms(rfi, noise);
  const std::size_t n = static_cast<std::size_t>(pulse.segments);
  std::vector<std::vector<double>> txs(terms.size(), std::vector<double>(n));
  std::vector<std::vector<double>> tys(terms.size(), std::vector<double>(n));
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(terms.size()); ++i)
      term_gradient(ops, pulse, task, terms[i], txs[i].data(), tys[i].data());
  } else {
    for (std::size_t i = 0; i < terms.size(); ++i)
      term_gradient(ops, pulse, task, terms[i], txs[i].data(), tys[i].data());
  }
  GradientField g;
  g.gx.assign(n, 0.0);
  g.gy.assign(n, 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      g.gx[j] += terms[i].weight * txs[i][j];
      g.gy[j] += terms[i].weight * tys[i][j];
    }
  for (std::size_t j = 0; j < n; ++j)
    if (pulse.frozen[j]) {
      g.gx[j] = 0.0;
      g.gy[j] = 0.0;
    }
  return g;
}

}  // namespace

void ControlTask::validate(int dim) const {
  if (kind == Kind::StateTransfer) {
    if (rho0.rows() != dim || rhoF.rows() != dim)
      throw std::invalid_argument("ControlTask: state dimension mismatch");
    if (hermiticity_defect(rho0) > 1e-10 || hermiticity_defect(rhoF) > 1e-10)
      throw std::invalid_argument("ControlTask: rho0/rhoF must be Hermitian");
    if (rhoF.norm() <= 0.0)
      throw std::invalid_argument("ControlTask: rhoF must have nonzero norm");
  } else {
    if (uF.rows() != dim)
      throw std::invalid_argument("ControlTask: gate dimension mismatch");
    if (unitarity_defect(uF) > 1e-10)
      throw std::invalid_argument("ControlTask: target gate must be unitary");
  }
}

ControlTask ControlTask::state_transfer(Operator rho0, Operator rhoF) {
  ControlTask t;
  t.kind = Kind::StateTransfer;
  t.rho0 = std::move(rho0);
  t.rhoF = std::move(rhoF);
  return t;
}

ControlTask ControlTask::gate_synthesis(Operator uF) {
  ControlTask t;
  t.kind = Kind::GateSynthesis;
  t.uF = std::move(uF);
  return t;
}

Operator thermal_z_state(int n) { return collective_control(n, Axis::Z); }

Operator lls_state() {
  Operator s = Operator::Zero(4, 4);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z})
    s -= spin_operator(2, 1, a) * spin_operator(2, 2, a);
  return s;
}

Operator cnot_gate() {
  Operator u = Operator::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = 1.0;
  return u;
}

Operator pi_x_gate(int n, int k) {
  return expm_hermitian(spin_operator(n, k, Axis::X), std::numbers::pi);
}

double state_fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                      const ControlTask& task, const RfiDistribution& rfi,
                      std::span<const NoiseTrajectory> noise) {
  if (task.kind != ControlTask::Kind::StateTransfer)
    throw std::invalid_argument("state_fidelity: task is not a state transfer");
  return eval_fidelity(ops, pulse, task, rfi, noise, true);
}

double gate_fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                     const ControlTask& task, const RfiDistribution& rfi,
                     std::span<const NoiseTrajectory> noise) {
  if (task.kind != ControlTask::Kind::GateSynthesis)
    throw std::invalid_argument("gate_fidelity: task is not a gate synthesis");
  return eval_fidelity(ops, pulse, task, rfi, noise, true);
}

double fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                const ControlTask& task, const RfiDistribution& rfi,
                std::span<const NoiseTrajectory> noise) {
  return eval_fidelity(ops, pulse, task, rfi, noise, true);
}

GradientField state_gradient(const SystemOperators& ops, const PulseSequence& pulse,
                             const ControlTask& task, const RfiDistribution& rfi,
                             std::span<const NoiseTrajectory> noise) {
  if (task.kind != ControlTask::Kind::StateTransfer)
    throw std::invalid_argument("state_gradient: task is not a state transfer");
  return eval_gradient(ops, pulse, task, rfi, noise, true);
}

GradientField gate_gradient(const SystemOperators& ops, const PulseSequence& pulse,
                            const ControlTask& task, const RfiDistribution& rfi,
                            std::span<const NoiseTrajectory> noise) {
  if (task.kind != ControlTask::Kind::GateSynthesis)
    throw std::invalid_argument("gate_gradient: task is not a gate synthesis");
  return eval_gradient(ops, pulse, task, rfi, noise, true);
}

GradientField gradient(const SystemOperators& ops, const PulseSequence& pulse,
                       const ControlTask& task, const RfiDistribution& rfi,
                       std::span<const NoiseTrajectory> noise) {
  return eval_gradient(ops, pulse, task, rfi, noise, true);
}

double attainability_bound(const Operator& rho0, const Operator& rhoF) {
  const double n0 = rho0.norm();
  const double nF = rhoF.norm();
  if (n0 <= 0.0 || nF <= 0.0)
    throw std::invalid_argument("attainability_bound: zero-norm operator");
  Eigen::SelfAdjointEigenSolver<Operator> e0(rho0), eF(rhoF);
  // Both spectra ascending; paired ascending equals paired descending.
  double s = 0.0;
  for (Eigen::Index i = 0; i < rho0.rows(); ++i)
    s += e0.eigenvalues()(i) * eF.eigenvalues()(i);
  return s / (n0 * nF);
}

PulseSequence grape_step(const PulseSequence& pulse, const GradientField& grad,
                         double epsilon, double amp_max) {
  if (epsilon < 0.0) throw std::invalid_argument("grape_step: epsilon must be >= 0");
  if (grad.gx.size() != static_cast<std::size_t>(pulse.segments) ||
      grad.gy.size() != static_cast<std::size_t>(pulse.segments))
    throw std::invalid_argument("grape_step: gradient length mismatch");
  PulseSequence out = pulse;
  for (int j = 0; j < pulse.segments; ++j) {
    if (pulse.frozen[j]) continue;
    out.amps_x[j] += epsilon * grad.gx[j];
    out.amps_y[j] += epsilon * grad.gy[j];
    if (amp_max > 0.0) {
      out.amps_x[j] = std::clamp(out.amps_x[j], -amp_max, amp_max);
      out.amps_y[j] = std::clamp(out.amps_y[j], -amp_max, amp_max);
    }
  }
  return out;
}

namespace ref {

double fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                const ControlTask& task, const RfiDistribution& rfi,
                std::span<const NoiseTrajectory> noise) {
  return eval_fidelity(ops, pulse, task, rfi, noise, false);
}

GradientField gradient(const SystemOperators& ops, const PulseSequence& pulse,
                       const ControlTask& task, const RfiDistribution& rfi,
                       std::span<const NoiseTrajectory> noise) {
  return eval_gradient(ops, pulse, task, rfi, noise, false);
}

}  // namespace ref

}  // namespace qoc
