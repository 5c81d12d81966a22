#pragma once

#include "qoc/propagate.hpp"
#include "qoc/pulse.hpp"
#include "qoc/spinsys.hpp"

#include <span>
#include <vector>

namespace qoc {

/// Target of an optimization: either a state transfer rho0 -> rhoF or a
/// unitary gate U_F.
struct ControlTask {
  enum class Kind { StateTransfer, GateSynthesis };
  Kind kind = Kind::StateTransfer;
  Operator rho0, rhoF;  // state transfer (Hermitian, possibly traceless)
  Operator uF;          // gate synthesis (unitary)

  void validate(int dim) const;
  static ControlTask state_transfer(Operator rho0, Operator rhoF);
  static ControlTask gate_synthesis(Operator uF);
};

/// Gradient of the fidelity w.r.t. each control amplitude; frozen-segment
/// entries are exactly zero.
struct GradientField {
  std::vector<double> gx, gy;
};

// Named targets used throughout the tasks and tests.
Operator thermal_z_state(int n);             // sum_k I_kz
Operator lls_state();                        // -I_1 . I_2 (two spins)
Operator cnot_gate();                        // |0><0| x 1 + |1><1| x sigma_x
Operator pi_x_gate(int n, int k);            // exp(-i pi I_kx), identity elsewhere

/// Normalized state fidelity
///   Phi = sum_m p_m Tr[rhoF rho'_m] / (||rhoF||_F ||rho0||_F).
double state_fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                      const ControlTask& task, const RfiDistribution& rfi,
                      std::span<const NoiseTrajectory> noise = {});

/// Normalized gate fidelity Phi = sum_m p_m |Tr[U^m' U_F]|^2 / D^2.
double gate_fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                     const ControlTask& task, const RfiDistribution& rfi,
                     std::span<const NoiseTrajectory> noise = {});

/// Dispatch on task kind. Optional noise trajectories are averaged with
/// equal weight; an empty span means noiseless evaluation.
double fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                const ControlTask& task, const RfiDistribution& rfi,
                std::span<const NoiseTrajectory> noise = {});

GradientField state_gradient(const SystemOperators& ops, const PulseSequence& pulse,
                             const ControlTask& task, const RfiDistribution& rfi,
                             std::span<const NoiseTrajectory> noise = {});

GradientField gate_gradient(const SystemOperators& ops, const PulseSequence& pulse,
                            const ControlTask& task, const RfiDistribution& rfi,
                            std::span<const NoiseTrajectory> noise = {});

GradientField gradient(const SystemOperators& ops, const PulseSequence& pulse,
                       const ControlTask& task, const RfiDistribution& rfi,
                       std::span<const NoiseTrajectory> noise = {});

/// Maximum of the normalized state overlap over all unitaries:
/// sorted-descending eigenvalue pairing divided by the norm product.
double attainability_bound(const Operator& rho0, const Operator& rhoF);

/// w_alpha(j) += epsilon * G_alpha(j) on unfrozen segments; amp_max > 0
/// clips each component to [-amp_max, +amp_max] after the update.
PulseSequence grape_step(const PulseSequence& pulse, const GradientField& grad,
                         double epsilon, double amp_max = 0.0);

namespace ref {

// Serial reference path: identical per-term kernels and reduction order,
// plain loops instead of the OpenMP-parallel dispatch. Results are
// bit-identical to the parallel versions.
double fidelity(const SystemOperators& ops, const PulseSequence& pulse,
                const ControlTask& task, const RfiDistribution& rfi,
                std::span<const NoiseTrajectory> noise = {});

GradientField gradient(const SystemOperators& ops, const PulseSequence& pulse,
                       const ControlTask& task, const RfiDistribution& rfi,
                       std::span<const NoiseTrajectory> noise = {});

}  // namespace ref

}  // namespace qoc
