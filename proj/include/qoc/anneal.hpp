#pragma once

#include "qoc/pulse.hpp"

#include <functional>
#include <random>

namespace qoc {

/// Mutable annealing schedule: temperature cools by the factor `cooling`
/// after every iteration, accepted or not.
struct AnnealState {
  double temperature = 1.0;
  double cooling = 0.99;      // gamma, strictly in (0, 1)
  double step_scale = 0.0;    // neighbor perturbation half-width, rad/s
  std::mt19937_64 rng;

  void validate() const;
};

/// Acceptance threshold Delta = -min[1, T exp(dPhi/T)]; a move is
/// accepted when dPhi >= Delta. Always in [-1, 0].
double threshold(double delta_phi, double temperature);

/// Independent uniform draw in [-scale, +scale] added to every unfrozen
/// amplitude; frozen segments untouched.
PulseSequence propose_neighbor(const PulseSequence& pulse, double scale,
                               std::mt19937_64& rng);

struct SweepResult {
  PulseSequence pulse;
  double fidelity = 0.0;  // fidelity_fn value of the returned pulse
  int accepted = 0;
};

/// kappa propose/evaluate/accept iterations starting from (pulse, phi0).
SweepResult sa_sweep(const PulseSequence& pulse, double phi0,
                     const std::function<double(const PulseSequence&)>& fidelity_fn,
                     int kappa, AnnealState& state);

}  // namespace qoc
