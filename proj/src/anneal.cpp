#include "qoc/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qoc {

void AnnealState::validate() const {
  if (!(temperature > 0.0))
    throw std::invalid_argument("AnnealState: temperature must be > 0");
  if (!(cooling > 0.0 && cooling < 1.0))
    throw std::invalid_argument("AnnealState: cooling factor must be in (0, 1)");
  if (!(step_scale > 0.0))
    throw std::invalid_argument("AnnealState: step_scale must be > 0");
}

double threshold(double delta_phi, double temperature) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("threshold: temperature must be > 0");
  return -std::min(1.0, temperature * std::exp(delta_phi / temperature));
}

PulseSequence propose_neighbor(const PulseSequence& pulse, double scale,
                               std::mt19937_64& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("propose_neighbor: scale must be > 0");
  PulseSequence out = pulse;
  std::uniform_real_distribution<double> u(-scale, scale);
  for (int j = 0; j < pulse.segments; ++j) {
    if (pulse.frozen[j]) continue;
    out.amps_x[j] += u(rng);
    out.amps_y[j] += u(rng);
  }
  return out;
}

SweepResult sa_sweep(const PulseSequence& pulse, double phi0,
                     const std::function<double(const PulseSequence&)>& fidelity_fn,
                     int kappa, AnnealState& state) {
  if (kappa < 0) throw std::invalid_argument("sa_sweep: kappa must be >= 0");
  if (kappa > 0) state.validate();
  SweepResult result{pulse, phi0, 0};
  for (int i = 0; i < kappa; ++i) {
    PulseSequence cand = propose_neighbor(result.pulse, state.step_scale, state.rng);
    const double phi = fidelity_fn(cand);
    const double dphi = phi - result.fidelity;
    if (dphi >= threshold(dphi, state.temperature)) {
      result.pulse = std::move(cand);
      result.fidelity = phi;
      ++result.accepted;
    }
    state.temperature *= state.cooling;  // cools on both branches
  }
  return result;
}

}  // namespace qoc
