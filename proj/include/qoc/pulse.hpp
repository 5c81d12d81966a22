#pragma once

#include <cstdint>
#include <vector>

namespace qoc {

/// Piecewise-constant control sequence: N segments of duration tau with
/// x/y amplitudes in rad/s. Frozen segments are excluded from optimizer
/// updates and keep their amplitudes bit-exactly.
struct PulseSequence {
  int segments = 0;
  double tau = 0.0;  // s
  std::vector<double> amps_x, amps_y;  // rad/s
  std::vector<std::uint8_t> frozen;    // 1 = excluded from updates

  double duration() const { return segments * tau; }
  void validate() const;

  static PulseSequence zero(int segments, double tau);
};

/// Discrete RF-inhomogeneity ensemble: scaling factors r_m with
/// probabilities p_m summing to 1.
struct RfiDistribution {
  std::vector<double> scales, probs;

  void validate() const;
  static RfiDistribution single();  // r = 1, p = 1
};

/// One dephasing realization: per-segment z-field values eta(j) in Hz,
/// each drawn from [-zeta/2, +zeta/2].
struct NoiseTrajectory {
  std::vector<double> etas_hz;
  double zeta_hz = 0.0;
};

}  // namespace qoc
