#include "qoc/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace qoc {

void PulseSequence::validate() const {
  if (segments < 1) throw std::invalid_argument("PulseSequence: segments must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("PulseSequence: tau must be > 0");
  const auto n = static_cast<std::size_t>(segments);
  if (amps_x.size() != n || amps_y.size() != n || frozen.size() != n)
    throw std::invalid_argument("PulseSequence: amplitude/mask lengths must equal segments");
  for (double a : amps_x)
    if (!std::isfinite(a)) throw std::invalid_argument("PulseSequence: non-finite amplitude");
  for (double a : amps_y)
    if (!std::isfinite(a)) throw std::invalid_argument("PulseSequence: non-finite amplitude");
}

PulseSequence PulseSequence::zero(int segments, double tau) {
  PulseSequence p;
  p.segments = segments;
  p.tau = tau;
  p.amps_x.assign(segments, 0.0);
  p.amps_y.assign(segments, 0.0);
  p.frozen.assign(segments, 0);
  p.validate();
  return p;
}

void RfiDistribution::validate() const {
  if (scales.empty() || scales.size() != probs.size())
    throw std::invalid_argument("RfiDistribution: scales/probs must be nonempty and equal length");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("RfiDistribution: probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("RfiDistribution: probabilities must sum to 1");
}

RfiDistribution RfiDistribution::single() { return {{1.0}, {1.0}}; }

}  // namespace qoc
