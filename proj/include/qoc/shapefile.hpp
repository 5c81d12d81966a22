#pragma once

#include "qoc/pulse.hpp"

#include <string>

namespace qoc {

/// Plain-text shape format:
///   # segments=N
///   # tau_s=<tau>
///   <index> <amplitude rad/s> <phase rad> <frozen 0|1>
/// with amplitude = sqrt(wx^2 + wy^2) and phase = atan2(wy, wx), written
/// with 17 significant digits.
void export_pulse(const PulseSequence& pulse, const std::string& path);
PulseSequence import_pulse(const std::string& path);

}  // namespace qoc
