#include "qoc/shapefile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qoc {

void export_pulse(const PulseSequence& pulse, const std::string& path) {
  pulse.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_pulse: cannot open " + path);
  char buf[128];
  out << "# segments=" << pulse.segments << '\n';
  std::snprintf(buf, sizeof buf, "# tau_s=%.17g\n", pulse.tau);
  out << buf;
  for (int j = 0; j < pulse.segments; ++j) {
    const double amp = std::hypot(pulse.amps_x[j], pulse.amps_y[j]);
    const double phase = std::atan2(pulse.amps_y[j], pulse.amps_x[j]);
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %d\n", j + 1, amp, phase,
                  pulse.frozen[j] ? 1 : 0);
    out << buf;
  }
  if (!out) throw std::runtime_error("export_pulse: write failed for " + path);
}

PulseSequence import_pulse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("import_pulse: cannot open " + path);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("import_pulse: " + path + ":" + std::to_string(lineno) +
                             ": " + what);
  };

  PulseSequence pulse;
  if (!std::getline(in, line)) fail("missing segments header");
  ++lineno;
  if (std::sscanf(line.c_str(), "# segments=%d", &pulse.segments) != 1)
    fail("malformed segments header");
  if (!std::getline(in, line)) fail("missing tau header");
  ++lineno;
  if (std::sscanf(line.c_str(), "# tau_s=%lf", &pulse.tau) != 1)
    fail("malformed tau header");
  if (pulse.segments < 1 || !(pulse.tau > 0.0)) fail("invalid header values");

  pulse.amps_x.assign(pulse.segments, 0.0);
  pulse.amps_y.assign(pulse.segments, 0.0);
  pulse.frozen.assign(pulse.segments, 0);
  for (int j = 0; j < pulse.segments; ++j) {
    if (!std::getline(in, line)) fail("unexpected end of file");
    ++lineno;
    int index = 0, frozen = 0;
    double amp = 0.0, phase = 0.0;
    if (std::sscanf(line.c_str(), "%d %lf %lf %d", &index, &amp, &phase, &frozen) != 4)
      fail("malformed data line");
    if (index != j + 1) fail("segment index out of order");
    if (frozen != 0 && frozen != 1) fail("frozen flag must be 0 or 1");
    pulse.amps_x[j] = amp * std::cos(phase);
    pulse.amps_y[j] = amp * std::sin(phase);
    pulse.frozen[j] = static_cast<std::uint8_t>(frozen);
  }
  pulse.validate();
  return pulse;
}

}  // namespace qoc
