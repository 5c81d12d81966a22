#pragma once

#include "qoc/pulse.hpp"
#include "qoc/spinsys.hpp"

#include <span>

namespace qoc {

/// U = exp(-i tau H) via Hermitian eigendecomposition; unitary to machine
/// precision. Rejects non-Hermitian input.
Operator expm_hermitian(const Operator& h, double tau);

/// H(j) = H_0 + r (w_x(j) H_x + w_y(j) H_y) [+ 2 pi eta_j H_z], j 1-based.
Operator segment_hamiltonian(const SystemOperators& ops, const PulseSequence& pulse,
                             int j, double scale, const double* eta_hz = nullptr);

/// Time-ordered product U_N ... U_2 U_1 (segment 1 acts first).
Operator total_propagator(std::span<const Operator> segment_us);

/// rho' = U rho0 U^dag.
Operator evolve_state(const Operator& rho0, const Operator& u);

}  // namespace qoc
