#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace qoc {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

enum class Axis { X, Y, Z };

/// Single-species n-spin system in the rotating frame, weak coupling.
/// Offsets are stored in rad/s; couplings in Hz (the 2*pi enters only in
/// the drift's coupling term). Spin 1 is the leftmost tensor factor and
/// |0> is the +z eigenstate with I_z eigenvalue +1/2.
struct SpinSystem {
  int n = 0;
  std::vector<double> offsets;  // rad/s, one per spin
  Eigen::MatrixXd couplings;    // Hz, symmetric, zero diagonal

  int dim() const { return 1 << n; }
  void validate() const;  // throws std::invalid_argument on violation
};

/// I_{k,axis} = 1 (x) ... (x) sigma_axis/2 (x) ... (x) 1, k is 1-based.
Operator spin_operator(int n, int k, Axis axis);

/// H_alpha = sum_k I_{k,alpha}, alpha in {x, y}.
Operator collective_control(int n, Axis axis);

/// H_0 = -sum_k Omega_k I_kz + 2*pi sum_{k<l} J_kl I_kz I_lz.
Operator drift_hamiltonian(const SpinSystem& sys);

/// H_z = sum_k I_kz, the generator multiplied by 2*pi*eta in the noise term.
Operator dephasing_generator(int n);

/// All generators a pulse evaluation needs, built once per system.
struct SystemOperators {
  int dim = 0;
  Operator h0, hx, hy, hz;

  static SystemOperators build(const SpinSystem& sys);
};

double hermiticity_defect(const Operator& h);  // max |H - H^dag| elementwise
double unitarity_defect(const Operator& u);    // ||U^dag U - 1||_F

}  // namespace qoc
