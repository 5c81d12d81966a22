#include "qoc/propagate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qoc {

Operator expm_hermitian(const Operator& h, double tau) {
  if (h.rows() != h.cols()) throw std::invalid_argument("expm_hermitian: matrix not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermiticity_defect(h) > 1e-12 * scale)
    throw std::invalid_argument("expm_hermitian: input is not Hermitian");

  const Eigen::Index d = h.rows();

  // Diagonal Hamiltonians (drift + z-noise) need no decomposition.
  bool diagonal = true;
  for (Eigen::Index i = 0; i < d && diagonal; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (i != j && h(i, j) != Complex(0.0, 0.0)) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    Operator u = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      u(i, i) = std::exp(Complex(0.0, -tau * h(i, i).real()));
    return u;
  }

  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expm_hermitian: eigendecomposition failed");
  Eigen::VectorXcd phases(d);
  for (Eigen::Index i = 0; i < d; ++i)
    phases(i) = std::exp(Complex(0.0, -tau * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Operator segment_hamiltonian(const SystemOperators& ops, const PulseSequence& pulse,
                             int j, double scale, const double* eta_hz) {
  if (j < 1 || j > pulse.segments)
    throw std::out_of_range("segment_hamiltonian: segment index out of range");
  Operator h = ops.h0 +
               scale * (pulse.amps_x[j - 1] * ops.hx + pulse.amps_y[j - 1] * ops.hy);
  if (eta_hz != nullptr) h += (2.0 * std::numbers::pi * (*eta_hz)) * ops.hz;
  return h;
}

Operator total_propagator(std::span<const Operator> segment_us) {
  if (segment_us.empty())
    throw std::invalid_argument("total_propagator: empty propagator list");
  Operator u = segment_us.front();
  for (std::size_t j = 1; j < segment_us.size(); ++j) {
    if (segment_us[j].rows() != u.rows())
      throw std::invalid_argument("total_propagator: dimension mismatch");
    u = segment_us[j] * u;  // later segments act from the left
  }
  return u;
}

Operator evolve_state(const Operator& rho0, const Operator& u) {
  if (rho0.rows() != u.rows())
    throw std::invalid_argument("evolve_state: dimension mismatch");
  return u * rho0 * u.adjoint();
}

}  // namespace qoc
