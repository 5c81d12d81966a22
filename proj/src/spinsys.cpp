#include "qoc/spinsys.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qoc {

namespace {

Operator pauli_half(Axis axis) {
  Operator s = Operator::Zero(2, 2);
  switch (axis) {
    case Axis::X:
      s(0, 1) = 0.5;
      s(1, 0) = 0.5;
      break;
    case Axis::Y:
      s(0, 1) = Complex(0.0, -0.5);
      s(1, 0) = Complex(0.0, 0.5);
      break;
    case Axis::Z:
      s(0, 0) = 0.5;
      s(1, 1) = -0.5;
      break;
  }
  return s;
}

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

void SpinSystem::validate() const {
  if (n < 1 || n > 6)
    throw std::invalid_argument("SpinSystem: n must be in [1, 6], got " +
                                std::to_string(n));
  if (static_cast<int>(offsets.size()) != n)
    throw std::invalid_argument("SpinSystem: offsets must have exactly n entries");
  if (couplings.rows() != n || couplings.cols() != n)
    throw std::invalid_argument("SpinSystem: couplings must be n x n");
  for (int k = 0; k < n; ++k) {
    if (couplings(k, k) != 0.0)
      throw std::invalid_argument("SpinSystem: couplings diagonal must be zero");
    for (int l = 0; l < n; ++l)
      if (couplings(k, l) != couplings(l, k))
        throw std::invalid_argument("SpinSystem: couplings must be symmetric");
  }
}

Operator spin_operator(int n, int k, Axis axis) {
  if (n < 1) throw std::out_of_range("spin_operator: n must be >= 1");
  if (k < 1 || k > n)
    throw std::out_of_range("spin_operator: spin index " + std::to_string(k) +
                            " out of range [1, " + std::to_string(n) + "]");
  Operator op = Operator::Identity(1, 1);
  for (int slot = 1; slot <= n; ++slot)
    op = kron(op, slot == k ? pauli_half(axis) : Operator::Identity(2, 2));
  return op;
}

Operator collective_control(int n, Axis axis) {
  Operator sum = Operator::Zero(1 << n, 1 << n);
  for (int k = 1; k <= n; ++k) sum += spin_operator(n, k, axis);
  return sum;
}

Operator drift_hamiltonian(const SpinSystem& sys) {
  sys.validate();
  const int d = sys.dim();
  Operator h0 = Operator::Zero(d, d);
  for (int k = 1; k <= sys.n; ++k)
    h0 -= sys.offsets[k - 1] * spin_operator(sys.n, k, Axis::Z);
  for (int k = 1; k <= sys.n; ++k)
    for (int l = k + 1; l <= sys.n; ++l)
      h0 += 2.0 * std::numbers::pi * sys.couplings(k - 1, l - 1) *
            (spin_operator(sys.n, k, Axis::Z) * spin_operator(sys.n, l, Axis::Z));
  return h0;
}

Operator dephasing_generator(int n) {
  if (n < 1) throw std::out_of_range("dephasing_generator: n must be >= 1");
  return collective_control(n, Axis::Z);
}

SystemOperators SystemOperators::build(const SpinSystem& sys) {
  sys.validate();
  SystemOperators ops;
  ops.dim = sys.dim();
  ops.h0 = drift_hamiltonian(sys);
  ops.hx = collective_control(sys.n, Axis::X);
  ops.hy = collective_control(sys.n, Axis::Y);
  ops.hz = dephasing_generator(sys.n);
  return ops;
}

double hermiticity_defect(const Operator& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Operator& u) {
  const Operator g = u.adjoint() * u - Operator::Identity(u.rows(), u.cols());
  return g.norm();
}

}  // namespace qoc
