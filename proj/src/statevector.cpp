#include "qwpde/statevector.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qwpde::sv {

namespace {

std::atomic<std::uint64_t> g_pair_updates{0};

void check_qubit(const StateVector& state, int qubit, const char* what) {
  if (qubit < 0 || qubit >= state.n_qubits) {
    throw std::out_of_range(std::string(what) + " index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(state.n_qubits) +
                            " qubits");
  }
}

// 2x2 unitary applied to the target qubit's subspace.
void apply_2x2(StateVector& state, int qubit, Complex u00, Complex u01, Complex u10,
               Complex u11) {
  const Eigen::Index stride = Eigen::Index(1) << (state.n_qubits - 1 - qubit);
  const Eigen::Index dim = state.dim();
  auto& a = state.amplitudes;
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index i = base; i < base + stride; ++i) {
      const Complex lo = a[i];
      const Complex hi = a[i + stride];
      a[i] = u00 * lo + u01 * hi;
      a[i + stride] = u10 * lo + u11 * hi;
    }
  }
  g_pair_updates.fetch_add(static_cast<std::uint64_t>(dim / 2),
                           std::memory_order_relaxed);
}

}  // namespace

StateVector init_zero_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n_qubits));
  }
  StateVector state;
  state.n_qubits = n_qubits;
  state.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index(1) << n_qubits);
  state.amplitudes[0] = Complex(1.0, 0.0);
  return state;
}

void apply_rotation_in_place(StateVector& state, Axis axis, int qubit, double angle) {
  check_qubit(state, qubit, "rotation qubit");
  if (!std::isfinite(angle)) throw std::invalid_argument("rotation angle not finite");
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (axis) {
    case Axis::X:
      apply_2x2(state, qubit, Complex(c, 0), Complex(0, -s), Complex(0, -s),
                Complex(c, 0));
      break;
    case Axis::Y:
      apply_2x2(state, qubit, Complex(c, 0), Complex(-s, 0), Complex(s, 0),
                Complex(c, 0));
      break;
    case Axis::Z:
      apply_2x2(state, qubit, Complex(c, -s), Complex(0, 0), Complex(0, 0),
                Complex(c, s));
      break;
  }
}

StateVector apply_rotation(StateVector state, Axis axis, int qubit, double angle) {
  apply_rotation_in_place(state, axis, qubit, angle);
  return state;
}

void apply_cnot_in_place(StateVector& state, int control, int target) {
  check_qubit(state, control, "cnot control");
  check_qubit(state, target, "cnot target");
  if (control == target) {
    throw std::invalid_argument("cnot control and target must differ");
  }
  const int n = state.n_qubits;
  const Eigen::Index c_mask = Eigen::Index(1) << (n - 1 - control);
  const Eigen::Index t_mask = Eigen::Index(1) << (n - 1 - target);
  auto& a = state.amplitudes;
  const Eigen::Index dim = state.dim();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((i & c_mask) != 0 && (i & t_mask) == 0) {
      std::swap(a[i], a[i | t_mask]);
    }
  }
}

StateVector apply_cnot(StateVector state, int control, int target) {
  apply_cnot_in_place(state, control, target);
  return state;
}

double expectation_z(const StateVector& state, int qubit) {
  check_qubit(state, qubit, "expectation qubit");
  const Eigen::Index mask = Eigen::Index(1) << (state.n_qubits - 1 - qubit);
  double acc = 0.0;
  const Eigen::Index dim = state.dim();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double p = std::norm(state.amplitudes[i]);
    acc += (i & mask) ? -p : p;
  }
  return acc;
}

void apply_pauli_in_place(StateVector& state, Axis axis, int qubit) {
  check_qubit(state, qubit, "pauli qubit");
  const Eigen::Index mask = Eigen::Index(1) << (state.n_qubits - 1 - qubit);
  auto& a = state.amplitudes;
  const Eigen::Index dim = state.dim();
  switch (axis) {
    case Axis::X:
      for (Eigen::Index i = 0; i < dim; ++i) {
        if ((i & mask) == 0) std::swap(a[i], a[i | mask]);
      }
      break;
    case Axis::Y:
      for (Eigen::Index i = 0; i < dim; ++i) {
        if ((i & mask) == 0) {
          const Complex lo = a[i];
          const Complex hi = a[i | mask];
          a[i] = Complex(0, -1) * hi;
          a[i | mask] = Complex(0, 1) * lo;
        }
      }
      break;
    case Axis::Z:
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & mask) a[i] = -a[i];
      }
      break;
  }
}

void apply_weighted_z_in_place(StateVector& state,
                               const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (weights.size() != state.n_qubits) {
    throw std::invalid_argument("weighted-Z weight count must equal qubit count");
  }
  const int n = state.n_qubits;
  const Eigen::Index dim = state.dim();
  for (Eigen::Index i = 0; i < dim; ++i) {
    double m = 0.0;
    for (int q = 0; q < n; ++q) {
      m += basis_bit(i, n, q) ? -weights[q] : weights[q];
    }
    state.amplitudes[i] *= m;
  }
}

Complex pauli_inner(const StateVector& bra, Axis axis, int qubit,
                    const StateVector& ket) {
  check_qubit(ket, qubit, "pauli qubit");
  const Eigen::Index mask = Eigen::Index(1) << (ket.n_qubits - 1 - qubit);
  const Eigen::Index dim = ket.dim();
  Complex acc(0, 0);
  switch (axis) {
    case Axis::X:
      for (Eigen::Index i = 0; i < dim; ++i) {
        if ((i & mask) == 0) {
          acc += std::conj(bra.amplitudes[i]) * ket.amplitudes[i | mask];
          acc += std::conj(bra.amplitudes[i | mask]) * ket.amplitudes[i];
        }
      }
      break;
    case Axis::Y:
      for (Eigen::Index i = 0; i < dim; ++i) {
        if ((i & mask) == 0) {
          acc += std::conj(bra.amplitudes[i]) * Complex(0, -1) * ket.amplitudes[i | mask];
          acc += std::conj(bra.amplitudes[i | mask]) * Complex(0, 1) * ket.amplitudes[i];
        }
      }
      break;
    case Axis::Z:
      for (Eigen::Index i = 0; i < dim; ++i) {
        const Complex term = std::conj(bra.amplitudes[i]) * ket.amplitudes[i];
        acc += (i & mask) ? -term : term;
      }
      break;
  }
  return acc;
}

std::uint64_t pair_update_count() { return g_pair_updates.load(std::memory_order_relaxed); }

}  // namespace qwpde::sv
