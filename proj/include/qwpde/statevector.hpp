#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>

namespace qwpde::sv {

using Complex = std::complex<double>;

// 2^24 amplitudes (~268 MB) is the largest state the simulator accepts.
inline constexpr int kMaxQubits = 24;

enum class Axis { X, Y, Z };

/// Dense n-qubit pure state. Bit-ordering convention used by every module:
/// qubit 0 is the *most significant* bit of the basis index, so
/// bit(i, q) = (i >> (n_qubits - 1 - q)) & 1.
struct StateVector {
  int n_qubits = 0;
  Eigen::VectorXcd amplitudes;

  Eigen::Index dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

/// Value of qubit `qubit` in basis index `index` under the MSB convention.
inline int basis_bit(Eigen::Index index, int n_qubits, int qubit) {
  return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1);
}

/// |0...0> on n_qubits wires. Throws std::invalid_argument outside [1, 24].
StateVector init_zero_state(int n_qubits);

/// Single-qubit rotation R_X/R_Y/R_Z by `angle` on `qubit`.
///   R_X = [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]]
///   R_Y = [[cos(t/2),   -sin(t/2)], [   sin(t/2), cos(t/2)]]
///   R_Z = diag(e^{-it/2}, e^{+it/2})
StateVector apply_rotation(StateVector state, Axis axis, int qubit, double angle);
void apply_rotation_in_place(StateVector& state, Axis axis, int qubit, double angle);

/// CNOT with the given control and target wires (control != target).
StateVector apply_cnot(StateVector state, int control, int target);
void apply_cnot_in_place(StateVector& state, int control, int target);

/// <Z_qubit> = sum_i |a_i|^2 * (+1 if bit(i, qubit) == 0 else -1).
double expectation_z(const StateVector& state, int qubit);

/// Pauli X/Y/Z applied as an operator (not a rotation); used by the adjoint
/// gradient sweep.
void apply_pauli_in_place(StateVector& state, Axis axis, int qubit);

/// state <- (sum_q weights[q] Z_q) state. The weighted-Z observable is
/// diagonal in the computational basis.
void apply_weighted_z_in_place(StateVector& state,
                               const Eigen::Ref<const Eigen::VectorXd>& weights);

/// <bra| P_qubit |ket> without materialising P|ket>.
Complex pauli_inner(const StateVector& bra, Axis axis, int qubit,
                    const StateVector& ket);

/// Amplitude-pair updates performed by single-qubit gates since process start
/// (one count per |..0..>/|..1..> pair touched). Lets tests assert the O(2^n)
/// per-gate cost by counting instead of timing.
std::uint64_t pair_update_count();

}  // namespace qwpde::sv
