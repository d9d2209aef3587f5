#pragma once

#include <Eigen/Core>

#include "qwpde/statevector.hpp"

namespace qwpde::qnn {

/// Angles of a strongly-entangling ansatz. Flat layout: index(l, q, r) with
/// r in {0: R_Z(alpha), 1: R_Y(beta), 2: R_Z(gamma)}; within a layer each
/// qubit receives R_Z, R_Y, R_Z in that order, then the circular CNOT chain
/// CNOT(k, k+1) for k = 0..n-2 followed by CNOT(n-1, 0). A single wire has
/// no entangler (a CNOT needs two wires).
struct CircuitParams {
  int n_qubits = 0;
  int n_layers = 0;
  Eigen::VectorXd angles;

  static CircuitParams zero(int n_qubits, int n_layers);

  Eigen::Index size() const { return angles.size(); }
  Eigen::Index index(int layer, int qubit, int rot) const {
    return (Eigen::Index(layer) * n_qubits + qubit) * 3 + rot;
  }
  double angle(int layer, int qubit, int rot) const {
    return angles[index(layer, qubit, rot)];
  }
  double& angle(int layer, int qubit, int rot) {
    return angles[index(layer, qubit, rot)];
  }
};

/// One strongly-entangling layer. layer_angles is n_qubits x 3 with columns
/// (alpha, beta, gamma).
sv::StateVector strongly_entangling_layer(
    sv::StateVector state, const Eigen::Ref<const Eigen::MatrixXd>& layer_angles);

/// Full circuit unitary applied to a state (all layers in order).
sv::StateVector apply_circuit(sv::StateVector state, const CircuitParams& params);

/// Forward evaluation: per-wire Pauli-Z expectations after the full circuit.
Eigen::VectorXd forward(const sv::StateVector& input, const CircuitParams& params);

struct AdjointResult {
  /// d(cotangent . expectations)/d(angles), same layout as CircuitParams.
  Eigen::VectorXd angle_gradients;
  /// d(cotangent . expectations)/d(Re amplitudes of the input state). Equals
  /// 2 Re(U^dag M U psi_in) with M = sum_q cotangent[q] Z_q; exact for the
  /// real-amplitude inputs produced by amplitude encoding.
  Eigen::VectorXd input_gradient;
};

/// Adjoint differentiation: one forward statevector pass plus one reverse
/// sweep over the gate list with two live states. Exact to floating point
/// for this gate set; O(#gates * 2^n) total.
AdjointResult gradient_adjoint(const sv::StateVector& input, const CircuitParams& params,
                               const Eigen::Ref<const Eigen::VectorXd>& cotangent);

/// Parameter-shift oracle: grad_j = cotangent . (E(theta_j + pi/2) -
/// E(theta_j - pi/2)) / 2. Valid because every trainable gate is a Pauli
/// rotation. Test oracle only; O(#params) forward passes.
Eigen::VectorXd gradient_parameter_shift(
    const sv::StateVector& input, const CircuitParams& params,
    const Eigen::Ref<const Eigen::VectorXd>& cotangent);

}  // namespace qwpde::qnn
