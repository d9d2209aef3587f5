#include "qwpde/qnn.hpp"

#include <numbers>
#include <stdexcept>
#include <vector>

namespace qwpde::qnn {

namespace {

using sv::Axis;
using sv::StateVector;

struct Gate {
  enum Kind { Rotation, Cnot } kind;
  Axis axis = Axis::Z;
  int q0 = 0;
  int q1 = 0;               // CNOT target
  Eigen::Index param = -1;  // index into CircuitParams::angles
};

// Flattened gate list of the full circuit, in application order.
std::vector<Gate> gate_sequence(const CircuitParams& params) {
  const int n = params.n_qubits;
  std::vector<Gate> gates;
  gates.reserve(static_cast<std::size_t>(params.n_layers) * (3 * n + n));
  for (int l = 0; l < params.n_layers; ++l) {
    for (int q = 0; q < n; ++q) {
      gates.push_back({Gate::Rotation, Axis::Z, q, 0, params.index(l, q, 0)});
      gates.push_back({Gate::Rotation, Axis::Y, q, 0, params.index(l, q, 1)});
      gates.push_back({Gate::Rotation, Axis::Z, q, 0, params.index(l, q, 2)});
    }
    if (n > 1) {
      for (int q = 0; q < n - 1; ++q) gates.push_back({Gate::Cnot, Axis::Z, q, q + 1, -1});
      gates.push_back({Gate::Cnot, Axis::Z, n - 1, 0, -1});
    }
  }
  return gates;
}

void check_shapes(const StateVector& input, const CircuitParams& params) {
  if (params.n_qubits < 1 || params.n_layers < 0) {
    throw std::invalid_argument("circuit needs n_qubits >= 1 and n_layers >= 0");
  }
  if (params.angles.size() != Eigen::Index(3) * params.n_qubits * params.n_layers) {
    throw std::invalid_argument("circuit angle tensor has wrong size");
  }
  if (input.n_qubits != params.n_qubits) {
    throw std::invalid_argument("input state and circuit qubit counts differ");
  }
}

}  // namespace

CircuitParams CircuitParams::zero(int n_qubits, int n_layers) {
  CircuitParams p;
  p.n_qubits = n_qubits;
  p.n_layers = n_layers;
  p.angles = Eigen::VectorXd::Zero(Eigen::Index(3) * n_qubits * n_layers);
  return p;
}

sv::StateVector strongly_entangling_layer(
    sv::StateVector state, const Eigen::Ref<const Eigen::MatrixXd>& layer_angles) {
  const int n = state.n_qubits;
  if (layer_angles.rows() != n || layer_angles.cols() != 3) {
    throw std::invalid_argument("layer angles must be n_qubits x 3");
  }
  for (int q = 0; q < n; ++q) {
    sv::apply_rotation_in_place(state, Axis::Z, q, layer_angles(q, 0));
    sv::apply_rotation_in_place(state, Axis::Y, q, layer_angles(q, 1));
    sv::apply_rotation_in_place(state, Axis::Z, q, layer_angles(q, 2));
  }
  if (n > 1) {
    for (int q = 0; q < n - 1; ++q) sv::apply_cnot_in_place(state, q, q + 1);
    sv::apply_cnot_in_place(state, n - 1, 0);
  }
  return state;
}

sv::StateVector apply_circuit(sv::StateVector state, const CircuitParams& params) {
  check_shapes(state, params);
  for (const Gate& g : gate_sequence(params)) {
    if (g.kind == Gate::Rotation) {
      sv::apply_rotation_in_place(state, g.axis, g.q0, params.angles[g.param]);
    } else {
      sv::apply_cnot_in_place(state, g.q0, g.q1);
    }
  }
  return state;
}

Eigen::VectorXd forward(const sv::StateVector& input, const CircuitParams& params) {
  const StateVector state = apply_circuit(input, params);
  Eigen::VectorXd expectations(params.n_qubits);
  for (int q = 0; q < params.n_qubits; ++q) {
    expectations[q] = sv::expectation_z(state, q);
  }
  return expectations;
}

AdjointResult gradient_adjoint(const sv::StateVector& input, const CircuitParams& params,
                               const Eigen::Ref<const Eigen::VectorXd>& cotangent) {
  check_shapes(input, params);
  if (cotangent.size() != params.n_qubits) {
    throw std::invalid_argument("cotangent length must equal qubit count");
  }

  const std::vector<Gate> gates = gate_sequence(params);

  // psi = U |in>, lambda = M psi with M = sum_q w_q Z_q.
  StateVector psi = input;
  for (const Gate& g : gates) {
    if (g.kind == Gate::Rotation) {
      sv::apply_rotation_in_place(psi, g.axis, g.q0, params.angles[g.param]);
    } else {
      sv::apply_cnot_in_place(psi, g.q0, g.q1);
    }
  }
  StateVector lambda = psi;
  sv::apply_weighted_z_in_place(lambda, cotangent);

  // Reverse sweep. At gate j: psi = psi_j, lambda = G_{j+1}^dag..G_N^dag M psi_N,
  // and dS/dtheta_j = Im(<lambda| P |psi>) for G_j = exp(-i theta_j P / 2).
  AdjointResult result;
  result.angle_gradients = Eigen::VectorXd::Zero(params.size());
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    const Gate& g = *it;
    if (g.kind == Gate::Rotation) {
      result.angle_gradients[g.param] = sv::pauli_inner(lambda, g.axis, g.q0, psi).imag();
      sv::apply_rotation_in_place(psi, g.axis, g.q0, -params.angles[g.param]);
      sv::apply_rotation_in_place(lambda, g.axis, g.q0, -params.angles[g.param]);
    } else {
      sv::apply_cnot_in_place(psi, g.q0, g.q1);
      sv::apply_cnot_in_place(lambda, g.q0, g.q1);
    }
  }

  // lambda is now U^dag M U |in>; for a real input amplitude v_i the
  // derivative of <psi|M|psi> is 2 Re(lambda_i).
  result.input_gradient = 2.0 * lambda.amplitudes.real();
  return result;
}

Eigen::VectorXd gradient_parameter_shift(
    const sv::StateVector& input, const CircuitParams& params,
    const Eigen::Ref<const Eigen::VectorXd>& cotangent) {
  check_shapes(input, params);
  if (cotangent.size() != params.n_qubits) {
    throw std::invalid_argument("cotangent length must equal qubit count");
  }
  constexpr double kShift = std::numbers::pi / 2.0;
  Eigen::VectorXd grads(params.size());
  CircuitParams shifted = params;
  for (Eigen::Index j = 0; j < params.size(); ++j) {
    shifted.angles[j] = params.angles[j] + kShift;
    const double up = cotangent.dot(forward(input, shifted));
    shifted.angles[j] = params.angles[j] - kShift;
    const double down = cotangent.dot(forward(input, shifted));
    shifted.angles[j] = params.angles[j];
    grads[j] = 0.5 * (up - down);
  }
  return grads;
}

}  // namespace qwpde::qnn
