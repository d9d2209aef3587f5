#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "qwpde/encoding.hpp"
#include "qwpde/qnn.hpp"
#include "qwpde/wavelet.hpp"

namespace qwpde::model {

/// Two-stage network: angle-encoded probe -> feature circuit (qnn1) ->
/// amplitude re-encoding of its expectations -> coefficient circuit (qnn2) ->
/// one linear head per output field mapping expectations to wavelet
/// coefficients, plus a scalar reconstruction bias per field. With use_qnn1
/// false the rescaled probe feeds the amplitude encoder directly.
struct Architecture {
  int qnn1_qubits = 4;
  int qnn1_layers = 2;
  int qnn2_qubits = 13;
  int qnn2_layers = 4;
  bool use_qnn1 = true;
  int n_fields = 1;
  Eigen::Index n_coefficients = 0;  // per field, equals the wavelet family size
  sv::Axis encode_axis = sv::Axis::Y;

  Eigen::Index qnn1_param_count() const {
    return use_qnn1 ? Eigen::Index(3) * qnn1_qubits * qnn1_layers : 0;
  }
  Eigen::Index qnn2_param_count() const {
    return Eigen::Index(3) * qnn2_qubits * qnn2_layers;
  }
  /// Per field: head weights n_coeff x q2, head bias n_coeff, solution bias 1.
  Eigen::Index field_param_count() const {
    return n_coefficients * (qnn2_qubits + 1) + 1;
  }
  Eigen::Index total_param_count() const {
    return qnn1_param_count() + qnn2_param_count() + n_fields * field_param_count();
  }
};

/// Segment offsets inside the flat parameter vector. Layout:
/// [qnn1 angles][qnn2 angles][field 0: W row-major, b, B][field 1: ...].
struct ParamLayout {
  Eigen::Index qnn1_offset = 0, qnn1_size = 0;
  Eigen::Index qnn2_offset = 0, qnn2_size = 0;
  struct Head {
    Eigen::Index weights_offset = 0;
    Eigen::Index bias_offset = 0;          // head bias vector
    Eigen::Index solution_bias_offset = 0; // scalar B of the reconstruction
  };
  std::vector<Head> heads;
  Eigen::Index total = 0;
};

ParamLayout layout_of(const Architecture& arch);

/// Deterministic initialisation: circuit angles uniform in (-pi, pi), head
/// weights Xavier-uniform with bound sqrt(6 / (q2 + n_coeff)), head and
/// solution biases zero. Fully determined by the seed.
Eigen::VectorXd init_params(const Architecture& arch, std::uint64_t seed);

/// Intermediates of one pipeline evaluation, kept for the reverse pass.
struct Forward {
  Eigen::VectorXd probe_angles;
  sv::StateVector qnn1_input;
  Eigen::VectorXd features;      // qnn1 expectations, or the probe when bypassed
  sv::StateVector qnn2_input;
  Eigen::VectorXd expectations;  // qnn2 per-wire readout
  std::vector<Eigen::VectorXd> coefficients;  // per field
};

/// Runs the pipeline at a probe (already rescaled to angles in [0, pi]).
/// In global coefficient mode the caller probes the domain midpoint once; in
/// per-point mode it probes each collocation point.
Forward predict_coefficients(const Architecture& arch,
                             const Eigen::Ref<const Eigen::VectorXd>& params,
                             const Eigen::Ref<const Eigen::VectorXd>& probe_angles);

/// Gradient of sum_f cotangent_f . coefficients_f with respect to the flat
/// parameter vector: linear head exactly, amplitude-encode normalisation via
/// its closed-form Jacobian, circuits via the adjoint sweep. Solution-bias
/// entries stay zero (the bias enters reconstruction, not the head).
Eigen::VectorXd model_vjp(const Architecture& arch,
                          const Eigen::Ref<const Eigen::VectorXd>& params,
                          const Forward& fwd,
                          const std::vector<Eigen::VectorXd>& coefficient_cotangents);

double solution_bias(const Architecture& arch,
                     const Eigen::Ref<const Eigen::VectorXd>& params, int field);

/// u = B^{(order)} c, plus the solution bias when order is (0,0) (a constant
/// vanishes under differentiation).
Eigen::VectorXd reconstruct(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                            const wave::BasisMatrices& basis, wave::DerivOrder order,
                            double solution_bias);

}  // namespace qwpde::model
