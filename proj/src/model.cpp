#include "qwpde/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qwpde/rng.hpp"

namespace qwpde::model {

namespace {

using rng::uniform;

qnn::CircuitParams qnn1_params(const Architecture& arch,
                               const Eigen::Ref<const Eigen::VectorXd>& params,
                               const ParamLayout& lay) {
  qnn::CircuitParams p;
  p.n_qubits = arch.qnn1_qubits;
  p.n_layers = arch.qnn1_layers;
  p.angles = params.segment(lay.qnn1_offset, lay.qnn1_size);
  return p;
}

qnn::CircuitParams qnn2_params(const Architecture& arch,
                               const Eigen::Ref<const Eigen::VectorXd>& params,
                               const ParamLayout& lay) {
  qnn::CircuitParams p;
  p.n_qubits = arch.qnn2_qubits;
  p.n_layers = arch.qnn2_layers;
  p.angles = params.segment(lay.qnn2_offset, lay.qnn2_size);
  return p;
}

void check_params(const Architecture& arch,
                  const Eigen::Ref<const Eigen::VectorXd>& params) {
  if (params.size() != arch.total_param_count()) {
    throw std::invalid_argument("parameter vector does not match the architecture");
  }
}

}  // namespace

ParamLayout layout_of(const Architecture& arch) {
  ParamLayout lay;
  lay.qnn1_offset = 0;
  lay.qnn1_size = arch.qnn1_param_count();
  lay.qnn2_offset = lay.qnn1_offset + lay.qnn1_size;
  lay.qnn2_size = arch.qnn2_param_count();
  Eigen::Index cursor = lay.qnn2_offset + lay.qnn2_size;
  for (int f = 0; f < arch.n_fields; ++f) {
    ParamLayout::Head head;
    head.weights_offset = cursor;
    cursor += arch.n_coefficients * arch.qnn2_qubits;
    head.bias_offset = cursor;
    cursor += arch.n_coefficients;
    head.solution_bias_offset = cursor;
    cursor += 1;
    lay.heads.push_back(head);
  }
  lay.total = cursor;
  return lay;
}

Eigen::VectorXd init_params(const Architecture& arch, std::uint64_t seed) {
  const ParamLayout lay = layout_of(arch);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(lay.total);
  std::mt19937_64 rng(seed);
  constexpr double pi = std::numbers::pi;
  for (Eigen::Index i = 0; i < lay.qnn1_size; ++i) {
    params[lay.qnn1_offset + i] = uniform(rng, -pi, pi);
  }
  for (Eigen::Index i = 0; i < lay.qnn2_size; ++i) {
    params[lay.qnn2_offset + i] = uniform(rng, -pi, pi);
  }
  const double bound =
      std::sqrt(6.0 / (double(arch.qnn2_qubits) + double(arch.n_coefficients)));
  for (const ParamLayout::Head& head : lay.heads) {
    const Eigen::Index n_w = arch.n_coefficients * arch.qnn2_qubits;
    for (Eigen::Index i = 0; i < n_w; ++i) {
      params[head.weights_offset + i] = uniform(rng, -bound, bound);
    }
    // head bias and solution bias stay zero
  }
  return params;
}

Forward predict_coefficients(const Architecture& arch,
                             const Eigen::Ref<const Eigen::VectorXd>& params,
                             const Eigen::Ref<const Eigen::VectorXd>& probe_angles) {
  check_params(arch, params);
  const ParamLayout lay = layout_of(arch);

  Forward fwd;
  fwd.probe_angles = probe_angles;
  if (arch.use_qnn1) {
    fwd.qnn1_input = enc::angle_encode(probe_angles, arch.qnn1_qubits, arch.encode_axis);
    fwd.features = qnn::forward(fwd.qnn1_input, qnn1_params(arch, params, lay));
  } else {
    fwd.features = probe_angles;
  }
  fwd.qnn2_input = enc::amplitude_encode(fwd.features, arch.qnn2_qubits);
  fwd.expectations = qnn::forward(fwd.qnn2_input, qnn2_params(arch, params, lay));

  fwd.coefficients.resize(arch.n_fields);
  for (int f = 0; f < arch.n_fields; ++f) {
    const ParamLayout::Head& head = lay.heads[f];
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        w(params.data() + head.weights_offset, arch.n_coefficients, arch.qnn2_qubits);
    fwd.coefficients[f] =
        w * fwd.expectations + params.segment(head.bias_offset, arch.n_coefficients);
  }
  return fwd;
}

Eigen::VectorXd model_vjp(const Architecture& arch,
                          const Eigen::Ref<const Eigen::VectorXd>& params,
                          const Forward& fwd,
                          const std::vector<Eigen::VectorXd>& coefficient_cotangents) {
  check_params(arch, params);
  if (static_cast<int>(coefficient_cotangents.size()) != arch.n_fields) {
    throw std::invalid_argument("one coefficient cotangent per field required");
  }
  const ParamLayout lay = layout_of(arch);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(lay.total);

  // Linear heads: dW = cot c e2^T, db = cot c, and e2 collects W^T cot.
  Eigen::VectorXd expectation_cot = Eigen::VectorXd::Zero(arch.qnn2_qubits);
  for (int f = 0; f < arch.n_fields; ++f) {
    const Eigen::VectorXd& cot = coefficient_cotangents[f];
    if (cot.size() != arch.n_coefficients) {
      throw std::invalid_argument("coefficient cotangent length mismatch");
    }
    const ParamLayout::Head& head = lay.heads[f];
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        w(params.data() + head.weights_offset, arch.n_coefficients, arch.qnn2_qubits);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        dw(grad.data() + head.weights_offset, arch.n_coefficients, arch.qnn2_qubits);
    dw.noalias() = cot * fwd.expectations.transpose();
    grad.segment(head.bias_offset, arch.n_coefficients) = cot;
    expectation_cot.noalias() += w.transpose() * cot;
  }

  // Coefficient circuit, then the amplitude-encode Jacobian back to features.
  const qnn::AdjointResult adj2 =
      qnn::gradient_adjoint(fwd.qnn2_input, qnn2_params(arch, params, lay), expectation_cot);
  grad.segment(lay.qnn2_offset, lay.qnn2_size) = adj2.angle_gradients;

  if (arch.use_qnn1) {
    const Eigen::VectorXd feature_cot =
        enc::amplitude_encode_vjp(fwd.features, adj2.input_gradient);
    const qnn::AdjointResult adj1 =
        qnn::gradient_adjoint(fwd.qnn1_input, qnn1_params(arch, params, lay), feature_cot);
    grad.segment(lay.qnn1_offset, lay.qnn1_size) = adj1.angle_gradients;
  }
  return grad;
}

double solution_bias(const Architecture& arch,
                     const Eigen::Ref<const Eigen::VectorXd>& params, int field) {
  check_params(arch, params);
  if (field < 0 || field >= arch.n_fields) {
    throw std::out_of_range("field index out of range");
  }
  return params[layout_of(arch).heads[field].solution_bias_offset];
}

Eigen::VectorXd reconstruct(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                            const wave::BasisMatrices& basis, wave::DerivOrder order,
                            double solution_bias) {
  Eigen::VectorXd u = basis.apply(order, coeffs);
  if (order.dx == 0 && order.dy == 0) {
    u.array() += solution_bias;
  }
  return u;
}

}  // namespace qwpde::model
