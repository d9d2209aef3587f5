#include "qwpde/encoding.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qwpde::enc {

sv::StateVector angle_encode(const Eigen::Ref<const Eigen::VectorXd>& features,
                             int n_qubits, sv::Axis axis) {
  if (features.size() > n_qubits) {
    throw std::invalid_argument("angle encoding needs at least one qubit per feature: " +
                                std::to_string(features.size()) + " features, " +
                                std::to_string(n_qubits) + " qubits");
  }
  if (!features.allFinite()) {
    throw std::invalid_argument("angle encoding features must be finite");
  }
  sv::StateVector state = sv::init_zero_state(n_qubits);
  for (Eigen::Index k = 0; k < features.size(); ++k) {
    sv::apply_rotation_in_place(state, axis, static_cast<int>(k), features[k]);
  }
  return state;
}

sv::StateVector amplitude_encode(const Eigen::Ref<const Eigen::VectorXd>& features,
                                 int n_qubits) {
  if (n_qubits < 1 || n_qubits > sv::kMaxQubits) {
    throw std::invalid_argument("amplitude encoding qubit count out of range");
  }
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  if (features.size() < 1 || features.size() > dim) {
    throw std::invalid_argument("amplitude encoding needs 1 <= N <= 2^n features, got " +
                                std::to_string(features.size()));
  }
  if (!features.allFinite()) {
    throw std::invalid_argument("amplitude encoding features must be finite");
  }
  const double nrm = features.norm();
  if (nrm == 0.0) {
    throw std::domain_error("amplitude encoding cannot normalise an all-zero vector");
  }
  sv::StateVector state;
  state.n_qubits = n_qubits;
  state.amplitudes = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    state.amplitudes[i] = sv::Complex(features[i] / nrm, 0.0);
  }
  return state;
}

Eigen::VectorXd amplitude_encode_vjp(
    const Eigen::Ref<const Eigen::VectorXd>& features,
    const Eigen::Ref<const Eigen::VectorXd>& amplitude_cotangent) {
  const Eigen::Index n = features.size();
  if (amplitude_cotangent.size() < n) {
    throw std::invalid_argument("amplitude cotangent shorter than feature vector");
  }
  const double nrm = features.norm();
  if (nrm == 0.0) {
    throw std::domain_error("amplitude encoding vjp at an all-zero vector");
  }
  const Eigen::VectorXd v = features / nrm;
  // Padded amplitudes are zero, so only the leading n cotangent entries enter.
  const Eigen::VectorXd w = amplitude_cotangent.head(n);
  return (w - v.dot(w) * v) / nrm;
}

DomainRescaler::DomainRescaler(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) {
    throw std::invalid_argument("rescaler lo/hi dimension mismatch");
  }
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] < hi_[i])) {
      throw std::invalid_argument("rescaler needs lo < hi in every dimension");
    }
  }
}

Eigen::VectorXd DomainRescaler::to_angles(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != lo_.size()) {
    throw std::invalid_argument("rescaler input dimension mismatch");
  }
  return ((x - lo_).array() / (hi_ - lo_).array() * std::numbers::pi).matrix();
}

Eigen::VectorXd DomainRescaler::from_angles(
    const Eigen::Ref<const Eigen::VectorXd>& a) const {
  if (a.size() != lo_.size()) {
    throw std::invalid_argument("rescaler input dimension mismatch");
  }
  return (lo_.array() + a.array() / std::numbers::pi * (hi_ - lo_).array()).matrix();
}

}  // namespace qwpde::enc
