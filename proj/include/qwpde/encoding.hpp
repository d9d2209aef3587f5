#pragma once

#include <Eigen/Core>

#include "qwpde/statevector.hpp"

namespace qwpde::enc {

/// Angle encoding: feature k becomes a rotation by features[k] on qubit k,
/// applied to |0...0>. Qubits beyond the feature count are left untouched.
/// Requires features.size() <= n_qubits.
sv::StateVector angle_encode(const Eigen::Ref<const Eigen::VectorXd>& features,
                             int n_qubits, sv::Axis axis = sv::Axis::Y);

/// Amplitude encoding: amplitudes[i] = features[i] / ||features|| for
/// i < features.size(), zero-padded above. Requires a nonzero feature vector
/// and features.size() <= 2^n_qubits. Signs are carried into the amplitudes.
sv::StateVector amplitude_encode(const Eigen::Ref<const Eigen::VectorXd>& features,
                                 int n_qubits);

/// Pullback of amplitude_encode for real features: given dL/d(amplitude_i)
/// restricted to the real amplitudes (length >= features.size()), returns
/// dL/d(features). With v = u/||u||, the Jacobian is (I - v v^T)/||u||.
Eigen::VectorXd amplitude_encode_vjp(
    const Eigen::Ref<const Eigen::VectorXd>& features,
    const Eigen::Ref<const Eigen::VectorXd>& amplitude_cotangent);

/// Invertible affine map from per-dimension intervals onto [0, pi]. Rotation
/// gates are 2*pi periodic, so raw PDE coordinates are compressed into a fixed
/// window before angle encoding; the run config records lo/hi.
class DomainRescaler {
 public:
  DomainRescaler() = default;
  DomainRescaler(Eigen::VectorXd lo, Eigen::VectorXd hi);

  Eigen::VectorXd to_angles(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd from_angles(const Eigen::Ref<const Eigen::VectorXd>& a) const;
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }

 private:
  Eigen::VectorXd lo_, hi_;
};

}  // namespace qwpde::enc
