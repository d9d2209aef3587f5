#pragma once

#include <string>
#include <vector>

#include "qwpde/training.hpp"

namespace qwpde::gradcheck {

/// Circuit-level gradient oracle sweep over random strongly-entangling
/// circuits: adjoint vs parameter-shift in max absolute difference, and
/// adjoint vs central finite differences in vector-relative error.
struct CircuitOracleReport {
  int circuits = 0;
  double max_adjoint_vs_shift = 0.0;
  double max_vs_finite_diff = 0.0;
  bool pass(double tol_pair = 1e-10, double tol_fd = 1e-5) const {
    return max_adjoint_vs_shift < tol_pair && max_vs_finite_diff < tol_fd;
  }
};

CircuitOracleReport circuit_gradient_oracle(int n_circuits, std::uint64_t seed,
                                            int max_qubits = 5, int max_layers = 3);

/// Whole-chain check: the analytic gradient of the composite loss against
/// central finite differences over every trainable parameter.
struct LossGradientReport {
  std::string label;
  Eigen::Index n_params = 0;
  double vector_rel_error = 0.0;  // ||g_fd - g|| / ||g||, the pass criterion
  double max_entry_error = 0.0;   // entry-wise diagnostic, floored at the
                                  // gradient scale (finite differences are
                                  // noise-dominated on near-zero entries)
  bool pass(double tol = 1e-5) const { return vector_rel_error < tol; }
};

LossGradientReport loss_gradient_check(const train::TrainConfig& config,
                                       std::uint64_t seed, double h = 1e-5);

/// Small configurations of all four benchmark problems (plus the
/// heterogeneous Maxwell medium and a per-point-mode variant), sized so a
/// full finite-difference sweep stays cheap.
std::vector<std::pair<std::string, train::TrainConfig>> toy_configs();

}  // namespace qwpde::gradcheck
