#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qwpde/encoding.hpp"
#include "qwpde/model.hpp"
#include "qwpde/problems.hpp"

namespace qwpde::train {

/// Piecewise-constant step decay: the initial rate is divided by 1/decay at
/// every milestone epoch and clamped below at min_lr.
struct LrSchedule {
  double initial = 1e-2;
  std::vector<long long> milestones;
  double decay = 0.1;
  double min_lr = 1e-5;
};

double lr_at_epoch(const LrSchedule& schedule, long long epoch);

enum class SamplingStrategy { Uniform, Grid };
enum class CoefficientMode { Global, PerPoint };
enum class HeteroUpdate { Joint, Alternating };

/// All components default to 1 (the composite loss is an unweighted sum);
/// non-default weights are recorded in the run report.
struct LossWeights {
  double pde = 1.0, ic = 1.0, bc = 1.0, interface_ = 1.0;
  bool any_non_default() const {
    return pde != 1.0 || ic != 1.0 || bc != 1.0 || interface_ != 1.0;
  }
};

struct ProblemParams {
  std::string name = "heat_conduction";
  double epsilon = 0.5;                       // heat conduction
  double kappa = 1.0, b1 = 1.0, b2 = 8.0;     // helmholtz
  double a = 5.0, alpha = -1.0, beta = 0.0, gamma = 1.0;  // klein-gordon
  int power = 3;
  bool heterogeneous = false;                 // maxwell
  double mode_n = 4.0, cavity_length = 1.0;
};

std::unique_ptr<prob::Problem> make_problem(const ProblemParams& params);

struct TrainConfig {
  ProblemParams problem;

  // architecture
  int qnn1_qubits = 4, qnn1_layers = 2;
  int qnn2_qubits = 13, qnn2_layers = 4;
  bool use_qnn1 = true;
  std::vector<int> x_resolutions;  // contiguous integer scale sets
  std::vector<int> t_resolutions;

  // point counts; collocation/initial are per subdomain, boundary is split
  // evenly across a subdomain's boundary segments
  Eigen::Index n_collocation = 8192;
  Eigen::Index n_boundary = 1000;
  Eigen::Index n_initial = 1000;
  Eigen::Index n_interface = 0;
  SamplingStrategy strategy = SamplingStrategy::Uniform;

  // optimisation
  long long epochs = 1000;
  LrSchedule lr;
  CoefficientMode mode = CoefficientMode::Global;
  HeteroUpdate hetero_update = HeteroUpdate::Joint;
  LossWeights weights;

  // evaluation & logging
  int validation_grid0 = 256, validation_grid1 = 256;
  long long history_stride = 100;
  long long validation_stride = 1000;
  std::vector<std::uint64_t> seeds = {0};
  double basis_truncation = 0.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct LossBreakdown {
  double total = 0, pde = 0, ic = 0, bc = 0, interface_ = 0;
};

struct AdamState {
  Eigen::VectorXd m, v;
  long long step = 0;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
};

/// Standard bias-corrected Adam update, element-wise. Throws on non-finite
/// gradients.
void adam_step(Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads, AdamState& state,
               double lr);

using Points = Eigen::Matrix<double, Eigen::Dynamic, 2>;

struct PointSets {
  std::vector<Points> collocation;  // per subdomain
  std::vector<Points> segments;     // aligned with problem.segments()
  std::vector<Points> validation;   // per subdomain, fixed uniform tensor grid
};

/// Collocation i.i.d. uniform over each subdomain interior (or a tensor grid
/// under the grid strategy); segment points uniform along the free coordinate;
/// validation is a deterministic inclusive grid independent of the seed.
PointSets sample_points(const prob::Problem& problem, const TrainConfig& config,
                        std::uint64_t seed);

struct ValidationMetrics {
  double rel_l2 = 0, rel_linf = 0;           // pooled across fields/subdomains
  std::vector<double> field_rel_l2, field_rel_linf;
};

struct HistoryRow {
  long long epoch = 0;
  double lr = 0;
  LossBreakdown loss;
  bool has_validation = false;
  ValidationMetrics validation;
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  long long epochs_run = 0;
  LossBreakdown final_loss;
  ValidationMetrics final_metrics;
  double wall_seconds = 0;
  Eigen::Index trainable_parameters = 0;
  std::vector<HistoryRow> history;
  Eigen::VectorXd params;
};

/// Owns everything one seed's training needs: the problem, one model per
/// subdomain, sampled point sets, precomputed basis matrices and targets.
/// Pure given (config, seed): two instances produce bit-identical histories.
class Trainer {
 public:
  Trainer(const TrainConfig& config, std::uint64_t seed);
  ~Trainer();
  Trainer(Trainer&&) noexcept;
  Trainer& operator=(Trainer&&) noexcept;

  const TrainConfig& config() const;
  const prob::Problem& problem() const;
  int model_count() const;
  const model::Architecture& architecture(int sub) const;
  Eigen::Index model_offset(int sub) const;
  Eigen::Index total_parameters() const;

  const Eigen::VectorXd& params() const;
  void set_params(const Eigen::Ref<const Eigen::VectorXd>& params);

  /// One composite loss evaluation at the current parameters; fills the flat
  /// gradient when grad_out is non-null.
  LossBreakdown loss(Eigen::VectorXd* grad_out);

  ValidationMetrics validate();

  /// Field values at arbitrary points of one subdomain (order (0,0) + bias).
  Eigen::VectorXd predict_field(int sub, int field, const Points& points);

  /// Full training loop: per-epoch {loss+grads -> adam -> schedule}, history
  /// at the configured strides, final metrics. Non-finite losses abort the
  /// seed and flag the partial result failed.
  SeedResult run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qwpde::train
