#include "qwpde/gradcheck.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "qwpde/encoding.hpp"
#include "qwpde/qnn.hpp"
#include "qwpde/rng.hpp"

namespace qwpde::gradcheck {

CircuitOracleReport circuit_gradient_oracle(int n_circuits, std::uint64_t seed,
                                            int max_qubits, int max_layers) {
  std::mt19937_64 engine(seed);
  constexpr double kPi = std::numbers::pi;
  CircuitOracleReport rep;
  rep.circuits = n_circuits;

  for (int trial = 0; trial < n_circuits; ++trial) {
    const int n = 1 + int(engine() % std::uint64_t(max_qubits));
    const int layers = 1 + int(engine() % std::uint64_t(max_layers));
    qnn::CircuitParams params = qnn::CircuitParams::zero(n, layers);
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      params.angles[i] = rng::uniform(engine, -kPi, kPi);
    }
    Eigen::VectorXd raw(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw[i] = rng::uniform(engine, -1, 1);
    const sv::StateVector input = enc::amplitude_encode(raw, n);
    Eigen::VectorXd cot(n);
    for (int q = 0; q < n; ++q) cot[q] = rng::uniform(engine, -1, 1);

    const qnn::AdjointResult adj = qnn::gradient_adjoint(input, params, cot);
    const Eigen::VectorXd shift = qnn::gradient_parameter_shift(input, params, cot);
    rep.max_adjoint_vs_shift = std::max(
        rep.max_adjoint_vs_shift, (adj.angle_gradients - shift).cwiseAbs().maxCoeff());

    const double h = 1e-5;
    Eigen::VectorXd fd(params.size());
    qnn::CircuitParams shifted = params;
    for (Eigen::Index j = 0; j < params.size(); ++j) {
      shifted.angles[j] = params.angles[j] + h;
      const double up = cot.dot(qnn::forward(input, shifted));
      shifted.angles[j] = params.angles[j] - h;
      const double down = cot.dot(qnn::forward(input, shifted));
      shifted.angles[j] = params.angles[j];
      fd[j] = (up - down) / (2 * h);
    }
    const double denom = std::max(adj.angle_gradients.norm(), 1e-12);
    rep.max_vs_finite_diff =
        std::max(rep.max_vs_finite_diff, (adj.angle_gradients - fd).norm() / denom);
  }
  return rep;
}

LossGradientReport loss_gradient_check(const train::TrainConfig& config,
                                       std::uint64_t seed, double h) {
  train::Trainer trainer(config, seed);
  LossGradientReport rep;
  rep.label = config.problem.name;
  rep.n_params = trainer.total_parameters();

  Eigen::VectorXd grad(trainer.total_parameters());
  trainer.loss(&grad);

  const Eigen::VectorXd base = trainer.params();
  Eigen::VectorXd fd(base.size());
  for (Eigen::Index j = 0; j < base.size(); ++j) {
    Eigen::VectorXd p = base;
    p[j] = base[j] + h;
    trainer.set_params(p);
    const double up = trainer.loss(nullptr).total;
    p[j] = base[j] - h;
    trainer.set_params(p);
    const double down = trainer.loss(nullptr).total;
    fd[j] = (up - down) / (2 * h);
  }
  trainer.set_params(base);

  rep.vector_rel_error = (fd - grad).norm() / std::max(grad.norm(), 1e-12);
  const double floor = std::max(1e-8, 1e-6 * grad.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < base.size(); ++j) {
    const double scale = std::max({std::abs(grad[j]), std::abs(fd[j]), floor});
    worst = std::max(worst, std::abs(grad[j] - fd[j]) / scale);
  }
  rep.max_entry_error = worst;
  return rep;
}

std::vector<std::pair<std::string, train::TrainConfig>> toy_configs() {
  train::TrainConfig base;
  base.qnn1_qubits = 2;
  base.qnn1_layers = 1;
  base.qnn2_qubits = 3;
  base.qnn2_layers = 1;
  base.x_resolutions = {-1, 0};
  base.t_resolutions = {-1, 0};
  base.n_collocation = 24;
  base.n_boundary = 8;
  base.n_initial = 6;
  base.epochs = 1;
  base.validation_grid0 = 4;
  base.validation_grid1 = 4;
  base.history_stride = 1;
  base.validation_stride = 0;

  std::vector<std::pair<std::string, train::TrainConfig>> out;

  train::TrainConfig heat = base;
  heat.problem.name = "heat_conduction";
  heat.problem.epsilon = 0.5;
  out.emplace_back("heat_conduction", heat);

  train::TrainConfig helm = base;
  helm.problem.name = "helmholtz";
  helm.problem.b2 = 2.0;  // keep the forcing scale moderate in the toy check
  helm.n_initial = 0;
  out.emplace_back("helmholtz", helm);

  train::TrainConfig kg = base;
  kg.problem.name = "klein_gordon";
  kg.problem.a = 2.0;
  out.emplace_back("klein_gordon_cubic", kg);

  train::TrainConfig homo = base;
  homo.problem.name = "maxwell";
  homo.problem.mode_n = 1.0;
  out.emplace_back("maxwell_homogeneous", homo);

  train::TrainConfig hetero = homo;
  hetero.problem.heterogeneous = true;
  hetero.n_interface = 6;
  out.emplace_back("maxwell_heterogeneous", hetero);

  train::TrainConfig per_point = heat;
  per_point.mode = train::CoefficientMode::PerPoint;
  per_point.n_collocation = 12;
  per_point.n_boundary = 4;
  per_point.n_initial = 4;
  out.emplace_back("heat_conduction_per_point", per_point);

  train::TrainConfig hetero_pp = hetero;
  hetero_pp.mode = train::CoefficientMode::PerPoint;
  hetero_pp.n_collocation = 8;
  hetero_pp.n_boundary = 4;
  hetero_pp.n_initial = 4;
  hetero_pp.n_interface = 4;
  out.emplace_back("maxwell_heterogeneous_per_point", hetero_pp);

  return out;
}

}  // namespace qwpde::gradcheck
