#include "qwpde/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qwpde/metrics.hpp"
#include "qwpde/rng.hpp"

namespace qwpde::train {

namespace {

int bucket_of(prob::SegmentKind kind) {
  switch (kind) {
    case prob::SegmentKind::Initial:
      return 1;
    case prob::SegmentKind::Boundary:
      return 2;
    case prob::SegmentKind::Interface:
      return 3;
  }
  return 2;
}

}  // namespace

double lr_at_epoch(const LrSchedule& schedule, long long epoch) {
  if (epoch < 0) throw std::invalid_argument("epoch must be >= 0");
  double lr = schedule.initial;
  for (long long m : schedule.milestones) {
    if (epoch >= m) lr *= schedule.decay;
  }
  return std::max(lr, schedule.min_lr);
}

void adam_step(Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads, AdamState& state,
               double lr) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam: parameter/gradient size mismatch");
  }
  if (!grads.allFinite()) {
    throw std::runtime_error("adam: non-finite gradient");
  }
  if (state.m.size() == 0) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam: state size mismatch");
  }
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(state.beta1, double(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, double(state.step));
  params.array() -= lr * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + state.epsilon);
}

std::unique_ptr<prob::Problem> make_problem(const ProblemParams& p) {
  if (p.name == "heat_conduction") return prob::heat_conduction_problem(p.epsilon);
  if (p.name == "helmholtz") return prob::helmholtz_problem(p.kappa, p.b1, p.b2);
  if (p.name == "klein_gordon") {
    return prob::klein_gordon_problem(p.a, p.alpha, p.beta, p.gamma, p.power);
  }
  if (p.name == "maxwell") {
    prob::MaxwellMedium medium;
    medium.heterogeneous = p.heterogeneous;
    medium.mode_n = p.mode_n;
    medium.cavity_length = p.cavity_length;
    return prob::maxwell_problem(medium);
  }
  throw std::invalid_argument("unknown problem: " + p.name);
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (x_resolutions.empty()) fail("wavelet.x_resolutions must be nonempty");
  if (t_resolutions.empty()) fail("wavelet.t_resolutions must be nonempty");
  for (const auto* res : {&x_resolutions, &t_resolutions}) {
    for (std::size_t i = 1; i < res->size(); ++i) {
      if ((*res)[i] <= (*res)[i - 1]) fail("resolution sets must be strictly increasing");
    }
  }
  if (n_collocation < 1) fail("points.collocation must be >= 1");
  if (n_boundary < 0 || n_initial < 0 || n_interface < 0) fail("point counts must be >= 0");
  if (epochs < 1) fail("training.epochs must be >= 1");
  if (!(lr.initial > 0.0)) fail("training.learning_rate must be > 0");
  if (!(lr.decay > 0.0 && lr.decay <= 1.0)) fail("training.lr_decay must be in (0, 1]");
  if (lr.min_lr < 0.0) fail("training.min_learning_rate must be >= 0");
  for (std::size_t i = 1; i < lr.milestones.size(); ++i) {
    if (lr.milestones[i] <= lr.milestones[i - 1]) {
      fail("training.lr_milestones must be strictly increasing");
    }
  }
  if (use_qnn1 && (qnn1_qubits < 2 || qnn1_qubits > sv::kMaxQubits)) {
    fail("architecture.qnn1_qubits must fit both coordinates (2.." +
         std::to_string(sv::kMaxQubits) + ")");
  }
  if (use_qnn1 && qnn1_layers < 1) fail("architecture.qnn1_layers must be >= 1");
  if (qnn2_qubits < 1 || qnn2_qubits > sv::kMaxQubits) {
    fail("architecture.qnn2_qubits out of range");
  }
  if (qnn2_layers < 1) fail("architecture.qnn2_layers must be >= 1");
  if (use_qnn1 && qnn1_qubits > (Eigen::Index(1) << qnn2_qubits)) {
    fail("qnn1 output exceeds qnn2 amplitude capacity");
  }
  if (validation_grid0 < 2 || validation_grid1 < 2) {
    fail("validation grid must be at least 2x2");
  }
  if (seeds.empty()) fail("seeds must be nonempty");
  if (weights.pde < 0 || weights.ic < 0 || weights.bc < 0 || weights.interface_ < 0) {
    fail("loss weights must be >= 0");
  }
  if (basis_truncation < 0) fail("wavelet.truncation must be >= 0");
}

PointSets sample_points(const prob::Problem& problem, const TrainConfig& config,
                        std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  PointSets out;
  const int n_sub = problem.subdomain_count();

  for (int sub = 0; sub < n_sub; ++sub) {
    const prob::Domain2& d = problem.domain(sub);
    Points colloc(config.n_collocation, 2);
    if (config.strategy == SamplingStrategy::Uniform) {
      for (Eigen::Index i = 0; i < config.n_collocation; ++i) {
        colloc(i, 0) = rng::uniform(engine, d.x.lo, d.x.hi);
        colloc(i, 1) = rng::uniform(engine, d.t.lo, d.t.hi);
      }
    } else {
      // smallest n0 x n1 midpoint grid covering N, first N points row-major
      const auto n = config.n_collocation;
      const Eigen::Index n0 = std::max<Eigen::Index>(
          1, static_cast<Eigen::Index>(std::llround(std::sqrt(double(n)))));
      const Eigen::Index n1 = (n + n0 - 1) / n0;
      Eigen::Index w = 0;
      for (Eigen::Index i = 0; i < n0 && w < n; ++i) {
        for (Eigen::Index j = 0; j < n1 && w < n; ++j, ++w) {
          colloc(w, 0) = d.x.lo + (double(i) + 0.5) / double(n0) * d.x.length();
          colloc(w, 1) = d.t.lo + (double(j) + 0.5) / double(n1) * d.t.length();
        }
      }
    }
    out.collocation.push_back(std::move(colloc));
  }

  // boundary budget is split evenly across each subdomain's boundary segments
  std::vector<Eigen::Index> counts(problem.segments().size(), 0);
  for (int sub = 0; sub < n_sub; ++sub) {
    std::vector<std::size_t> boundary_ids;
    for (std::size_t i = 0; i < problem.segments().size(); ++i) {
      const prob::Segment& s = problem.segments()[i];
      if (s.kind == prob::SegmentKind::Boundary && s.subdomain == sub) {
        boundary_ids.push_back(i);
      }
    }
    if (!boundary_ids.empty()) {
      const Eigen::Index base = config.n_boundary / Eigen::Index(boundary_ids.size());
      const Eigen::Index rem = config.n_boundary % Eigen::Index(boundary_ids.size());
      for (std::size_t k = 0; k < boundary_ids.size(); ++k) {
        counts[boundary_ids[k]] = base + (Eigen::Index(k) < rem ? 1 : 0);
      }
    }
  }
  for (std::size_t i = 0; i < problem.segments().size(); ++i) {
    const prob::Segment& s = problem.segments()[i];
    if (s.kind == prob::SegmentKind::Initial) counts[i] = config.n_initial;
    if (s.kind == prob::SegmentKind::Interface) counts[i] = config.n_interface;
  }

  for (std::size_t i = 0; i < problem.segments().size(); ++i) {
    const prob::Segment& s = problem.segments()[i];
    const prob::Domain2& d = problem.domain(s.subdomain);
    const wave::Interval free = (s.fixed_dim == 0) ? d.t : d.x;
    Points pts(counts[i], 2);
    for (Eigen::Index k = 0; k < counts[i]; ++k) {
      const double v = rng::uniform(engine, free.lo, free.hi);
      pts(k, s.fixed_dim) = s.fixed_value;
      pts(k, 1 - s.fixed_dim) = v;
    }
    out.segments.push_back(std::move(pts));
  }

  // validation: fixed inclusive tensor grid, independent of the seed
  for (int sub = 0; sub < n_sub; ++sub) {
    const prob::Domain2& d = problem.domain(sub);
    const Eigen::Index g0 = config.validation_grid0;
    const Eigen::Index g1 = config.validation_grid1;
    Points grid(g0 * g1, 2);
    for (Eigen::Index i = 0; i < g0; ++i) {
      const double x = d.x.lo + double(i) / double(g0 - 1) * d.x.length();
      for (Eigen::Index j = 0; j < g1; ++j) {
        grid(i * g1 + j, 0) = x;
        grid(i * g1 + j, 1) = d.t.lo + double(j) / double(g1 - 1) * d.t.length();
      }
    }
    out.validation.push_back(std::move(grid));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trainer
// ---------------------------------------------------------------------------

struct SegmentBasis {
  wave::BasisMatrices own;
  std::optional<wave::BasisMatrices> other;     // second subdomain (interface)
  std::vector<Eigen::VectorXd> targets;         // per constraint; empty for interface
};

struct Trainer::Impl {
  TrainConfig config;
  std::uint64_t seed = 0;
  std::unique_ptr<prob::Problem> problem;

  std::vector<model::Architecture> archs;
  std::vector<model::ParamLayout> layouts;
  std::vector<Eigen::Index> offsets;
  Eigen::Index total_params = 0;

  std::vector<wave::WaveletFamily2D> families;
  std::vector<enc::DomainRescaler> rescalers;
  std::vector<Eigen::VectorXd> probes;  // global-mode probe angles per model

  PointSets points;
  std::vector<wave::BasisMatrices> colloc_basis;
  std::vector<std::vector<Eigen::VectorXd>> colloc_forcing;  // [sub][field]
  std::vector<SegmentBasis> seg_basis;
  std::vector<wave::BasisMatrices> val_basis;
  std::vector<std::vector<Eigen::VectorXd>> val_exact;       // [sub][field]

  Eigen::VectorXd params;
  AdamState adam;

  int n_models() const { return static_cast<int>(archs.size()); }

  double bias_of(int sub, int field) const {
    return params[offsets[sub] + layouts[sub].heads[field].solution_bias_offset];
  }

  model::Forward forward_at(int sub, double x, double t) const {
    Eigen::Vector2d p(x, t);
    return model::predict_coefficients(
        archs[sub], params.segment(offsets[sub], layouts[sub].total),
        rescalers[sub].to_angles(p));
  }

  LossBreakdown loss_global(Eigen::VectorXd* grad_out);
  LossBreakdown loss_per_point(Eigen::VectorXd* grad_out);
  Eigen::VectorXd field_values(int sub, int field, const wave::BasisMatrices& basis);
};

Trainer::Trainer(const TrainConfig& config, std::uint64_t seed)
    : impl_(std::make_unique<Impl>()) {
  config.validate();
  Impl& im = *impl_;
  im.config = config;
  im.seed = seed;
  im.problem = make_problem(config.problem);
  const prob::Problem& problem = *im.problem;
  const int n_sub = problem.subdomain_count();
  const int n_fields = problem.field_count();

  for (int sub = 0; sub < n_sub; ++sub) {
    const prob::Domain2& d = problem.domain(sub);
    im.families.push_back(wave::build_family_2d(d.x, config.x_resolutions, d.t,
                                                config.t_resolutions));
    model::Architecture arch;
    arch.qnn1_qubits = config.qnn1_qubits;
    arch.qnn1_layers = config.qnn1_layers;
    arch.qnn2_qubits = config.qnn2_qubits;
    arch.qnn2_layers = config.qnn2_layers;
    arch.use_qnn1 = config.use_qnn1;
    arch.n_fields = n_fields;
    arch.n_coefficients = im.families.back().size();
    im.archs.push_back(arch);
    im.layouts.push_back(model::layout_of(arch));
    im.offsets.push_back(im.total_params);
    im.total_params += im.layouts.back().total;

    Eigen::Vector2d lo(d.x.lo, d.t.lo), hi(d.x.hi, d.t.hi);
    im.rescalers.emplace_back(lo, hi);
    Eigen::Vector2d mid(d.x.midpoint(), d.t.midpoint());
    im.probes.push_back(im.rescalers.back().to_angles(mid));
  }

  im.params.resize(im.total_params);
  for (int sub = 0; sub < n_sub; ++sub) {
    im.params.segment(im.offsets[sub], im.layouts[sub].total) =
        model::init_params(im.archs[sub], rng::mix(seed, 100 + sub));
  }

  im.points = sample_points(problem, config, seed);

  for (int sub = 0; sub < n_sub; ++sub) {
    std::vector<wave::DerivOrder> orders;
    for (int f = 0; f < n_fields; ++f) {
      for (const wave::DerivOrder& o : problem.residual_orders(f)) {
        if (std::find(orders.begin(), orders.end(), o) == orders.end()) {
          orders.push_back(o);
        }
      }
    }
    im.colloc_basis.emplace_back(im.families[sub], im.points.collocation[sub], orders,
                                 config.basis_truncation);
    std::vector<Eigen::VectorXd> forcing(n_fields);
    for (int f = 0; f < n_fields; ++f) {
      const Points& pts = im.points.collocation[sub];
      forcing[f].resize(pts.rows());
      for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        forcing[f][i] = problem.forcing(sub, f, pts(i, 0), pts(i, 1));
      }
    }
    im.colloc_forcing.push_back(std::move(forcing));
  }

  for (std::size_t si = 0; si < problem.segments().size(); ++si) {
    const prob::Segment& seg = problem.segments()[si];
    const Points& pts = im.points.segments[si];
    std::vector<wave::DerivOrder> orders;
    for (const prob::PointConstraint& c : seg.constraints) {
      if (std::find(orders.begin(), orders.end(), c.order) == orders.end()) {
        orders.push_back(c.order);
      }
    }
    SegmentBasis sb{
        wave::BasisMatrices(im.families[seg.subdomain], pts, orders,
                            config.basis_truncation),
        std::nullopt,
        {}};
    if (seg.kind == prob::SegmentKind::Interface) {
      sb.other = wave::BasisMatrices(im.families[1], pts, orders, config.basis_truncation);
    } else {
      for (const prob::PointConstraint& c : seg.constraints) {
        Eigen::VectorXd target(pts.rows());
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
          target[i] = c.target(pts(i, 0), pts(i, 1));
        }
        sb.targets.push_back(std::move(target));
      }
    }
    im.seg_basis.push_back(std::move(sb));
  }

  for (int sub = 0; sub < n_sub; ++sub) {
    im.val_basis.emplace_back(im.families[sub], im.points.validation[sub],
                              std::vector<wave::DerivOrder>{{0, 0}},
                              config.basis_truncation);
    std::vector<Eigen::VectorXd> exact(n_fields);
    const Points& pts = im.points.validation[sub];
    for (int f = 0; f < n_fields; ++f) {
      exact[f].resize(pts.rows());
      for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        exact[f][i] = problem.exact(sub, f, pts(i, 0), pts(i, 1));
      }
    }
    im.val_exact.push_back(std::move(exact));
  }
}

Trainer::~Trainer() = default;
Trainer::Trainer(Trainer&&) noexcept = default;
Trainer& Trainer::operator=(Trainer&&) noexcept = default;

const TrainConfig& Trainer::config() const { return impl_->config; }
const prob::Problem& Trainer::problem() const { return *impl_->problem; }
int Trainer::model_count() const { return impl_->n_models(); }
const model::Architecture& Trainer::architecture(int sub) const {
  return impl_->archs.at(sub);
}
Eigen::Index Trainer::model_offset(int sub) const { return impl_->offsets.at(sub); }
Eigen::Index Trainer::total_parameters() const { return impl_->total_params; }
const Eigen::VectorXd& Trainer::params() const { return impl_->params; }

void Trainer::set_params(const Eigen::Ref<const Eigen::VectorXd>& params) {
  if (params.size() != impl_->total_params) {
    throw std::invalid_argument("parameter vector size mismatch");
  }
  impl_->params = params;
}

LossBreakdown Trainer::loss(Eigen::VectorXd* grad_out) {
  return impl_->config.mode == CoefficientMode::Global
             ? impl_->loss_global(grad_out)
             : impl_->loss_per_point(grad_out);
}

LossBreakdown Trainer::Impl::loss_global(Eigen::VectorXd* grad_out) {
  const prob::Problem& pr = *problem;
  const int n_sub = pr.subdomain_count();
  const int n_fields = pr.field_count();

  std::vector<model::Forward> fwd(n_sub);
  std::vector<std::vector<double>> biases(n_sub, std::vector<double>(n_fields));
  for (int sub = 0; sub < n_sub; ++sub) {
    fwd[sub] = model::predict_coefficients(
        archs[sub], params.segment(offsets[sub], layouts[sub].total), probes[sub]);
    for (int f = 0; f < n_fields; ++f) biases[sub][f] = bias_of(sub, f);
  }

  double sq[4] = {0, 0, 0, 0};
  Eigen::Index cnt[4] = {0, 0, 0, 0};

  std::vector<prob::ResidualEvaluation> evals(n_sub);
  for (int sub = 0; sub < n_sub; ++sub) {
    evals[sub] = prob::evaluate_residual(pr, sub, colloc_basis[sub],
                                         fwd[sub].coefficients, biases[sub],
                                         &colloc_forcing[sub]);
    for (int f = 0; f < n_fields; ++f) {
      sq[0] += evals[sub].residuals[f].squaredNorm();
      cnt[0] += evals[sub].residuals[f].size();
    }
  }

  std::vector<std::vector<Eigen::VectorXd>> mismatches(seg_basis.size());
  for (std::size_t si = 0; si < seg_basis.size(); ++si) {
    const prob::Segment& seg = pr.segments()[si];
    const SegmentBasis& sb = seg_basis[si];
    const int b = bucket_of(seg.kind);
    for (std::size_t ci = 0; ci < seg.constraints.size(); ++ci) {
      const prob::PointConstraint& c = seg.constraints[ci];
      const bool with_bias = c.order == wave::DerivOrder{0, 0};
      Eigen::VectorXd mis;
      if (seg.kind == prob::SegmentKind::Interface) {
        Eigen::VectorXd ua = sb.own.apply(c.order, fwd[0].coefficients[c.field]);
        Eigen::VectorXd ub = sb.other->apply(c.order, fwd[1].coefficients[c.field]);
        if (with_bias) {
          ua.array() += biases[0][c.field];
          ub.array() += biases[1][c.field];
        }
        mis = ua - ub;
      } else {
        mis = sb.own.apply(c.order, fwd[seg.subdomain].coefficients[c.field]);
        if (with_bias) mis.array() += biases[seg.subdomain][c.field];
        mis -= sb.targets[ci];
      }
      sq[b] += mis.squaredNorm();
      cnt[b] += mis.size();
      mismatches[si].push_back(std::move(mis));
    }
  }

  const double wts[4] = {config.weights.pde, config.weights.ic, config.weights.bc,
                         config.weights.interface_};
  LossBreakdown lb;
  double comp[4];
  for (int b = 0; b < 4; ++b) comp[b] = cnt[b] > 0 ? wts[b] * sq[b] / double(cnt[b]) : 0.0;
  lb.pde = comp[0];
  lb.ic = comp[1];
  lb.bc = comp[2];
  lb.interface_ = comp[3];
  lb.total = lb.pde + lb.ic + lb.bc + lb.interface_;
  if (grad_out == nullptr) return lb;

  std::vector<std::vector<Eigen::VectorXd>> coeff_cot(n_sub);
  std::vector<std::vector<double>> bias_cot(n_sub, std::vector<double>(n_fields, 0.0));
  for (int sub = 0; sub < n_sub; ++sub) {
    coeff_cot[sub].assign(n_fields, Eigen::VectorXd::Zero(archs[sub].n_coefficients));
  }

  if (cnt[0] > 0) {
    for (int sub = 0; sub < n_sub; ++sub) {
      std::vector<Eigen::VectorXd> res_cot(n_fields);
      for (int f = 0; f < n_fields; ++f) {
        res_cot[f] = (2.0 * wts[0] / double(cnt[0])) * evals[sub].residuals[f];
      }
      const prob::CoefficientPullback pb =
          prob::residual_vjp(pr, sub, colloc_basis[sub], evals[sub], res_cot);
      for (int f = 0; f < n_fields; ++f) {
        coeff_cot[sub][f] += pb.coefficients[f];
        bias_cot[sub][f] += pb.biases[f];
      }
    }
  }

  for (std::size_t si = 0; si < seg_basis.size(); ++si) {
    const prob::Segment& seg = pr.segments()[si];
    const SegmentBasis& sb = seg_basis[si];
    const int b = bucket_of(seg.kind);
    if (cnt[b] == 0) continue;
    for (std::size_t ci = 0; ci < seg.constraints.size(); ++ci) {
      const prob::PointConstraint& c = seg.constraints[ci];
      if (mismatches[si][ci].size() == 0) continue;
      const Eigen::VectorXd w = (2.0 * wts[b] / double(cnt[b])) * mismatches[si][ci];
      const bool with_bias = c.order == wave::DerivOrder{0, 0};
      if (seg.kind == prob::SegmentKind::Interface) {
        coeff_cot[0][c.field] += sb.own.apply_transpose(c.order, w);
        coeff_cot[1][c.field] -= sb.other->apply_transpose(c.order, w);
        if (with_bias) {
          bias_cot[0][c.field] += w.sum();
          bias_cot[1][c.field] -= w.sum();
        }
      } else {
        coeff_cot[seg.subdomain][c.field] += sb.own.apply_transpose(c.order, w);
        if (with_bias) bias_cot[seg.subdomain][c.field] += w.sum();
      }
    }
  }

  grad_out->setZero(total_params);
  for (int sub = 0; sub < n_sub; ++sub) {
    grad_out->segment(offsets[sub], layouts[sub].total) = model::model_vjp(
        archs[sub], params.segment(offsets[sub], layouts[sub].total), fwd[sub],
        coeff_cot[sub]);
    for (int f = 0; f < n_fields; ++f) {
      (*grad_out)[offsets[sub] + layouts[sub].heads[f].solution_bias_offset] =
          bias_cot[sub][f];
    }
  }
  return lb;
}

LossBreakdown Trainer::Impl::loss_per_point(Eigen::VectorXd* grad_out) {
  const prob::Problem& pr = *problem;
  const int n_sub = pr.subdomain_count();
  const int n_fields = pr.field_count();

  std::vector<std::vector<double>> biases(n_sub, std::vector<double>(n_fields));
  for (int sub = 0; sub < n_sub; ++sub) {
    for (int f = 0; f < n_fields; ++f) biases[sub][f] = bias_of(sub, f);
  }

  double sq[4] = {0, 0, 0, 0};
  Eigen::Index cnt[4] = {0, 0, 0, 0};
  const double wts[4] = {config.weights.pde, config.weights.ic, config.weights.bc,
                         config.weights.interface_};

  if (grad_out != nullptr) grad_out->setZero(total_params);
  std::vector<std::vector<double>> bias_cot(n_sub, std::vector<double>(n_fields, 0.0));

  // collocation residuals with a coefficient vector per point; the residual
  // derivative convention keeps spatial derivatives on the basis only
  struct SubEval {
    std::vector<model::Forward> fwds;
    prob::Problem::DerivArrays u;
    std::vector<Eigen::VectorXd> residuals;
  };
  std::vector<SubEval> sub_evals(n_sub);
  for (int sub = 0; sub < n_sub; ++sub) {
    const Points& pts = points.collocation[sub];
    const Eigen::Index n = pts.rows();
    SubEval& se = sub_evals[sub];
    se.fwds.resize(n);
    se.u.resize(n_fields);
    for (int f = 0; f < n_fields; ++f) {
      se.u[f].assign(pr.residual_orders(f).size(), Eigen::VectorXd::Zero(n));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      se.fwds[i] = forward_at(sub, pts(i, 0), pts(i, 1));
      for (int f = 0; f < n_fields; ++f) {
        const auto& orders = pr.residual_orders(f);
        for (std::size_t k = 0; k < orders.size(); ++k) {
          double v = colloc_basis[sub].row_apply(orders[k], i, se.fwds[i].coefficients[f]);
          if (orders[k] == wave::DerivOrder{0, 0}) v += biases[sub][f];
          se.u[f][k][i] = v;
        }
      }
    }
    pr.residual(sub, se.u, colloc_forcing[sub], se.residuals);
    for (int f = 0; f < n_fields; ++f) {
      sq[0] += se.residuals[f].squaredNorm();
      cnt[0] += se.residuals[f].size();
    }
  }

  // segment mismatches, with per-point pipelines at the segment points
  struct SegEval {
    std::vector<std::vector<model::Forward>> fwds;  // [model slot][point]
    std::vector<Eigen::VectorXd> mismatches;        // per constraint
  };
  std::vector<SegEval> seg_evals(seg_basis.size());
  for (std::size_t si = 0; si < seg_basis.size(); ++si) {
    const prob::Segment& seg = pr.segments()[si];
    const SegmentBasis& sb = seg_basis[si];
    const Points& pts = points.segments[si];
    const Eigen::Index n = pts.rows();
    SegEval& se = seg_evals[si];
    const bool iface = seg.kind == prob::SegmentKind::Interface;
    se.fwds.resize(iface ? 2 : 1);
    se.fwds[0].resize(n);
    if (iface) se.fwds[1].resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      se.fwds[0][i] = forward_at(iface ? 0 : seg.subdomain, pts(i, 0), pts(i, 1));
      if (iface) se.fwds[1][i] = forward_at(1, pts(i, 0), pts(i, 1));
    }
    const int b = bucket_of(seg.kind);
    for (std::size_t ci = 0; ci < seg.constraints.size(); ++ci) {
      const prob::PointConstraint& c = seg.constraints[ci];
      const bool with_bias = c.order == wave::DerivOrder{0, 0};
      Eigen::VectorXd mis(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (iface) {
          double ua = sb.own.row_apply(c.order, i, se.fwds[0][i].coefficients[c.field]);
          double ub = sb.other->row_apply(c.order, i, se.fwds[1][i].coefficients[c.field]);
          if (with_bias) {
            ua += biases[0][c.field];
            ub += biases[1][c.field];
          }
          mis[i] = ua - ub;
        } else {
          double u = sb.own.row_apply(c.order, i, se.fwds[0][i].coefficients[c.field]);
          if (with_bias) u += biases[seg.subdomain][c.field];
          mis[i] = u - sb.targets[ci][i];
        }
      }
      sq[b] += mis.squaredNorm();
      cnt[b] += mis.size();
      se.mismatches.push_back(std::move(mis));
    }
  }

  LossBreakdown lb;
  double comp[4];
  for (int b = 0; b < 4; ++b) comp[b] = cnt[b] > 0 ? wts[b] * sq[b] / double(cnt[b]) : 0.0;
  lb.pde = comp[0];
  lb.ic = comp[1];
  lb.bc = comp[2];
  lb.interface_ = comp[3];
  lb.total = lb.pde + lb.ic + lb.bc + lb.interface_;
  if (grad_out == nullptr) return lb;

  // reverse pass: residual pullback to the derivative arrays, then per-point
  // basis rows into coefficient cotangents and one model_vjp per point
  for (int sub = 0; sub < n_sub; ++sub) {
    if (cnt[0] == 0) break;
    const SubEval& se = sub_evals[sub];
    const Eigen::Index n = points.collocation[sub].rows();
    prob::Problem::DerivArrays u_cot(n_fields);
    std::vector<Eigen::VectorXd> res_cot(n_fields);
    for (int f = 0; f < n_fields; ++f) {
      u_cot[f].assign(pr.residual_orders(f).size(), Eigen::VectorXd::Zero(n));
      res_cot[f] = (2.0 * wts[0] / double(cnt[0])) * se.residuals[f];
    }
    pr.residual_pullback(sub, se.u, res_cot, u_cot);
    std::vector<Eigen::VectorXd> cot_c(n_fields);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int f = 0; f < n_fields; ++f) {
        cot_c[f].setZero(archs[sub].n_coefficients);
        const auto& orders = pr.residual_orders(f);
        for (std::size_t k = 0; k < orders.size(); ++k) {
          colloc_basis[sub].row_accumulate(orders[k], i, u_cot[f][k][i], cot_c[f]);
          if (orders[k] == wave::DerivOrder{0, 0}) bias_cot[sub][f] += u_cot[f][k][i];
        }
      }
      grad_out->segment(offsets[sub], layouts[sub].total) +=
          model::model_vjp(archs[sub], params.segment(offsets[sub], layouts[sub].total),
                           se.fwds[i], cot_c);
    }
  }

  for (std::size_t si = 0; si < seg_basis.size(); ++si) {
    const prob::Segment& seg = pr.segments()[si];
    const SegmentBasis& sb = seg_basis[si];
    const SegEval& se = seg_evals[si];
    const int b = bucket_of(seg.kind);
    if (cnt[b] == 0) continue;
    const bool iface = seg.kind == prob::SegmentKind::Interface;
    const Eigen::Index n = points.segments[si].rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      // one cotangent bundle per model slot touched by this segment's point
      for (int slot = 0; slot < (iface ? 2 : 1); ++slot) {
        const int sub = iface ? slot : seg.subdomain;
        const double sign = (iface && slot == 1) ? -1.0 : 1.0;
        std::vector<Eigen::VectorXd> cot_c(
            n_fields, Eigen::VectorXd::Zero(archs[sub].n_coefficients));
        bool any = false;
        for (std::size_t ci = 0; ci < seg.constraints.size(); ++ci) {
          const prob::PointConstraint& c = seg.constraints[ci];
          if (se.mismatches[ci].size() == 0) continue;
          const double w = sign * 2.0 * wts[b] / double(cnt[b]) * se.mismatches[ci][i];
          const wave::BasisMatrices& basis = (iface && slot == 1) ? *sb.other : sb.own;
          basis.row_accumulate(c.order, i, w, cot_c[c.field]);
          if (c.order == wave::DerivOrder{0, 0}) bias_cot[sub][c.field] += w;
          any = true;
        }
        if (any) {
          grad_out->segment(offsets[sub], layouts[sub].total) += model::model_vjp(
              archs[sub], params.segment(offsets[sub], layouts[sub].total),
              se.fwds[slot][i], cot_c);
        }
      }
    }
  }

  for (int sub = 0; sub < n_sub; ++sub) {
    for (int f = 0; f < n_fields; ++f) {
      (*grad_out)[offsets[sub] + layouts[sub].heads[f].solution_bias_offset] =
          bias_cot[sub][f];
    }
  }
  return lb;
}

Eigen::VectorXd Trainer::Impl::field_values(int sub, int field,
                                            const wave::BasisMatrices& basis) {
  const double bias = bias_of(sub, field);
  if (config.mode == CoefficientMode::Global) {
    const model::Forward fwd = model::predict_coefficients(
        archs[sub], params.segment(offsets[sub], layouts[sub].total), probes[sub]);
    return model::reconstruct(fwd.coefficients[field], basis, {0, 0}, bias);
  }
  const Eigen::Index n = basis.n_points();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const model::Forward fwd =
        forward_at(sub, basis.points()(i, 0), basis.points()(i, 1));
    out[i] = basis.row_apply({0, 0}, i, fwd.coefficients[field]) + bias;
  }
  return out;
}

ValidationMetrics Trainer::validate() {
  Impl& im = *impl_;
  const prob::Problem& pr = *im.problem;
  const int n_sub = pr.subdomain_count();
  const int n_fields = pr.field_count();

  ValidationMetrics vm;
  Eigen::Index total = 0;
  for (int sub = 0; sub < n_sub; ++sub) total += im.points.validation[sub].rows();
  Eigen::VectorXd all_pred(total * n_fields), all_exact(total * n_fields);
  Eigen::Index cursor = 0;
  for (int f = 0; f < n_fields; ++f) {
    Eigen::VectorXd pred(total), exact(total);
    Eigen::Index at = 0;
    for (int sub = 0; sub < n_sub; ++sub) {
      const Eigen::Index n = im.points.validation[sub].rows();
      pred.segment(at, n) = im.field_values(sub, f, im.val_basis[sub]);
      exact.segment(at, n) = im.val_exact[sub][f];
      at += n;
    }
    vm.field_rel_l2.push_back(metrics::relative_l2(pred, exact));
    vm.field_rel_linf.push_back(metrics::relative_linf(pred, exact));
    all_pred.segment(cursor, total) = pred;
    all_exact.segment(cursor, total) = exact;
    cursor += total;
  }
  vm.rel_l2 = metrics::relative_l2(all_pred, all_exact);
  vm.rel_linf = metrics::relative_linf(all_pred, all_exact);
  return vm;
}

Eigen::VectorXd Trainer::predict_field(int sub, int field, const Points& points) {
  Impl& im = *impl_;
  wave::BasisMatrices basis(im.families[sub], points,
                            std::vector<wave::DerivOrder>{{0, 0}},
                            im.config.basis_truncation);
  return im.field_values(sub, field, basis);
}

SeedResult Trainer::run() {
  Impl& im = *impl_;
  SeedResult res;
  res.seed = im.seed;
  res.trainable_parameters = im.total_params;
  const auto t0 = std::chrono::steady_clock::now();

  Eigen::VectorXd grad(im.total_params);
  const long long epochs = im.config.epochs;
  for (long long epoch = 0; epoch < epochs; ++epoch) {
    const double lr = lr_at_epoch(im.config.lr, epoch);
    LossBreakdown lb;
    try {
      lb = loss(&grad);
      if (!std::isfinite(lb.total)) {
        throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch));
      }
      res.final_loss = lb;

      const bool history_hit =
          im.config.history_stride > 0 && epoch % im.config.history_stride == 0;
      const bool val_hit = im.config.validation_stride > 0 &&
                           (epoch % im.config.validation_stride == 0 ||
                            epoch == epochs - 1);
      if (history_hit || val_hit || epoch == epochs - 1) {
        HistoryRow row;
        row.epoch = epoch;
        row.lr = lr;
        row.loss = lb;
        if (val_hit) {
          row.has_validation = true;
          row.validation = validate();
        }
        res.history.push_back(std::move(row));
      }

      if (im.config.hetero_update == HeteroUpdate::Alternating && im.n_models() == 2) {
        const int frozen = (epoch % 2 == 0) ? 1 : 0;
        grad.segment(im.offsets[frozen], im.layouts[frozen].total).setZero();
      }
      adam_step(im.params, grad, im.adam, lr);
      res.epochs_run = epoch + 1;
    } catch (const std::exception& e) {
      res.failed = true;
      res.failure = e.what();
      break;
    }
  }

  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!res.failed) {
    res.final_metrics = validate();
  }
  res.params = im.params;
  return res;
}

}  // namespace qwpde::train
