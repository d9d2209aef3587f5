#include "qwpde/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qwpde/rng.hpp"

namespace qwpde::prob {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void unsupported_order(const std::string& who, DerivOrder o) {
  throw std::invalid_argument(who + " has no analytic derivative of order (" +
                              std::to_string(o.dx) + "," + std::to_string(o.dy) + ")");
}

Segment dirichlet_segment(int sub, int fixed_dim, double fixed_value, SegmentKind kind,
                          std::vector<PointConstraint> constraints) {
  Segment s;
  s.kind = kind;
  s.subdomain = sub;
  s.fixed_dim = fixed_dim;
  s.fixed_value = fixed_value;
  s.constraints = std::move(constraints);
  return s;
}

// ---------------------------------------------------------------------------
// Example 1: high-gradient heat conduction
// ---------------------------------------------------------------------------

class HeatConduction final : public Problem {
 public:
  explicit HeatConduction(double epsilon) : eps_(epsilon) {
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("heat conduction needs epsilon > 0");
    }
    name_ = "heat_conduction";
    field_names_ = {"u"};
    domains_ = {{{-1.0, 1.0}, {0.0, 1.0}}};
    residual_orders_ = {{{0, 1}, {2, 0}}};

    const double eps = eps_;
    segments_.push_back(dirichlet_segment(
        0, 1, 0.0, SegmentKind::Initial,
        {{0, {0, 0},
          [eps](double x, double) { return (1.0 - x * x) * std::exp(1.0 / (1.0 + eps)); },
          "u(x,0)"}}));
    segments_.push_back(dirichlet_segment(
        0, 0, -1.0, SegmentKind::Boundary,
        {{0, {0, 0}, [](double, double) { return 0.0; }, "u(-1,t)"}}));
    segments_.push_back(dirichlet_segment(
        0, 0, 1.0, SegmentKind::Boundary,
        {{0, {0, 0}, [](double, double) { return 0.0; }, "u(1,t)"}}));
  }

  double g(double t) const {
    const double s = 2.0 * t - 1.0;
    return std::exp(1.0 / (s * s + eps_));
  }
  double g_prime(double t) const {
    const double s = 2.0 * t - 1.0;
    const double d = s * s + eps_;
    return -4.0 * s * g(t) / (d * d);
  }

  double exact(int, int, double x, double t) const override {
    return (1.0 - x * x) * g(t);
  }

  double exact_derivative(int, int, double x, double t, DerivOrder o) const override {
    if (o == DerivOrder{0, 0}) return (1.0 - x * x) * g(t);
    if (o == DerivOrder{1, 0}) return -2.0 * x * g(t);
    if (o == DerivOrder{2, 0}) return -2.0 * g(t);
    if (o == DerivOrder{0, 1}) return (1.0 - x * x) * g_prime(t);
    unsupported_order(name_, o);
  }

  double forcing(int, int, double x, double t) const override {
    return (1.0 - x * x) * g_prime(t) + 2.0 * eps_ * g(t);
  }

  void residual(int, const DerivArrays& u, const std::vector<Eigen::VectorXd>& f,
                std::vector<Eigen::VectorXd>& out) const override {
    out.resize(1);
    out[0] = u[0][0] - eps_ * u[0][1] - f[0];
  }

  void residual_pullback(int, const DerivArrays&, const std::vector<Eigen::VectorXd>& w,
                         DerivArrays& u_cot) const override {
    u_cot[0][0] += w[0];
    u_cot[0][1] -= eps_ * w[0];
  }

 private:
  double eps_;
};

// ---------------------------------------------------------------------------
// Example 2: Helmholtz equation in the high-frequency regime
// ---------------------------------------------------------------------------

class Helmholtz final : public Problem {
 public:
  Helmholtz(double kappa, double b1, double b2) : kappa_(kappa), b1_(b1), b2_(b2) {
    name_ = "helmholtz";
    field_names_ = {"u"};
    domains_ = {{{-1.0, 1.0}, {-1.0, 1.0}}};
    residual_orders_ = {{{2, 0}, {0, 2}, {0, 0}}};

    auto trace = [this](double x, double y) { return exact(0, 0, x, y); };
    for (const double x0 : {-1.0, 1.0}) {
      segments_.push_back(dirichlet_segment(0, 0, x0, SegmentKind::Boundary,
                                            {{0, {0, 0}, trace, "u|boundary"}}));
    }
    for (const double y0 : {-1.0, 1.0}) {
      segments_.push_back(dirichlet_segment(0, 1, y0, SegmentKind::Boundary,
                                            {{0, {0, 0}, trace, "u|boundary"}}));
    }
  }

  double exact(int, int, double x, double y) const override {
    return std::sin(kPi * b1_ * x) * std::sin(kPi * b2_ * y);
  }

  double exact_derivative(int sub, int field, double x, double y,
                          DerivOrder o) const override {
    if (o == DerivOrder{0, 0}) return exact(sub, field, x, y);
    if (o == DerivOrder{2, 0}) return -kPi * kPi * b1_ * b1_ * exact(sub, field, x, y);
    if (o == DerivOrder{0, 2}) return -kPi * kPi * b2_ * b2_ * exact(sub, field, x, y);
    unsupported_order(name_, o);
  }

  double forcing(int sub, int field, double x, double y) const override {
    return (kappa_ * kappa_ - kPi * kPi * (b1_ * b1_ + b2_ * b2_)) *
           exact(sub, field, x, y);
  }

  void residual(int, const DerivArrays& u, const std::vector<Eigen::VectorXd>& f,
                std::vector<Eigen::VectorXd>& out) const override {
    out.resize(1);
    out[0] = u[0][0] + u[0][1] + kappa_ * kappa_ * u[0][2] - f[0];
  }

  void residual_pullback(int, const DerivArrays&, const std::vector<Eigen::VectorXd>& w,
                         DerivArrays& u_cot) const override {
    u_cot[0][0] += w[0];
    u_cot[0][1] += w[0];
    u_cot[0][2] += kappa_ * kappa_ * w[0];
  }

 private:
  double kappa_, b1_, b2_;
};

// ---------------------------------------------------------------------------
// Example 3: Klein-Gordon equation with a cubic nonlinearity
// ---------------------------------------------------------------------------

class KleinGordon final : public Problem {
 public:
  KleinGordon(double a, double alpha, double beta, double gamma, int power)
      : a_(a), alpha_(alpha), beta_(beta), gamma_(gamma), power_(power) {
    if (a == 0.0) throw std::invalid_argument("klein-gordon needs a != 0");
    if (power < 1) throw std::invalid_argument("klein-gordon power must be >= 1");
    name_ = "klein_gordon";
    field_names_ = {"u"};
    domains_ = {{{0.0, 1.0}, {0.0, 1.0}}};
    residual_orders_ = {{{0, 2}, {2, 0}, {0, 0}}};

    const double a_cap = a_;
    segments_.push_back(dirichlet_segment(
        0, 1, 0.0, SegmentKind::Initial,
        {{0, {0, 0}, [](double x, double) { return x; }, "u(x,0)"},
         {0, {0, 1}, [](double, double) { return 0.0; }, "u_t(x,0)"}}));
    segments_.push_back(dirichlet_segment(
        0, 0, 0.0, SegmentKind::Boundary,
        {{0, {0, 0}, [](double, double) { return 0.0; }, "u(0,t)"}}));
    segments_.push_back(dirichlet_segment(
        0, 0, 1.0, SegmentKind::Boundary,
        {{0, {0, 0},
          [a_cap](double, double t) { return std::cos(a_cap * kPi * t) + t * t * t; },
          "u(1,t)"}}));
  }

  double exact(int, int, double x, double t) const override {
    return x * std::cos(a_ * kPi * t) + std::pow(x * t, 3);
  }

  double exact_derivative(int, int, double x, double t, DerivOrder o) const override {
    const double w = a_ * kPi;
    if (o == DerivOrder{0, 0}) return x * std::cos(w * t) + std::pow(x * t, 3);
    if (o == DerivOrder{2, 0}) return 6.0 * x * t * t * t;
    if (o == DerivOrder{0, 1}) return -w * x * std::sin(w * t) + 3.0 * x * x * x * t * t;
    if (o == DerivOrder{0, 2}) return -w * w * x * std::cos(w * t) + 6.0 * x * x * x * t;
    unsupported_order(name_, o);
  }

  double forcing(int sub, int field, double x, double t) const override {
    const double u = exact(sub, field, x, t);
    return exact_derivative(sub, field, x, t, {0, 2}) +
           alpha_ * exact_derivative(sub, field, x, t, {2, 0}) + beta_ * u +
           gamma_ * std::pow(u, power_);
  }

  void residual(int, const DerivArrays& u, const std::vector<Eigen::VectorXd>& f,
                std::vector<Eigen::VectorXd>& out) const override {
    out.resize(1);
    out[0] = u[0][0] + alpha_ * u[0][1] + beta_ * u[0][2] +
             gamma_ * u[0][2].array().pow(power_).matrix() - f[0];
  }

  void residual_pullback(int, const DerivArrays& u, const std::vector<Eigen::VectorXd>& w,
                         DerivArrays& u_cot) const override {
    u_cot[0][0] += w[0];
    u_cot[0][1] += alpha_ * w[0];
    // d(gamma u^p)/du = gamma p u^{p-1}
    u_cot[0][2] +=
        (w[0].array() *
         (beta_ + gamma_ * power_ * u[0][2].array().pow(power_ - 1)))
            .matrix();
  }

 private:
  double a_, alpha_, beta_, gamma_;
  int power_;
};

// ---------------------------------------------------------------------------
// Example 4: 1D transverse electromagnetic Maxwell system
// ---------------------------------------------------------------------------

class Maxwell final : public Problem {
 public:
  explicit Maxwell(const MaxwellMedium& medium) : medium_(medium) {
    name_ = medium.heterogeneous ? "maxwell_heterogeneous" : "maxwell_homogeneous";
    field_names_ = {"E_y", "H_z"};
    // orders per field: own time derivative, spatial derivative for the
    // partner residual
    residual_orders_ = {{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}};

    if (!medium.heterogeneous) {
      if (!(medium.mode_n != 0.0) || !(medium.cavity_length > 0.0)) {
        throw std::invalid_argument("maxwell cavity needs mode n != 0 and length > 0");
      }
      domains_ = {{{0.0, 1.0}, {0.0, 1.0}}};
      inv_eps_ = {1.0};
      inv_mu_ = {1.0};
      const double n = medium.mode_n;
      segments_.push_back(dirichlet_segment(
          0, 1, 0.0, SegmentKind::Initial,
          {{0, {0, 0}, [n](double x, double) { return std::sin(n * kPi * x); }, "E(x,0)"},
           {1, {0, 0}, [](double, double) { return 0.0; }, "H(x,0)"}}));
      // perfectly electric conductor: tangential E vanishes, normal
      // derivative of H vanishes
      for (const double x0 : {0.0, 1.0}) {
        segments_.push_back(dirichlet_segment(
            0, 0, x0, SegmentKind::Boundary,
            {{0, {0, 0}, [](double, double) { return 0.0; }, "E|boundary"},
             {1, {1, 0}, [](double, double) { return 0.0; }, "H_x|boundary"}}));
      }
    } else {
      domains_ = {{{0.0, 0.5}, {0.0, 1.0}}, {{0.5, 1.0}, {0.0, 1.0}}};
      inv_eps_ = {1.0 / 1.0, 1.0 / 0.5};
      inv_mu_ = {1.0 / 1.0, 1.0 / 4.5};
      for (int sub = 0; sub < 2; ++sub) {
        auto e_trace = [this, sub](double x, double t) { return exact(sub, 0, x, t); };
        auto h_trace = [this, sub](double x, double t) { return exact(sub, 1, x, t); };
        segments_.push_back(
            dirichlet_segment(sub, 1, 0.0, SegmentKind::Initial,
                              {{0, {0, 0}, e_trace, "E(x,0)"},
                               {1, {0, 0}, h_trace, "H(x,0)"}}));
        segments_.push_back(
            dirichlet_segment(sub, 0, sub == 0 ? 0.0 : 1.0, SegmentKind::Boundary,
                              {{0, {0, 0}, e_trace, "E|outer"},
                               {1, {0, 0}, h_trace, "H|outer"}}));
      }
      Segment iface;
      iface.kind = SegmentKind::Interface;
      iface.subdomain = 0;
      iface.fixed_dim = 0;
      iface.fixed_value = 0.5;
      iface.constraints = {{0, {0, 0}, nullptr, "E continuity"},
                           {1, {0, 0}, nullptr, "H continuity"}};
      segments_.push_back(iface);
    }
  }

  double exact(int sub, int field, double x, double t) const override {
    if (!medium_.heterogeneous) {
      const double n = medium_.mode_n;
      const double w = n * kPi / medium_.cavity_length;
      return field == 0 ? std::sin(n * kPi * x) * std::cos(w * t)
                        : -std::cos(n * kPi * x) * std::sin(w * t);
    }
    if (sub == 0) {
      const double g = 2.0 * t - 2.0 * x + 1.0;
      const double h = 2.0 * t + 2.0 * x - 1.0;
      return field == 0 ? std::cos(g) + 0.5 * std::cos(h)
                        : std::cos(g) - 0.5 * std::cos(h);
    }
    const double m = 2.0 * t - 3.0 * x + 1.5;
    return field == 0 ? 1.5 * std::cos(m) : 0.5 * std::cos(m);
  }

  double exact_derivative(int sub, int field, double x, double t,
                          DerivOrder o) const override {
    if (o == DerivOrder{0, 0}) return exact(sub, field, x, t);
    if (!medium_.heterogeneous) {
      const double n = medium_.mode_n;
      const double k = n * kPi;
      const double w = k / medium_.cavity_length;
      if (field == 0) {
        if (o == DerivOrder{0, 1}) return -w * std::sin(k * x) * std::sin(w * t);
        if (o == DerivOrder{1, 0}) return k * std::cos(k * x) * std::cos(w * t);
      } else {
        if (o == DerivOrder{0, 1}) return -w * std::cos(k * x) * std::cos(w * t);
        if (o == DerivOrder{1, 0}) return k * std::sin(k * x) * std::sin(w * t);
      }
      unsupported_order(name_, o);
    }
    if (sub == 0) {
      const double g = 2.0 * t - 2.0 * x + 1.0;
      const double h = 2.0 * t + 2.0 * x - 1.0;
      const double sg = std::sin(g), sh = std::sin(h);
      if (field == 0) {
        if (o == DerivOrder{0, 1}) return -2.0 * sg - sh;
        if (o == DerivOrder{1, 0}) return 2.0 * sg - sh;
      } else {
        if (o == DerivOrder{0, 1}) return -2.0 * sg + sh;
        if (o == DerivOrder{1, 0}) return 2.0 * sg + sh;
      }
      unsupported_order(name_, o);
    }
    const double m = 2.0 * t - 3.0 * x + 1.5;
    const double sm = std::sin(m);
    if (field == 0) {
      if (o == DerivOrder{0, 1}) return -3.0 * sm;
      if (o == DerivOrder{1, 0}) return 4.5 * sm;
    } else {
      if (o == DerivOrder{0, 1}) return -sm;
      if (o == DerivOrder{1, 0}) return 1.5 * sm;
    }
    unsupported_order(name_, o);
  }

  double forcing(int, int, double, double) const override { return 0.0; }

  void residual(int sub, const DerivArrays& u, const std::vector<Eigen::VectorXd>& f,
                std::vector<Eigen::VectorXd>& out) const override {
    out.resize(2);
    out[0] = u[0][0] + inv_eps_[sub] * u[1][1] - f[0];  // E_t + (1/eps) H_x
    out[1] = u[1][0] + inv_mu_[sub] * u[0][1] - f[1];   // H_t + (1/mu) E_x
  }

  void residual_pullback(int sub, const DerivArrays&,
                         const std::vector<Eigen::VectorXd>& w,
                         DerivArrays& u_cot) const override {
    u_cot[0][0] += w[0];
    u_cot[1][1] += inv_eps_[sub] * w[0];
    u_cot[1][0] += w[1];
    u_cot[0][1] += inv_mu_[sub] * w[1];
  }

 private:
  MaxwellMedium medium_;
  std::vector<double> inv_eps_, inv_mu_;
};

}  // namespace

bool Problem::has_interface() const {
  for (const Segment& s : segments_) {
    if (s.kind == SegmentKind::Interface) return true;
  }
  return false;
}

std::unique_ptr<Problem> heat_conduction_problem(double epsilon) {
  return std::make_unique<HeatConduction>(epsilon);
}

std::unique_ptr<Problem> helmholtz_problem(double kappa, double b1, double b2) {
  return std::make_unique<Helmholtz>(kappa, b1, b2);
}

std::unique_ptr<Problem> klein_gordon_problem(double a, double alpha, double beta,
                                              double gamma, int power) {
  return std::make_unique<KleinGordon>(a, alpha, beta, gamma, power);
}

std::unique_ptr<Problem> maxwell_problem(const MaxwellMedium& medium) {
  return std::make_unique<Maxwell>(medium);
}

// ---------------------------------------------------------------------------
// Residual assembly over coefficient vectors
// ---------------------------------------------------------------------------

ResidualEvaluation evaluate_residual(const Problem& problem, int sub,
                                     const wave::BasisMatrices& basis,
                                     const std::vector<Eigen::VectorXd>& coeffs,
                                     const std::vector<double>& biases,
                                     const std::vector<Eigen::VectorXd>* forcing_cache) {
  const int nf = problem.field_count();
  if (static_cast<int>(coeffs.size()) != nf || static_cast<int>(biases.size()) != nf) {
    throw std::invalid_argument("one coefficient vector and bias per field required");
  }
  ResidualEvaluation eval;
  eval.derivatives.resize(nf);
  eval.forcing.resize(nf);
  const Eigen::Index n = basis.n_points();
  for (int f = 0; f < nf; ++f) {
    const auto& orders = problem.residual_orders(f);
    eval.derivatives[f].reserve(orders.size());
    for (const DerivOrder& o : orders) {
      if (!basis.has_order(o)) {
        throw std::invalid_argument("basis is missing derivative order (" +
                                    std::to_string(o.dx) + "," + std::to_string(o.dy) +
                                    ") required by " + problem.name());
      }
      Eigen::VectorXd u = basis.apply(o, coeffs[f]);
      if (o == DerivOrder{0, 0}) u.array() += biases[f];
      eval.derivatives[f].push_back(std::move(u));
    }
    if (forcing_cache != nullptr) {
      eval.forcing[f] = (*forcing_cache)[f];
    } else {
      Eigen::VectorXd fvec(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        fvec[i] = problem.forcing(sub, f, basis.points()(i, 0), basis.points()(i, 1));
      }
      eval.forcing[f] = std::move(fvec);
    }
  }
  problem.residual(sub, eval.derivatives, eval.forcing, eval.residuals);
  return eval;
}

CoefficientPullback residual_vjp(const Problem& problem, int sub,
                                 const wave::BasisMatrices& basis,
                                 const ResidualEvaluation& eval,
                                 const std::vector<Eigen::VectorXd>& residual_cot) {
  const int nf = problem.field_count();
  Problem::DerivArrays u_cot(nf);
  for (int f = 0; f < nf; ++f) {
    u_cot[f].assign(problem.residual_orders(f).size(),
                    Eigen::VectorXd::Zero(basis.n_points()));
  }
  problem.residual_pullback(sub, eval.derivatives, residual_cot, u_cot);

  CoefficientPullback pb;
  pb.coefficients.assign(nf, Eigen::VectorXd::Zero(basis.n_members()));
  pb.biases.assign(nf, 0.0);
  for (int f = 0; f < nf; ++f) {
    const auto& orders = problem.residual_orders(f);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      pb.coefficients[f] += basis.apply_transpose(orders[k], u_cot[f][k]);
      if (orders[k] == DerivOrder{0, 0}) pb.biases[f] += u_cot[f][k].sum();
    }
  }
  return pb;
}

double manufactured_residual_max(const Problem& problem, int n_points,
                                 std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  double worst = 0.0;
  for (int sub = 0; sub < problem.subdomain_count(); ++sub) {
    const Domain2& d = problem.domain(sub);
    const int nf = problem.field_count();
    Problem::DerivArrays u(nf);
    std::vector<Eigen::VectorXd> f(nf);
    for (int field = 0; field < nf; ++field) {
      u[field].assign(problem.residual_orders(field).size(),
                      Eigen::VectorXd::Zero(n_points));
      f[field].resize(n_points);
    }
    for (int i = 0; i < n_points; ++i) {
      const double x = rng::uniform(engine, d.x.lo, d.x.hi);
      const double t = rng::uniform(engine, d.t.lo, d.t.hi);
      for (int field = 0; field < nf; ++field) {
        const auto& orders = problem.residual_orders(field);
        for (std::size_t k = 0; k < orders.size(); ++k) {
          u[field][k][i] = problem.exact_derivative(sub, field, x, t, orders[k]);
        }
        f[field][i] = problem.forcing(sub, field, x, t);
      }
    }
    std::vector<Eigen::VectorXd> r;
    problem.residual(sub, u, f, r);
    for (const Eigen::VectorXd& rf : r) {
      worst = std::max(worst, rf.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double interface_mismatch_max(const Problem& problem, int n_points, std::uint64_t seed) {
  if (!problem.has_interface()) return 0.0;
  std::mt19937_64 engine(seed);
  const Domain2& d = problem.domain(0);
  double worst = 0.0;
  for (const Segment& s : problem.segments()) {
    if (s.kind != SegmentKind::Interface) continue;
    for (int i = 0; i < n_points; ++i) {
      const double t = rng::uniform(engine, d.t.lo, d.t.hi);
      for (const PointConstraint& c : s.constraints) {
        const double left = problem.exact(0, c.field, s.fixed_value, t);
        const double right = problem.exact(1, c.field, s.fixed_value, t);
        worst = std::max(worst, std::abs(left - right));
      }
    }
  }
  return worst;
}

}  // namespace qwpde::prob
