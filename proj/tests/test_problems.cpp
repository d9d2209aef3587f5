#include "qwpde/problems.hpp"

#include <numbers>
#include <random>

#include "doctest.h"
#include "qwpde/rng.hpp"

using namespace qwpde;
using prob::DerivOrder;

namespace {
constexpr double kPi = std::numbers::pi;

// finite-difference pullback oracle for 0.5 ||r||^2 w.r.t. the coefficients
double half_residual_sq(const prob::Problem& p, int sub, const wave::BasisMatrices& basis,
                        const std::vector<Eigen::VectorXd>& coeffs,
                        const std::vector<double>& biases) {
  const prob::ResidualEvaluation ev = prob::evaluate_residual(p, sub, basis, coeffs, biases);
  double s = 0;
  for (const auto& r : ev.residuals) s += 0.5 * r.squaredNorm();
  return s;
}

}  // namespace

TEST_CASE("heat forcing closed form") {
  const auto heat = prob::heat_conduction_problem(0.5);
  // g'(0.5) vanishes, so f(0, 0.5) = 2 eps g(0.5) = e^2
  CHECK(heat->forcing(0, 0, 0.0, 0.5) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  // exact vanishes on the spatial boundary and matches the stated trace at t=0
  for (double t : {0.0, 0.31, 1.0}) {
    CHECK(heat->exact(0, 0, -1.0, t) == 0.0);
    CHECK(heat->exact(0, 0, 1.0, t) == 0.0);
  }
  CHECK(heat->exact(0, 0, 0.3, 0.0) ==
        doctest::Approx((1 - 0.09) * std::exp(1.0 / 1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(prob::heat_conduction_problem(0.0), std::invalid_argument);
  CHECK_THROWS_AS(prob::heat_conduction_problem(-1.0), std::invalid_argument);
}

TEST_CASE("helmholtz forcing closed form") {
  const auto helm = prob::helmholtz_problem(1.0, 1.0, 8.0);
  CHECK(helm->forcing(0, 0, 0.5, 1.0 / 16) ==
        doctest::Approx(1.0 - 65.0 * kPi * kPi).epsilon(1e-13));
  // integer b1 zeroes the x = +-1 edges
  CHECK(std::abs(helm->exact(0, 0, 1.0, 0.37)) < 1e-15);
  CHECK(std::abs(helm->exact(0, 0, -1.0, 0.91)) < 1e-15);
}

TEST_CASE("klein-gordon exact traces and forcing") {
  const auto kg = prob::klein_gordon_problem(5.0);
  CHECK(kg->exact(0, 0, 1.0, 0.0) == 1.0);
  for (double x : {0.1, 0.6, 1.0}) {
    CHECK(kg->exact_derivative(0, 0, x, 0.0, {0, 1}) == 0.0);
    CHECK(kg->exact(0, 0, x, 0.0) == doctest::Approx(x));
  }
  CHECK(kg->forcing(0, 0, 1.0, 0.0) ==
        doctest::Approx(1.0 - 25.0 * kPi * kPi).epsilon(1e-13));
  CHECK_THROWS_AS(prob::klein_gordon_problem(0.0), std::invalid_argument);
}

TEST_CASE("klein-gordon residual is nonlinear in the coefficients") {
  const auto kg = prob::klein_gordon_problem(2.0);
  const wave::WaveletFamily2D family = wave::build_family_2d({0, 1}, {0}, {0, 1}, {0});
  std::mt19937_64 engine(211);
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(16, 2);
  for (int i = 0; i < 16; ++i) {
    pts(i, 0) = rng::uniform(engine, 0, 1);
    pts(i, 1) = rng::uniform(engine, 0, 1);
  }
  const wave::BasisMatrices basis(family, pts, {{0, 2}, {2, 0}, {0, 0}});
  Eigen::VectorXd c(family.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng::uniform(engine, -1, 1);

  const auto r1 = prob::evaluate_residual(*kg, 0, basis, {c}, {0.0});
  const auto r2 = prob::evaluate_residual(*kg, 0, basis, {2 * c}, {0.0});
  // cubic term: r(2c) - (-f) != 2 (r(c) - (-f))
  const Eigen::VectorXd h1 = r1.residuals[0] + r1.forcing[0];
  const Eigen::VectorXd h2 = r2.residuals[0] + r2.forcing[0];
  CHECK((h2 - 2 * h1).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("maxwell homogeneous exact pair") {
  prob::MaxwellMedium medium;
  const auto mx = prob::maxwell_problem(medium);
  for (double x : {0.0, 0.3, 1.0}) {
    CHECK(mx->exact(0, 0, x, 0.0) == doctest::Approx(std::sin(4 * kPi * x)));
    CHECK(mx->exact(0, 1, x, 0.0) == 0.0);
  }
  // residuals of the exact pair cancel because w = n pi with unit length
  CHECK(prob::manufactured_residual_max(*mx, 500, 31337) < 1e-10);
}

TEST_CASE("maxwell heterogeneous interface equality") {
  prob::MaxwellMedium medium;
  medium.heterogeneous = true;
  const auto mx = prob::maxwell_problem(medium);
  REQUIRE(mx->subdomain_count() == 2);
  CHECK(mx->has_interface());
  for (double t : {0.0, 0.21, 0.73, 1.0}) {
    CHECK(mx->exact(0, 0, 0.5, t) == doctest::Approx(1.5 * std::cos(2 * t)).epsilon(1e-14));
    CHECK(mx->exact(1, 0, 0.5, t) == doctest::Approx(1.5 * std::cos(2 * t)).epsilon(1e-14));
    CHECK(mx->exact(0, 1, 0.5, t) == doctest::Approx(0.5 * std::cos(2 * t)).epsilon(1e-14));
    CHECK(mx->exact(1, 1, 0.5, t) == doctest::Approx(0.5 * std::cos(2 * t)).epsilon(1e-14));
  }
  CHECK(prob::interface_mismatch_max(*mx, 100, 101) < 1e-12);
}

TEST_CASE("manufactured solutions annihilate every residual") {
  std::vector<std::unique_ptr<prob::Problem>> problems;
  problems.push_back(prob::heat_conduction_problem(0.5));
  problems.push_back(prob::heat_conduction_problem(0.15));
  problems.push_back(prob::helmholtz_problem(1.0, 1.0, 8.0));
  problems.push_back(prob::klein_gordon_problem(5.0));
  problems.push_back(prob::klein_gordon_problem(10.0));
  problems.push_back(prob::maxwell_problem({}));
  prob::MaxwellMedium hetero;
  hetero.heterogeneous = true;
  problems.push_back(prob::maxwell_problem(hetero));
  for (const auto& p : problems) {
    CAPTURE(p->name());
    CHECK(prob::manufactured_residual_max(*p, 1000, 424242) < 1e-10);
  }
}

TEST_CASE("ic/bc targets agree with the exact trace") {
  std::mt19937_64 engine(229);
  std::vector<std::unique_ptr<prob::Problem>> problems;
  problems.push_back(prob::heat_conduction_problem(0.25));
  problems.push_back(prob::helmholtz_problem());
  problems.push_back(prob::klein_gordon_problem(5.0));
  problems.push_back(prob::maxwell_problem({}));
  for (const auto& p : problems) {
    for (const prob::Segment& seg : p->segments()) {
      if (seg.kind == prob::SegmentKind::Interface) continue;
      const prob::Domain2& d = p->domain(seg.subdomain);
      const wave::Interval free = seg.fixed_dim == 0 ? d.t : d.x;
      for (int i = 0; i < 50; ++i) {
        const double v = rng::uniform(engine, free.lo, free.hi);
        const double x = seg.fixed_dim == 0 ? seg.fixed_value : v;
        const double t = seg.fixed_dim == 0 ? v : seg.fixed_value;
        for (const prob::PointConstraint& c : seg.constraints) {
          const double trace =
              p->exact_derivative(seg.subdomain, c.field, x, t, c.order);
          CHECK(std::abs(c.target(x, t) - trace) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("residual with zero coefficients is minus the forcing") {
  const auto heat = prob::heat_conduction_problem(0.5);
  const wave::WaveletFamily2D family =
      wave::build_family_2d({-1, 1}, {0}, {0, 1}, {0});
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(8, 2);
  std::mt19937_64 engine(233);
  for (int i = 0; i < 8; ++i) {
    pts(i, 0) = rng::uniform(engine, -1, 1);
    pts(i, 1) = rng::uniform(engine, 0, 1);
  }
  const wave::BasisMatrices basis(family, pts, {{0, 1}, {2, 0}});
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(family.size());
  const auto ev = prob::evaluate_residual(*heat, 0, basis, {zero}, {0.0});
  CHECK((ev.residuals[0] + ev.forcing[0]).norm() == 0.0);
}

TEST_CASE("missing derivative order is reported") {
  const auto heat = prob::heat_conduction_problem(0.5);
  const wave::WaveletFamily2D family =
      wave::build_family_2d({-1, 1}, {0}, {0, 1}, {0});
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(2, 2);
  pts << 0, 0.5, 0.5, 0.5;
  const wave::BasisMatrices basis(family, pts, {{0, 1}});  // (2,0) missing
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(family.size());
  CHECK_THROWS_WITH_AS(prob::evaluate_residual(*heat, 0, basis, {zero}, {0.0}),
                       doctest::Contains("(2,0)"), std::invalid_argument);
}

TEST_CASE("coefficient pullback matches finite differences") {
  std::mt19937_64 engine(239);
  std::vector<std::unique_ptr<prob::Problem>> problems;
  problems.push_back(prob::heat_conduction_problem(0.5));
  problems.push_back(prob::helmholtz_problem(1.0, 1.0, 2.0));
  problems.push_back(prob::klein_gordon_problem(2.0));
  problems.push_back(prob::maxwell_problem({}));

  for (const auto& p : problems) {
    CAPTURE(p->name());
    const prob::Domain2& d = p->domain(0);
    const wave::WaveletFamily2D family =
        wave::build_family_2d(d.x, {-1, 0}, d.t, {-1, 0});
    Eigen::Matrix<double, Eigen::Dynamic, 2> pts(12, 2);
    for (int i = 0; i < 12; ++i) {
      pts(i, 0) = rng::uniform(engine, d.x.lo, d.x.hi);
      pts(i, 1) = rng::uniform(engine, d.t.lo, d.t.hi);
    }
    std::vector<DerivOrder> orders;
    for (int f = 0; f < p->field_count(); ++f) {
      for (const DerivOrder& o : p->residual_orders(f)) {
        if (std::find(orders.begin(), orders.end(), o) == orders.end()) orders.push_back(o);
      }
    }
    const wave::BasisMatrices basis(family, pts, orders);

    std::vector<Eigen::VectorXd> coeffs(p->field_count());
    std::vector<double> biases(p->field_count(), 0.1);
    for (auto& c : coeffs) {
      c.resize(family.size());
      for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng::uniform(engine, -0.5, 0.5);
    }

    const auto ev = prob::evaluate_residual(*p, 0, basis, coeffs, biases);
    // cotangent = residual makes the objective 0.5 ||r||^2
    const auto pb = prob::residual_vjp(*p, 0, basis, ev, ev.residuals);

    const double h = 1e-6;
    for (int f = 0; f < p->field_count(); ++f) {
      for (Eigen::Index j = 0; j < family.size(); ++j) {
        auto up = coeffs, down = coeffs;
        up[f][j] += h;
        down[f][j] -= h;
        const double fd = (half_residual_sq(*p, 0, basis, up, biases) -
                           half_residual_sq(*p, 0, basis, down, biases)) /
                          (2 * h);
        CHECK(std::abs(pb.coefficients[f][j] - fd) <=
              1e-6 * std::max({1.0, std::abs(fd), std::abs(pb.coefficients[f][j])}));
      }
      auto up = biases, down = biases;
      up[f] += h;
      down[f] -= h;
      const double fd = (half_residual_sq(*p, 0, basis, coeffs, up) -
                         half_residual_sq(*p, 0, basis, coeffs, down)) /
                        (2 * h);
      CHECK(std::abs(pb.biases[f] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("forcing consistency under parameter change") {
  // heat: f varies continuously in eps
  std::mt19937_64 engine(251);
  for (int i = 0; i < 20; ++i) {
    const double x = rng::uniform(engine, -1, 1);
    const double t = rng::uniform(engine, 0, 1);
    const double eps = rng::uniform(engine, 0.1, 0.6);
    const double f0 = prob::heat_conduction_problem(eps)->forcing(0, 0, x, t);
    const double f1 = prob::heat_conduction_problem(eps + 1e-7)->forcing(0, 0, x, t);
    CHECK(std::abs(f1 - f0) < 1e-3 * std::max(1.0, std::abs(f0)));
  }

  // helmholtz: f is exactly (kappa^2 - pi^2 (b1^2 + b2^2)) u_exact
  const double kappa = 1.3, b1 = 2.0, b2 = 5.0;
  const auto helm = prob::helmholtz_problem(kappa, b1, b2);
  const double coeff = kappa * kappa - kPi * kPi * (b1 * b1 + b2 * b2);
  for (int i = 0; i < 20; ++i) {
    const double x = rng::uniform(engine, -1, 1);
    const double y = rng::uniform(engine, -1, 1);
    CHECK(helm->forcing(0, 0, x, y) ==
          doctest::Approx(coeff * helm->exact(0, 0, x, y)).epsilon(1e-13));
  }
}

TEST_CASE("maxwell coupled pullback routes across fields") {
  const auto mx = prob::maxwell_problem({});
  const wave::WaveletFamily2D family = wave::build_family_2d({0, 1}, {0}, {0, 1}, {0});
  std::mt19937_64 engine(241);
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(10, 2);
  for (int i = 0; i < 10; ++i) {
    pts(i, 0) = rng::uniform(engine, 0, 1);
    pts(i, 1) = rng::uniform(engine, 0, 1);
  }
  const wave::BasisMatrices basis(family, pts, {{0, 1}, {1, 0}});
  std::vector<Eigen::VectorXd> coeffs(2, Eigen::VectorXd::Zero(family.size()));
  for (auto& c : coeffs) {
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng::uniform(engine, -1, 1);
  }
  const auto ev = prob::evaluate_residual(*mx, 0, basis, coeffs, {0.0, 0.0});

  // cotangent only on the E residual still reaches the H coefficients (via
  // the H_x term) and vice versa
  std::vector<Eigen::VectorXd> only_e = {ev.residuals[0],
                                         Eigen::VectorXd::Zero(pts.rows())};
  const auto pb = prob::residual_vjp(*mx, 0, basis, ev, only_e);
  CHECK(pb.coefficients[0].norm() > 0.0);
  CHECK(pb.coefficients[1].norm() > 0.0);
}
