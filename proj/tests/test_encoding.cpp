#include "qwpde/encoding.hpp"

#include <numbers>
#include <random>

#include "doctest.h"
#include "qwpde/rng.hpp"

using namespace qwpde;
using sv::Axis;

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
}  // namespace

TEST_CASE("angle encoding basics") {
  const sv::StateVector zero = enc::angle_encode(vec({0, 0}), 2);
  const sv::StateVector ref = sv::init_zero_state(2);
  CHECK((zero.amplitudes - ref.amplitudes).norm() == 0.0);

  const sv::StateVector one = enc::angle_encode(vec({kPi}), 1);
  CHECK(std::abs(one.amplitudes[1] - sv::Complex(1, 0)) < 1e-15);

  const sv::StateVector half = enc::angle_encode(vec({kPi / 2}), 2);
  CHECK(std::abs(sv::expectation_z(half, 0)) < 1e-15);
  CHECK(sv::expectation_z(half, 1) == doctest::Approx(1.0));
}

TEST_CASE("angle encoding capacity") {
  CHECK_THROWS_AS(enc::angle_encode(vec({1, 2, 3}), 2), std::invalid_argument);
}

TEST_CASE("amplitude encoding examples") {
  const sv::StateVector basis = enc::amplitude_encode(vec({1, 0, 0, 0}), 2);
  CHECK(basis.amplitudes[0] == sv::Complex(1, 0));

  const sv::StateVector pyth = enc::amplitude_encode(vec({3, 4}), 1);
  CHECK(pyth.amplitudes[0].real() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(pyth.amplitudes[1].real() == doctest::Approx(0.8).epsilon(1e-15));

  const sv::StateVector padded = enc::amplitude_encode(vec({1, 1}), 2);
  CHECK(padded.amplitudes[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(padded.amplitudes[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(padded.amplitudes[2] == sv::Complex(0, 0));
  CHECK(padded.amplitudes[3] == sv::Complex(0, 0));
}

TEST_CASE("amplitude encoding errors") {
  CHECK_THROWS_AS(enc::amplitude_encode(vec({0, 0}), 2), std::domain_error);
  CHECK_THROWS_AS(enc::amplitude_encode(vec({1, 2, 3, 4, 5}), 2), std::invalid_argument);
}

TEST_CASE("amplitude encoding properties") {
  std::mt19937_64 engine(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + int(engine() % 6);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng::uniform(engine, -5, 5);
    if (v.norm() == 0) continue;
    const sv::StateVector s = enc::amplitude_encode(v, 3);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);

    const double alpha = rng::uniform(engine, 0.1, 9.0);
    const sv::StateVector scaled = enc::amplitude_encode(alpha * v, 3);
    CHECK((scaled.amplitudes - s.amplitudes).norm() < 1e-14);
  }
}

TEST_CASE("amplitude encoding vjp matches finite differences") {
  std::mt19937_64 engine(31);
  const int n = 5;
  Eigen::VectorXd v(n), w(n);
  for (int i = 0; i < n; ++i) {
    v[i] = rng::uniform(engine, -2, 2);
    w[i] = rng::uniform(engine, -1, 1);
  }
  // scalar objective w . (v/||v||), amplitude cotangent is w itself
  const Eigen::VectorXd grad = enc::amplitude_encode_vjp(v, w);
  const double h = 1e-6;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd up = v, down = v;
    up[i] += h;
    down[i] -= h;
    const double fd = (w.dot(up.normalized()) - w.dot(down.normalized())) / (2 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("normalisation jacobian at unit norm is I - v v^T") {
  std::mt19937_64 engine(37);
  Eigen::VectorXd v(4);
  for (int i = 0; i < 4; ++i) v[i] = rng::uniform(engine, -1, 1);
  v.normalize();
  for (int col = 0; col < 4; ++col) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(4, col);
    const Eigen::VectorXd jcol = enc::amplitude_encode_vjp(v, e);
    const Eigen::VectorXd expected = e - v[col] * v;
    CHECK((jcol - expected).norm() < 1e-13);
  }
}

TEST_CASE("domain rescaler maps onto [0, pi] and inverts") {
  enc::DomainRescaler rs(vec({-1, 0}), vec({1, 1}));
  CHECK((rs.to_angles(vec({-1, 0})) - vec({0, 0})).norm() == 0.0);
  CHECK((rs.to_angles(vec({1, 1})) - vec({kPi, kPi})).norm() < 1e-15);
  const Eigen::VectorXd x = vec({0.25, 0.75});
  CHECK((rs.from_angles(rs.to_angles(x)) - x).norm() < 1e-15);
}
