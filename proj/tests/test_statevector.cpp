#include "qwpde/statevector.hpp"

#include <numbers>
#include <random>

#include "doctest.h"
#include "qwpde/rng.hpp"

using namespace qwpde;
using sv::Axis;
using sv::StateVector;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector random_state(std::mt19937_64& engine, int n_qubits, bool normalise) {
  StateVector s;
  s.n_qubits = n_qubits;
  s.amplitudes.resize(Eigen::Index(1) << n_qubits);
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    s.amplitudes[i] = {rng::uniform(engine, -1, 1), rng::uniform(engine, -1, 1)};
  }
  if (normalise) s.amplitudes /= s.norm();
  return s;
}

}  // namespace

TEST_CASE("zero state definition") {
  const StateVector one = sv::init_zero_state(1);
  CHECK(one.dim() == 2);
  CHECK(one.amplitudes[0] == sv::Complex(1, 0));
  CHECK(one.amplitudes[1] == sv::Complex(0, 0));

  const StateVector two = sv::init_zero_state(2);
  CHECK(two.dim() == 4);
  CHECK(two.amplitudes[0] == sv::Complex(1, 0));
  for (int i = 1; i < 4; ++i) CHECK(two.amplitudes[i] == sv::Complex(0, 0));

  const StateVector three = sv::init_zero_state(3);
  CHECK(three.dim() == 8);
  CHECK(three.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("zero state qubit range") {
  CHECK_THROWS_AS(sv::init_zero_state(0), std::invalid_argument);
  CHECK_THROWS_AS(sv::init_zero_state(-1), std::invalid_argument);
  CHECK_THROWS_AS(sv::init_zero_state(25), std::invalid_argument);
}

TEST_CASE("R_Y(pi) flips |0> to |1>") {
  const StateVector s = sv::apply_rotation(sv::init_zero_state(1), Axis::Y, 0, kPi);
  CHECK(std::abs(s.amplitudes[0]) < 1e-15);
  CHECK(std::abs(s.amplitudes[1] - sv::Complex(1, 0)) < 1e-15);
}

TEST_CASE("zero-angle rotation is the identity") {
  std::mt19937_64 engine(7);
  const StateVector s = random_state(engine, 3, true);
  for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
    const StateVector r = sv::apply_rotation(s, axis, 1, 0.0);
    CHECK((r.amplitudes - s.amplitudes).norm() == 0.0);
  }
}

TEST_CASE("R_Z phase on |0>") {
  const double theta = 0.731;
  const StateVector s = sv::apply_rotation(sv::init_zero_state(1), Axis::Z, 0, theta);
  const sv::Complex expected = std::exp(sv::Complex(0, -theta / 2));
  CHECK(std::abs(s.amplitudes[0] - expected) < 1e-15);
  CHECK(std::abs(s.amplitudes[1]) == 0.0);
}

TEST_CASE("cnot truth table") {
  // |10>: qubit 0 (MSB) set -> index 2
  StateVector s = sv::init_zero_state(2);
  s.amplitudes[0] = 0;
  s.amplitudes[2] = 1;
  const StateVector flipped = sv::apply_cnot(s, 0, 1);
  CHECK(flipped.amplitudes[3] == sv::Complex(1, 0));  // |11>

  const StateVector zero = sv::apply_cnot(sv::init_zero_state(2), 0, 1);
  CHECK(zero.amplitudes[0] == sv::Complex(1, 0));
}

TEST_CASE("cnot is an involution") {
  std::mt19937_64 engine(11);
  const StateVector s = random_state(engine, 4, true);
  const StateVector twice = sv::apply_cnot(sv::apply_cnot(s, 2, 0), 2, 0);
  CHECK((twice.amplitudes - s.amplitudes).norm() == 0.0);
}

TEST_CASE("cnot argument checks") {
  const StateVector s = sv::init_zero_state(2);
  CHECK_THROWS_AS(sv::apply_cnot(s, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(sv::apply_cnot(s, 0, 2), std::out_of_range);
  CHECK_THROWS_AS(sv::apply_rotation(s, Axis::Y, -1, 0.3), std::out_of_range);
}

TEST_CASE("pauli-z expectations") {
  CHECK(sv::expectation_z(sv::init_zero_state(1), 0) == 1.0);

  std::mt19937_64 engine(3);
  for (int i = 0; i < 100; ++i) {
    const double theta = rng::uniform(engine, -8, 8);
    const StateVector s = sv::apply_rotation(sv::init_zero_state(1), Axis::Y, 0, theta);
    CHECK(std::abs(sv::expectation_z(s, 0) - std::cos(theta)) < 1e-12);
  }

  // (|00> + |11>)/sqrt(2) via R_Y(pi/2) then CNOT
  StateVector bell = sv::apply_rotation(sv::init_zero_state(2), Axis::Y, 0, kPi / 2);
  bell = sv::apply_cnot(bell, 0, 1);
  CHECK(std::abs(sv::expectation_z(bell, 0)) < 1e-15);
  CHECK(std::abs(sv::expectation_z(bell, 1)) < 1e-15);
}

TEST_CASE("unitarity over random gate sequences") {
  std::mt19937_64 engine(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + int(engine() % 6);
    StateVector s = sv::init_zero_state(n);
    const int n_gates = 2 + int(engine() % 10);
    for (int g = 0; g < n_gates; ++g) {
      const int pick = int(engine() % (n > 1 ? 4 : 3));
      if (pick < 3) {
        const Axis axis = static_cast<Axis>(pick);
        sv::apply_rotation_in_place(s, axis, int(engine() % n),
                                    rng::uniform(engine, -10, 10));
      } else {
        const int c = int(engine() % n);
        int t = int(engine() % n);
        if (t == c) t = (t + 1) % n;
        sv::apply_cnot_in_place(s, c, t);
      }
    }
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("gates act linearly on unnormalised states") {
  std::mt19937_64 engine(5);
  const StateVector a = random_state(engine, 3, false);
  const StateVector b = random_state(engine, 3, false);
  const sv::Complex alpha(0.3, -1.1), beta(-0.7, 0.2);

  StateVector combo = a;
  combo.amplitudes = alpha * a.amplitudes + beta * b.amplitudes;

  const double theta = 1.234;
  const StateVector lhs = sv::apply_rotation(combo, Axis::Y, 1, theta);
  const StateVector ra = sv::apply_rotation(a, Axis::Y, 1, theta);
  const StateVector rb = sv::apply_rotation(b, Axis::Y, 1, theta);
  CHECK((lhs.amplitudes - (alpha * ra.amplitudes + beta * rb.amplitudes)).norm() < 1e-12);

  const StateVector clhs = sv::apply_cnot(combo, 0, 2);
  const StateVector ca = sv::apply_cnot(a, 0, 2);
  const StateVector cb = sv::apply_cnot(b, 0, 2);
  CHECK((clhs.amplitudes - (alpha * ca.amplitudes + beta * cb.amplitudes)).norm() < 1e-12);
}

TEST_CASE("single-qubit gate cost scales as 2^n") {
  for (int n : {2, 4, 6, 8}) {
    StateVector s = sv::init_zero_state(n);
    const std::uint64_t before = sv::pair_update_count();
    sv::apply_rotation_in_place(s, Axis::Y, 0, 0.4);
    const std::uint64_t after = sv::pair_update_count();
    CHECK(after - before == (std::uint64_t(1) << (n - 1)));
  }
}

TEST_CASE("weighted-Z observable matches per-wire expectations") {
  std::mt19937_64 engine(17);
  const StateVector s = random_state(engine, 3, true);
  Eigen::VectorXd w(3);
  w << 0.5, -1.25, 2.0;
  StateVector ms = s;
  sv::apply_weighted_z_in_place(ms, w);
  const double via_operator = s.amplitudes.dot(ms.amplitudes).real();
  double via_expectations = 0;
  for (int q = 0; q < 3; ++q) via_expectations += w[q] * sv::expectation_z(s, q);
  CHECK(via_operator == doctest::Approx(via_expectations).epsilon(1e-13));
}
