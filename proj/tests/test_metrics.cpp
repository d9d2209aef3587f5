#include "qwpde/metrics.hpp"

#include <cmath>

#include "doctest.h"
#include "qwpde/report.hpp"

using namespace qwpde;

TEST_CASE("relative l2 basics") {
  Eigen::VectorXd ref(4);
  ref << 1, 2, 3, 4;
  CHECK(metrics::relative_l2(ref, ref) == 0.0);
  CHECK(metrics::relative_l2(1.1 * ref, ref) == doctest::Approx(0.1).epsilon(1e-12));

  // constant offset on a 4-point vector, by hand: ||e 1|| / ||ref||
  const Eigen::VectorXd pred = ref.array() + 0.5;
  CHECK(metrics::relative_l2(pred, ref) ==
        doctest::Approx(std::sqrt(4 * 0.25) / std::sqrt(30.0)).epsilon(1e-14));

  CHECK_THROWS_AS(metrics::relative_l2(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)),
                  std::domain_error);
  Eigen::VectorXd shorter(2);
  shorter << 1, 2;
  CHECK_THROWS_AS(metrics::relative_l2(shorter, ref), std::invalid_argument);
}

TEST_CASE("relative l2 scale invariance") {
  Eigen::VectorXd ref(5), pred(5);
  ref << 0.4, -1.2, 2.2, 0.1, -0.7;
  pred << 0.5, -1.0, 2.0, 0.2, -0.9;
  const double base = metrics::relative_l2(pred, ref);
  for (double alpha : {2.0, -3.5, 1e-6}) {
    CHECK(metrics::relative_l2(alpha * pred, alpha * ref) ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("relative linf basics") {
  Eigen::VectorXd ref(4);
  ref << 1, -2, 3, -4;
  CHECK(metrics::relative_linf(ref, ref) == 0.0);

  Eigen::VectorXd spike = ref;
  spike[0] += 4.0;  // spike of size max|ref|
  CHECK(metrics::relative_linf(spike, ref) == doctest::Approx(1.0));

  Eigen::VectorXd pred = ref;
  pred[1] = -1.5;  // |diff| = 0.5, max|ref| = 4
  CHECK(metrics::relative_linf(pred, ref) == doctest::Approx(0.125));

  CHECK_THROWS_AS(
      metrics::relative_linf(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(3)),
      std::domain_error);
}

TEST_CASE("mean and sample std") {
  const metrics::MeanStd two = metrics::mean_std({1e-4, 3e-4});
  CHECK(two.mean == doctest::Approx(2e-4).epsilon(1e-14));
  CHECK(two.std == doctest::Approx(std::sqrt(2.0) * 1e-4).epsilon(1e-12));
  CHECK(two.n == 2);

  const metrics::MeanStd one = metrics::mean_std({0.7});
  CHECK(one.mean == 0.7);
  CHECK(one.std == 0.0);
  CHECK(one.n == 1);

  const metrics::MeanStd three = metrics::mean_std({2.0, 4.0, 9.0});
  CHECK(three.mean == doctest::Approx(5.0));
  CHECK(three.std == doctest::Approx(std::sqrt((9.0 + 1.0 + 16.0) / 2.0)));
}

namespace {

train::SeedResult fake_seed(std::uint64_t seed, double l2, double linf,
                            bool failed = false) {
  train::SeedResult s;
  s.seed = seed;
  s.failed = failed;
  s.trainable_parameters = 10;
  s.final_metrics.rel_l2 = l2;
  s.final_metrics.rel_linf = linf;
  s.final_metrics.field_rel_l2 = {l2};
  s.final_metrics.field_rel_linf = {linf};
  s.wall_seconds = 1.0;
  return s;
}

}  // namespace

TEST_CASE("aggregate over seeds") {
  const auto rep = report::aggregate(nlohmann::json::object(), {"u"},
                                     {fake_seed(0, 1e-4, 2e-4), fake_seed(1, 3e-4, 4e-4)});
  CHECK(rep.per_field[0].rel_l2.mean == doctest::Approx(2e-4));
  CHECK(rep.per_field[0].rel_l2.std == doctest::Approx(std::sqrt(2.0) * 1e-4));
  CHECK(rep.n_failed == 0);

  // permutation invariance
  const auto swapped = report::aggregate(
      nlohmann::json::object(), {"u"}, {fake_seed(1, 3e-4, 4e-4), fake_seed(0, 1e-4, 2e-4)});
  CHECK(swapped.per_field[0].rel_l2.mean == rep.per_field[0].rel_l2.mean);
  CHECK(swapped.per_field[0].rel_l2.std == rep.per_field[0].rel_l2.std);
}

TEST_CASE("aggregate excludes failed seeds and counts them") {
  const auto rep = report::aggregate(
      nlohmann::json::object(), {"u"},
      {fake_seed(0, 1e-4, 2e-4), fake_seed(1, 0, 0, true), fake_seed(2, 3e-4, 4e-4)});
  CHECK(rep.n_failed == 1);
  CHECK(rep.per_field[0].rel_l2.n == 2);
  CHECK(rep.per_field[0].rel_l2.mean == doctest::Approx(2e-4));

  CHECK_THROWS_AS(report::aggregate(nlohmann::json::object(), {"u"},
                                    {fake_seed(0, 0, 0, true)}),
                  std::runtime_error);
  CHECK_THROWS_AS(report::aggregate(nlohmann::json::object(), {"u"}, {}),
                  std::runtime_error);
}

TEST_CASE("single-seed aggregate reports n=1 with zero std") {
  const auto rep =
      report::aggregate(nlohmann::json::object(), {"u"}, {fake_seed(0, 5e-3, 6e-3)});
  CHECK(rep.per_field[0].rel_l2.n == 1);
  CHECK(rep.per_field[0].rel_l2.std == 0.0);
}
