// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <doctest.h>

#include "clcrn/errors.hpp"
#include "clcrn/metrics.hpp"

using namespace clcrn;

TEST_SUITE("metrics") {

TEST_CASE("hand case: truth (1,2), prediction (2,4)") {
  MetricsAccumulator acc(1);
  const double truth[] = {1.0, 2.0};
  const double pred[] = {2.0, 4.0};
  acc.add_frame(0, pred, truth, 2);
  const MetricsRow row = acc.at_horizon(1);
  CHECK(row.mae == doctest::Approx(1.5));
  // mean |error| over nonzero truth = 1.5, peak |truth| = 2 -> 0.75
  CHECK(row.mape == doctest::Approx(0.75));
  CHECK(row.rmse_conventional == doctest::Approx(std::sqrt(2.5)));
  CHECK(row.rmse_paper == doctest::Approx(std::sqrt(2.5)));
}

TEST_CASE("zero-truth entries are excluded from MAPE but not MAE") {
  MetricsAccumulator acc(1);
  const double truth[] = {0.0, 2.0};
  const double pred[] = {5.0, 3.0};
  acc.add_frame(0, pred, truth, 2);
  const MetricsRow row = acc.at_horizon(1);
  CHECK(row.mae == doctest::Approx(3.0));         // (5 + 1) / 2
  CHECK(row.mape == doctest::Approx(0.5));        // 1 / 2
}

TEST_CASE("constant offset delta gives MAE delta at every horizon") {
  MetricsAccumulator acc(3);
  const double truth[] = {1.0, -2.0, 7.0};
  double pred[3];
  for (int t = 0; t < 3; ++t) {
    for (int i = 0; i < 3; ++i) pred[i] = truth[i] + 0.25;
    acc.add_frame(t, pred, truth, 3);
  }
  for (int h = 1; h <= 3; ++h) {
    const MetricsRow row = acc.at_horizon(h);
    CHECK(row.mae == doctest::Approx(0.25));
    CHECK(row.rmse_conventional == doctest::Approx(0.25));
  }
}

TEST_CASE("paper-style vs conventional rmse differ beyond one step") {
  // step 0 error 0, step 1 error 2 everywhere
  MetricsAccumulator acc(2);
  const double truth[] = {1.0};
  const double exact[] = {1.0};
  const double off[] = {3.0};
  acc.add_frame(0, exact, truth, 1);
  acc.add_frame(1, off, truth, 1);
  const MetricsRow row = acc.at_horizon(2);
  // conventional: sqrt(mean over all entries) = sqrt(4/2) = sqrt(2)
  CHECK(row.rmse_conventional == doctest::Approx(std::sqrt(2.0)));
  // per-step form: (1/2) * (sqrt(0) + sqrt(4)) = 1
  CHECK(row.rmse_paper == doctest::Approx(1.0));
  CHECK(row.mae == doctest::Approx(1.0));
}

TEST_CASE("horizon averaging over lead times") {
  MetricsAccumulator acc(2);
  const double truth[] = {1.0};
  const double p0[] = {2.0};  // error 1 at step 0
  const double p1[] = {4.0};  // error 3 at step 1
  acc.add_frame(0, p0, truth, 1);
  acc.add_frame(1, p1, truth, 1);
  CHECK(acc.at_horizon(1).mae == doctest::Approx(1.0));
  CHECK(acc.at_horizon(2).mae == doctest::Approx(2.0));
}

TEST_CASE("merge equals accumulating everything in one pass") {
  const double truth_a[] = {1.0, 2.0};
  const double pred_a[] = {1.5, 1.0};
  const double truth_b[] = {-3.0, 0.5};
  const double pred_b[] = {-1.0, 0.25};

  MetricsAccumulator one(2);
  one.add_frame(0, pred_a, truth_a, 2);
  one.add_frame(1, pred_b, truth_b, 2);

  MetricsAccumulator left(2), right(2);
  left.add_frame(0, pred_a, truth_a, 2);
  right.add_frame(1, pred_b, truth_b, 2);
  left.merge(right);

  const MetricsRow a = one.at_horizon(2), b = left.at_horizon(2);
  CHECK(a.mae == b.mae);
  CHECK(a.rmse_paper == b.rmse_paper);
  CHECK(a.rmse_conventional == b.rmse_conventional);
  CHECK(a.mape == b.mape);
}

TEST_CASE("empty accumulator throws") {
  MetricsAccumulator acc(2);
  CHECK_THROWS_AS(acc.at_horizon(1), EmptySplit);
}

TEST_CASE("perfect prediction gives all zeros") {
  MetricsAccumulator acc(1);
  const double truth[] = {1.0, -2.0, 3.0};
  acc.add_frame(0, truth, truth, 3);
  const MetricsRow row = acc.at_horizon(1);
  CHECK(row.mae == 0.0);
  CHECK(row.rmse_paper == 0.0);
  CHECK(row.rmse_conventional == 0.0);
  CHECK(row.mape == 0.0);
}

}  // TEST_SUITE
