// SPDX-License-Identifier: Apache-2.0
#include "clcrn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clcrn/errors.hpp"

namespace clcrn {

MetricsAccumulator::MetricsAccumulator(int max_horizon)
    : steps_(static_cast<std::size_t>(max_horizon)) {}

void MetricsAccumulator::add_frame(int step, const double* pred,
                                   const double* truth, std::size_t count) {
  StepAcc& acc = steps_.at(static_cast<std::size_t>(step));
  for (std::size_t i = 0; i < count; ++i) {
    const double e = std::abs(pred[i] - truth[i]);
    acc.sum_abs += e;
    acc.sum_sq += e * e;
    ++acc.count;
    if (truth[i] != 0.0) {
      acc.sum_abs_nonzero += e;
      ++acc.count_nonzero;
      acc.max_abs_truth = std::max(acc.max_abs_truth, std::abs(truth[i]));
    }
  }
}

void MetricsAccumulator::merge(const MetricsAccumulator& other) {
  if (other.steps_.size() != steps_.size()) {
    throw ShapeMismatch("metrics merge: horizon " +
                        std::to_string(other.steps_.size()) + " vs " +
                        std::to_string(steps_.size()));
  }
  for (std::size_t t = 0; t < steps_.size(); ++t) {
    steps_[t].sum_abs += other.steps_[t].sum_abs;
    steps_[t].sum_sq += other.steps_[t].sum_sq;
    steps_[t].sum_abs_nonzero += other.steps_[t].sum_abs_nonzero;
    steps_[t].max_abs_truth =
        std::max(steps_[t].max_abs_truth, other.steps_[t].max_abs_truth);
    steps_[t].count += other.steps_[t].count;
    steps_[t].count_nonzero += other.steps_[t].count_nonzero;
  }
}

MetricsRow MetricsAccumulator::at_horizon(int horizon) const {
  MetricsRow row;
  row.horizon = horizon;
  double sum_mae = 0.0, sum_mse = 0.0, sum_ape = 0.0, max_truth = 0.0;
  for (int t = 0; t < horizon; ++t) {
    const StepAcc& acc = steps_.at(static_cast<std::size_t>(t));
    if (acc.count == 0) throw EmptySplit("metrics: no samples at lead time " +
                                         std::to_string(t));
    sum_mae += acc.sum_abs / static_cast<double>(acc.count);
    sum_mse += acc.sum_sq / static_cast<double>(acc.count);
    if (acc.count_nonzero > 0) {
      sum_ape += acc.sum_abs_nonzero / static_cast<double>(acc.count_nonzero);
    }
    max_truth = std::max(max_truth, acc.max_abs_truth);
  }
  const double inv_h = 1.0 / static_cast<double>(horizon);
  row.mae = sum_mae * inv_h;
  row.rmse_paper = inv_h * std::sqrt(sum_mse);
  row.rmse_conventional = std::sqrt(sum_mse * inv_h);
  row.mape = max_truth > 0.0 ? (sum_ape * inv_h) / max_truth : 0.0;
  return row;
}

}  // namespace clcrn
