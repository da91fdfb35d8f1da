// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_METRICS_HPP
#define CLCRN_METRICS_HPP

#include <vector>

namespace clcrn {

struct MetricsRow {
  int horizon = 0;
  double mae = 0.0;
  /// 1/T outside the square root, as the evaluation protocol writes it.
  double rmse_paper = 0.0;
  /// Conventional per-element root mean squared error.
  double rmse_conventional = 0.0;
  /// Mean absolute error over nonzero-truth entries, normalized by the peak
  /// absolute ground truth; entries with ground truth 0 are excluded.
  double mape = 0.0;
};

/// Streaming per-lead-time error accumulator shared by model evaluation and
/// the persistence baseline.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(int max_horizon);

  /// Adds one predicted frame at lead time `step` (0-based) as flat arrays
  /// of equal length.
  void add_frame(int step, const double* pred, const double* truth,
                 std::size_t count);

  /// Metrics aggregated over lead times 0..horizon-1. Throws EmptySplit when
  /// nothing was accumulated.
  MetricsRow at_horizon(int horizon) const;

  /// Adds another accumulator's counts into this one.
  void merge(const MetricsAccumulator& other);

 private:
  struct StepAcc {
    double sum_abs = 0.0;
    double sum_sq = 0.0;
    double sum_abs_nonzero = 0.0;
    double max_abs_truth = 0.0;
    long count = 0;
    long count_nonzero = 0;
  };
  std::vector<StepAcc> steps_;
};

}  // namespace clcrn

#endif
