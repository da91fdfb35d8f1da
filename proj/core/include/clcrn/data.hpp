// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_DATA_HPP
#define CLCRN_DATA_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "clcrn/geometry.hpp"
#include "clcrn/metrics.hpp"

namespace clcrn {

enum class Split { kTrain, kVal, kTest };

/// Node coordinates plus a (T x N x D) signal tensor with chronological
/// split boundaries and z-score statistics fitted on the training frames.
struct Dataset {
  std::vector<SpherePoint> points;           // N unit vectors
  std::vector<std::array<double, 2>> coords; // N x (lat_deg, lon_deg)
  std::vector<double> signals;               // T*N*D, (t, n, d) row-major
  int num_frames = 0;
  int num_nodes = 0;
  int dim = 0;
  std::array<int, 3> split_frames{0, 0, 0};  // train, val, test frame counts
  int input_len = 12;
  int horizon = 12;
  std::vector<double> mean;    // per dimension, training frames only
  std::vector<double> stddev;  // per dimension, > 0

  double at(int t, int n, int d) const {
    return signals[(static_cast<std::size_t>(t) * num_nodes + n) * dim + d];
  }
  double& at(int t, int n, int d) {
    return signals[(static_cast<std::size_t>(t) * num_nodes + n) * dim + d];
  }

  /// First frame index of a split.
  int split_begin(Split s) const;
  /// One past the last frame index of a split.
  int split_end(Split s) const;

  double normalize_value(double v, int d) const {
    return (v - mean[d]) / stddev[d];
  }
  double denormalize_value(double v, int d) const {
    return v * stddev[d] + mean[d];
  }
};

/// Reads the JSON metadata file, the coordinate CSV (header
/// node_id,lat_deg,lon_deg) and the little-endian float64 signal blob.
/// Throws MissingFile, SizeMismatch, BadCoordinate. Normalization statistics
/// are fitted from the training frames on load.
Dataset load_dataset(const std::string& meta_path);

/// Writes meta.json, coords.csv and signals.bin under `dir`. The round trip
/// through save/load is bit-exact.
void save_dataset(const Dataset& ds, const std::string& dir);

/// Near-uniform yet irregular sphere sampling (golden-angle spiral).
std::vector<SpherePoint> fibonacci_lattice(int n_nodes);

/// Synthetic spherical advection-diffusion dynamics on a Fibonacci lattice.
struct AdvectionParams {
  double kappa = 0.15;         // diffusion strength per step
  double alpha = 2.0;          // directional drift strength
  double drift_bearing = 0.0;  // preferred bearing, radians (0 = east)
  int steps = 2500;            // total frames generated
  std::uint64_t seed = 7;
  int knn = 8;                 // neighbor count of the dynamics stencil
  int bumps = 3;               // Gaussian bumps in the initial field
  bool symmetrize = false;     // symmetric weights (mass-conserving diffusion)
  double train_frac = 0.7;
  double val_frac = 0.1;
};

/// Deterministic given the seed. Throws StabilityViolated when the explicit
/// update cannot be contractive. If stability_margin is non-null it receives
/// 1 - kappa * max row sum of the stencil.
Dataset gen_synthetic(int n_nodes, const AdvectionParams& params,
                      double* stability_margin = nullptr);

/// Recomputes mean/stddev per dimension from the training frames.
/// Throws ZeroStd.
void fit_normalization(Dataset& ds);

/// Start frames of all (input_len + horizon) windows fully contained in a
/// split, stride 1, chronological.
std::vector<int> window_starts(const Dataset& ds, Split split);

/// Repeats the last observed frame across the horizon and scores it with the
/// shared metrics. Throws EmptySplit.
std::vector<MetricsRow> persistence_baseline(const Dataset& ds, Split split,
                                             const std::vector<int>& horizons);

}  // namespace clcrn

#endif
