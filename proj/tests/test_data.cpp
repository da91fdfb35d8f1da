// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <utility>
#include <vector>

#include <doctest.h>

#include "clcrn/data.hpp"
#include "clcrn/errors.hpp"
#include "clcrn/graph.hpp"
#include "clcrn/rng.hpp"

using namespace clcrn;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

std::filesystem::path temp_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Dataset tiny_dataset(int frames, int nodes) {
  Dataset ds;
  ds.points = fibonacci_lattice(nodes);
  for (const SpherePoint& p : ds.points) {
    ds.coords.push_back({p.lat() * 180.0 / kPi, p.lon() * 180.0 / kPi});
  }
  ds.num_frames = frames;
  ds.num_nodes = nodes;
  ds.dim = 1;
  ds.input_len = 2;
  ds.horizon = 2;
  const int train = frames * 7 / 10;
  const int val = frames / 10;
  ds.split_frames = {train, val, frames - train - val};
  ds.signals.resize(static_cast<std::size_t>(frames) * nodes);
  Rng rng(55);
  for (double& v : ds.signals) v = rng.uniform(-1.0, 1.0);
  fit_normalization(ds);
  return ds;
}

/// Independent re-derivation of the advection-diffusion rollout.
std::vector<double> oracle_signals(int n, const AdvectionParams& p) {
  const std::vector<SpherePoint> pts = fibonacci_lattice(n);
  Rng rng(p.seed);
  std::vector<double> field(n, 0.0);
  for (int b = 0; b < p.bumps; ++b) {
    const double z = rng.uniform(-1.0, 1.0);
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    SpherePoint c;
    c.v = {r * std::cos(a), r * std::sin(a), z};
    const double sigma = rng.uniform(0.3, 0.7);
    const double amp = rng.uniform(0.5, 1.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    for (int i = 0; i < n; ++i) {
      const double d = geodesic_distance(pts[i], c);
      field[i] += amp * std::exp(-d * d / (2.0 * sigma * sigma));
    }
  }

  const SphericalGraph g = knn_graph(pts, p.knn);
  std::vector<std::vector<std::pair<int, double>>> stencil(n);
  for (int i = 0; i < n; ++i) {
    const LocalFrame frame = local_frame(pts[i]);
    double total = 0.0;
    for (int j : g.neighbors[i]) {
      if (j == i) continue;
      const LocalCoord lc = to_local_coords(frame, horizon_map(pts[i], pts[j]));
      const double bearing = std::atan2(lc.z_rel, lc.phi_rel);
      const double w =
          std::max(0.0, 1.0 + p.alpha * std::cos(bearing - p.drift_bearing));
      stencil[i].push_back({j, w});
      total += w;
    }
    for (auto& [j, w] : stencil[i]) w /= total;
  }

  auto mean_std = [n](const std::vector<double>& f) {
    double mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
    double sq = 0.0;
    for (double v : f) sq += (v - mean) * (v - mean);
    return std::pair<double, double>(mean, std::sqrt(sq / n));
  };
  const auto [m0, s0] = mean_std(field);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.steps) * n);
  std::vector<double> next(n, 0.0);
  for (int t = 0; t < p.steps; ++t) {
    out.insert(out.end(), field.begin(), field.end());
    if (t + 1 == p.steps) break;
    for (int i = 0; i < n; ++i) {
      double flux = 0.0;
      for (const auto& [j, w] : stencil[i]) flux += w * (field[j] - field[i]);
      next[i] = field[i] + p.kappa * flux;
    }
    const auto [m, s] = mean_std(next);
    if (s > 0.0 && s0 > 0.0) {
      const double scale = s0 / s;
      if (scale != 1.0 || m != m0) {
        for (double& v : next) v = m0 + (v - m) * scale;
      }
    }
    field.swap(next);
  }
  return out;
}
}  // namespace

TEST_SUITE("data") {

TEST_CASE("save/load round trip is bit-exact") {
  const Dataset ds = tiny_dataset(20, 16);
  const auto dir = temp_dir("clcrn_roundtrip");
  save_dataset(ds, dir.string());
  const Dataset back = load_dataset((dir / "meta.json").string());
  CHECK(back.num_frames == ds.num_frames);
  CHECK(back.num_nodes == ds.num_nodes);
  CHECK(back.dim == ds.dim);
  CHECK(back.split_frames == ds.split_frames);
  CHECK(back.input_len == ds.input_len);
  CHECK(back.horizon == ds.horizon);
  CHECK(back.signals == ds.signals);
  CHECK(back.mean == ds.mean);
  CHECK(back.stddev == ds.stddev);
  for (int i = 0; i < ds.num_nodes; ++i) {
    CHECK(back.coords[i] == ds.coords[i]);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("truncated signal blob names both byte counts") {
  const Dataset ds = tiny_dataset(20, 16);
  const auto dir = temp_dir("clcrn_truncated");
  save_dataset(ds, dir.string());
  std::filesystem::resize_file(dir / "signals.bin", 100);
  try {
    load_dataset((dir / "meta.json").string());
    FAIL("expected SizeMismatch");
  } catch (const SizeMismatch& e) {
    const std::string msg = e.what();
    CHECK(msg.find("100") != std::string::npos);
    CHECK(msg.find(std::to_string(8 * 20 * 16)) != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("coordinates outside range are rejected") {
  const Dataset ds = tiny_dataset(20, 16);
  const auto dir = temp_dir("clcrn_badcoord");
  save_dataset(ds, dir.string());
  {
    std::ofstream coords(dir / "coords.csv");
    coords << "node_id,lat_deg,lon_deg\n";
    coords << "0,91.0,0.0\n";
    for (int i = 1; i < 16; ++i) coords << i << ",0.0," << i << ".0\n";
  }
  CHECK_THROWS_AS(load_dataset((dir / "meta.json").string()), BadCoordinate);
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing files are reported") {
  CHECK_THROWS_AS(load_dataset("/nonexistent/meta.json"), MissingFile);
}

TEST_CASE("zero diffusion and drift give a constant-in-time field") {
  AdvectionParams p;
  p.kappa = 0.0;
  p.alpha = 0.0;
  p.steps = 12;
  const Dataset ds = gen_synthetic(32, p);
  for (int t = 1; t < ds.num_frames; ++t) {
    for (int n = 0; n < ds.num_nodes; ++n) {
      CHECK(ds.at(t, n, 0) == ds.at(0, n, 0));
    }
  }
}

TEST_CASE("rollout matches an independent oracle") {
  AdvectionParams p;
  p.kappa = 0.25;
  p.alpha = 2.0;
  p.drift_bearing = 0.7;
  p.steps = 12;
  p.seed = 19;
  p.knn = 6;
  const Dataset ds = gen_synthetic(24, p);
  const std::vector<double> oracle = oracle_signals(24, p);
  REQUIRE(ds.signals.size() == oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    CHECK(ds.signals[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
  }
}

TEST_CASE("spatial mean and spread stay pinned to the initial frame") {
  AdvectionParams p;
  p.kappa = 0.3;
  p.steps = 200;
  const Dataset ds = gen_synthetic(60, p);
  double mean0 = 0.0, sq0 = 0.0;
  for (int n = 0; n < 60; ++n) mean0 += ds.at(0, n, 0);
  mean0 /= 60.0;
  for (int n = 0; n < 60; ++n) {
    sq0 += (ds.at(0, n, 0) - mean0) * (ds.at(0, n, 0) - mean0);
  }
  for (int t = 1; t < ds.num_frames; t += 37) {
    double mean = 0.0, sq = 0.0;
    for (int n = 0; n < 60; ++n) mean += ds.at(t, n, 0);
    mean /= 60.0;
    for (int n = 0; n < 60; ++n) {
      sq += (ds.at(t, n, 0) - mean) * (ds.at(t, n, 0) - mean);
    }
    CHECK(std::abs(mean - mean0) < 1e-9);
    CHECK(std::abs(std::sqrt(sq / 60.0) - std::sqrt(sq0 / 60.0)) < 1e-9);
  }
}

TEST_CASE("symmetrized dynamics conserve the spatial mean") {
  AdvectionParams p;
  p.kappa = 0.3;
  p.alpha = 1.0;
  p.symmetrize = true;
  p.steps = 60;
  const Dataset ds = gen_synthetic(48, p);
  double mean0 = 0.0;
  for (int n = 0; n < 48; ++n) mean0 += ds.at(0, n, 0);
  for (int t = 1; t < ds.num_frames; ++t) {
    double mean = 0.0;
    for (int n = 0; n < 48; ++n) mean += ds.at(t, n, 0);
    CHECK(std::abs(mean - mean0) / 48.0 < 1e-9);
  }
}

TEST_CASE("drift bias: upwind neighbors predict the future better") {
  AdvectionParams p;
  p.kappa = 0.4;
  p.alpha = 4.0;
  p.drift_bearing = 0.0;  // pulls from the east
  p.steps = 300;
  p.seed = 3;
  const Dataset ds = gen_synthetic(100, p);
  const SphericalGraph g = knn_graph(ds.points, p.knn);

  double upwind = 0.0, downwind = 0.0;
  long count = 0;
  for (int i = 0; i < 100; ++i) {
    if (ds.points[i].is_pole()) continue;
    const LocalFrame f = local_frame(ds.points[i]);
    int east = -1, west = -1;
    double best_e = 0.0, best_w = 0.0;
    for (int j : g.neighbors[i]) {
      if (j == i) continue;
      const LocalCoord lc = to_local_coords(f, horizon_map(ds.points[i], ds.points[j]));
      if (lc.phi_rel > best_e) { best_e = lc.phi_rel; east = j; }
      if (lc.phi_rel < best_w) { best_w = lc.phi_rel; west = j; }
    }
    if (east < 0 || west < 0) continue;
    for (int t = 0; t + 1 < ds.num_frames; ++t) {
      upwind += std::abs(ds.at(t + 1, i, 0) - ds.at(t, east, 0));
      downwind += std::abs(ds.at(t + 1, i, 0) - ds.at(t, west, 0));
      ++count;
    }
  }
  REQUIRE(count > 0);
  // the next value tracks the eastern (upwind) neighbor more closely
  CHECK(upwind < downwind);
}

TEST_CASE("generator parameter validation") {
  AdvectionParams p;
  CHECK_THROWS_AS(gen_synthetic(8, p), ConfigError);
  p.kappa = -0.1;
  CHECK_THROWS_AS(gen_synthetic(32, p), ConfigError);
  p.kappa = 1.2;  // row sums are 1: kappa >= 1 cannot be contractive
  CHECK_THROWS_AS(gen_synthetic(32, p), StabilityViolated);
}

TEST_CASE("stability margin is reported") {
  AdvectionParams p;
  p.kappa = 0.25;
  p.steps = 4;
  double margin = 0.0;
  gen_synthetic(32, p, &margin);
  CHECK(margin == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("generation is deterministic in the seed") {
  AdvectionParams p;
  p.steps = 20;
  const Dataset a = gen_synthetic(32, p);
  const Dataset b = gen_synthetic(32, p);
  CHECK(a.signals == b.signals);
  p.seed += 1;
  const Dataset c = gen_synthetic(32, p);
  CHECK(a.signals != c.signals);
}

TEST_CASE("split fractions floor to frame counts") {
  AdvectionParams p;
  p.steps = 100;
  const Dataset ds = gen_synthetic(32, p);
  CHECK(ds.split_frames[0] == 70);
  CHECK(ds.split_frames[1] == 10);
  CHECK(ds.split_frames[2] == 20);
  CHECK(ds.split_begin(Split::kVal) == 70);
  CHECK(ds.split_end(Split::kTest) == 100);
}

TEST_CASE("normalization is fitted on training frames only") {
  Dataset ds = tiny_dataset(20, 16);
  // make validation/test wildly different; stats must not move
  const std::vector<double> mean_before = ds.mean;
  for (int t = ds.split_frames[0]; t < ds.num_frames; ++t) {
    for (int n = 0; n < ds.num_nodes; ++n) ds.at(t, n, 0) += 100.0;
  }
  fit_normalization(ds);
  CHECK(ds.mean == mean_before);

  // normalized training frames have mean ~0, std ~1
  double sum = 0.0, sq = 0.0;
  long count = 0;
  for (int t = 0; t < ds.split_frames[0]; ++t) {
    for (int n = 0; n < ds.num_nodes; ++n) {
      const double v = ds.normalize_value(ds.at(t, n, 0), 0);
      sum += v;
      sq += v * v;
      ++count;
    }
  }
  CHECK(std::abs(sum / count) < 1e-12);
  CHECK(std::abs(sq / count - 1.0) < 1e-12);
}

TEST_CASE("constant training signals have zero variance") {
  Dataset ds = tiny_dataset(20, 16);
  for (double& v : ds.signals) v = 0.5;
  CHECK_THROWS_AS(fit_normalization(ds), ZeroStd);
  ds.split_frames = {0, 10, 10};
  CHECK_THROWS_AS(fit_normalization(ds), ConfigError);
}

TEST_CASE("window starts stay inside their split") {
  const Dataset ds = tiny_dataset(40, 16);  // splits 28/4/8, span 4
  const auto train = window_starts(ds, Split::kTrain);
  const auto val = window_starts(ds, Split::kVal);
  const auto test = window_starts(ds, Split::kTest);
  CHECK(train.size() == 25);  // 28 - 4 + 1
  CHECK(val.size() == 1);     // 4 - 4 + 1
  CHECK(test.size() == 5);    // 8 - 4 + 1
  for (int s : train) CHECK(s + 4 <= 28);  // never leaks into validation
  for (int s : val) {
    CHECK(s >= 28);
    CHECK(s + 4 <= 32);
  }
  for (int s : test) CHECK(s >= 32);
  // chronological, stride 1
  for (std::size_t i = 1; i < train.size(); ++i) CHECK(train[i] == train[i - 1] + 1);
}

TEST_CASE("persistence on a constant signal is exact") {
  Dataset ds = tiny_dataset(20, 16);
  for (std::size_t i = 0; i < ds.signals.size(); ++i) {
    ds.signals[i] = static_cast<double>(i % 16);  // constant in time per node
  }
  const auto rows = persistence_baseline(ds, Split::kTest, {1, 2});
  for (const auto& r : rows) {
    CHECK(r.mae == 0.0);
    CHECK(r.rmse_conventional == 0.0);
  }
}

TEST_CASE("persistence on a linear ramp averages the lead-time errors") {
  Dataset ds = tiny_dataset(40, 16);
  ds.input_len = 2;
  ds.horizon = 3;
  const double slope = 0.1;
  for (int t = 0; t < ds.num_frames; ++t) {
    for (int n = 0; n < ds.num_nodes; ++n) ds.at(t, n, 0) = slope * t;
  }
  const auto rows = persistence_baseline(ds, Split::kTest, {1, 3});
  // lead-time k error is slope*(k+1); horizon-h MAE averages k = 0..h-1
  CHECK(rows[0].mae == doctest::Approx(slope));
  CHECK(rows[1].mae == doctest::Approx(slope * 2.0));
}

TEST_CASE("persistence matches a brute-force oracle") {
  const Dataset ds = tiny_dataset(40, 16);
  const auto rows = persistence_baseline(ds, Split::kVal, {2});

  const auto starts = window_starts(ds, Split::kVal);
  double sum_step[2] = {0.0, 0.0};
  long count = 0;
  for (int s : starts) {
    for (int h = 0; h < 2; ++h) {
      for (int n = 0; n < 16; ++n) {
        sum_step[h] += std::abs(ds.at(s + ds.input_len - 1, n, 0) -
                                ds.at(s + ds.input_len + h, n, 0));
      }
    }
    count += 16;
  }
  const double expect = 0.5 * (sum_step[0] / count + sum_step[1] / count);
  CHECK(rows[0].mae == doctest::Approx(expect).epsilon(1e-12));

  Dataset empty = ds;
  empty.split_frames = {36, 4, 0};
  CHECK_THROWS_AS(persistence_baseline(empty, Split::kTest, {1}), EmptySplit);
}

TEST_CASE("fibonacci lattice is a valid spread-out point set") {
  const auto pts = fibonacci_lattice(100);
  REQUIRE(pts.size() == 100);
  double min_dist = kPi;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(std::abs(norm(pts[i].v) - 1.0) < 1e-12);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      min_dist = std::min(min_dist, geodesic_distance(pts[i], pts[j]));
    }
  }
  CHECK(min_dist > 0.05);  // near-uniform: no clustered duplicates
}

}  // TEST_SUITE
