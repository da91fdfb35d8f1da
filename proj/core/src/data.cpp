// SPDX-License-Identifier: Apache-2.0
#include "clcrn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clcrn/errors.hpp"
#include "clcrn/graph.hpp"
#include "clcrn/rng.hpp"

namespace clcrn {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kDegToRad = kPi / 180.0;

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

SpherePoint point_from_deg(double lat_deg, double lon_deg) {
  if (lat_deg < -90.0 || lat_deg > 90.0) {
    throw BadCoordinate("latitude " + std::to_string(lat_deg) +
                        " outside [-90, 90]");
  }
  if (lon_deg <= -180.0 || lon_deg > 180.0) {
    throw BadCoordinate("longitude " + std::to_string(lon_deg) +
                        " outside (-180, 180]");
  }
  return SpherePoint::from_lat_lon(lat_deg * kDegToRad, lon_deg * kDegToRad);
}

}  // namespace

int Dataset::split_begin(Split s) const {
  switch (s) {
    case Split::kTrain: return 0;
    case Split::kVal: return split_frames[0];
    case Split::kTest: return split_frames[0] + split_frames[1];
  }
  return 0;
}

int Dataset::split_end(Split s) const {
  switch (s) {
    case Split::kTrain: return split_frames[0];
    case Split::kVal: return split_frames[0] + split_frames[1];
    case Split::kTest: return split_frames[0] + split_frames[1] + split_frames[2];
  }
  return 0;
}

Dataset load_dataset(const std::string& meta_path) {
  const json meta = read_json_file(meta_path);
  Dataset ds;
  try {
    ds.num_nodes = meta.at("n").get<int>();
    ds.num_frames = meta.at("t").get<int>();
    ds.dim = meta.at("d").get<int>();
    const auto splits = meta.at("splits");
    ds.split_frames = {splits.at(0).get<int>(), splits.at(1).get<int>(),
                       splits.at(2).get<int>()};
    const auto window = meta.at("window");
    ds.input_len = window.at(0).get<int>();
    ds.horizon = window.at(1).get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(meta_path + ": " + e.what());
  }

  const std::filesystem::path base = std::filesystem::path(meta_path).parent_path();
  const std::string coords_path = base / meta.at("coords_csv").get<std::string>();
  const std::string signals_path = base / meta.at("signals_bin").get<std::string>();

  std::ifstream coords(coords_path);
  if (!coords) throw MissingFile("cannot open " + coords_path);
  std::string line;
  std::getline(coords, line);  // header node_id,lat_deg,lon_deg
  while (std::getline(coords, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');  // node_id
    double lat = 0.0, lon = 0.0;
    std::getline(ss, field, ',');
    lat = std::stod(field);
    std::getline(ss, field, ',');
    lon = std::stod(field);
    ds.coords.push_back({lat, lon});
    ds.points.push_back(point_from_deg(lat, lon));
  }
  if (static_cast<int>(ds.points.size()) != ds.num_nodes) {
    throw SizeMismatch("coordinate rows " + std::to_string(ds.points.size()) +
                       " vs declared n = " + std::to_string(ds.num_nodes));
  }

  std::ifstream blob(signals_path, std::ios::binary | std::ios::ate);
  if (!blob) throw MissingFile("cannot open " + signals_path);
  const std::uintmax_t actual = static_cast<std::uintmax_t>(blob.tellg());
  const std::uintmax_t expected = 8ULL * ds.num_frames * ds.num_nodes * ds.dim;
  if (actual != expected) {
    throw SizeMismatch("signals blob is " + std::to_string(actual) +
                       " bytes, expected " + std::to_string(expected));
  }
  blob.seekg(0);
  ds.signals.resize(static_cast<std::size_t>(ds.num_frames) * ds.num_nodes * ds.dim);
  blob.read(reinterpret_cast<char*>(ds.signals.data()),
            static_cast<std::streamsize>(expected));

  fit_normalization(ds);
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);

  {
    std::ofstream coords(base / "coords.csv");
    coords << "node_id,lat_deg,lon_deg\n";
    char buf[96];
    for (std::size_t i = 0; i < ds.coords.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, ds.coords[i][0],
                    ds.coords[i][1]);
      coords << buf;
    }
  }
  {
    std::ofstream blob(base / "signals.bin", std::ios::binary);
    blob.write(reinterpret_cast<const char*>(ds.signals.data()),
               static_cast<std::streamsize>(sizeof(double) * ds.signals.size()));
  }
  {
    json meta;
    meta["n"] = ds.num_nodes;
    meta["t"] = ds.num_frames;
    meta["d"] = ds.dim;
    meta["coords_csv"] = "coords.csv";
    meta["signals_bin"] = "signals.bin";
    meta["splits"] = {ds.split_frames[0], ds.split_frames[1], ds.split_frames[2]};
    meta["window"] = {ds.input_len, ds.horizon};
    std::ofstream out(base / "meta.json");
    out << meta.dump(2) << "\n";
  }
}

void fit_normalization(Dataset& ds) {
  const int train_frames = ds.split_frames[0];
  if (train_frames <= 0) throw ConfigError("dataset has no training frames");
  ds.mean.assign(ds.dim, 0.0);
  ds.stddev.assign(ds.dim, 0.0);
  const long count = static_cast<long>(train_frames) * ds.num_nodes;
  for (int d = 0; d < ds.dim; ++d) {
    double sum = 0.0;
    for (int t = 0; t < train_frames; ++t) {
      for (int n = 0; n < ds.num_nodes; ++n) sum += ds.at(t, n, d);
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (int t = 0; t < train_frames; ++t) {
      for (int n = 0; n < ds.num_nodes; ++n) {
        const double e = ds.at(t, n, d) - mean;
        sq += e * e;
      }
    }
    const double sd = std::sqrt(sq / static_cast<double>(count));
    if (sd <= 0.0) {
      throw ZeroStd("signal dimension " + std::to_string(d) +
                    " has zero variance on the training split");
    }
    ds.mean[d] = mean;
    ds.stddev[d] = sd;
  }
}

std::vector<SpherePoint> fibonacci_lattice(int n_nodes) {
  std::vector<SpherePoint> points;
  points.reserve(n_nodes);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n_nodes; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n_nodes;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * i;
    SpherePoint p;
    p.v = {r * std::cos(a), r * std::sin(a), z};
    points.push_back(p);
  }
  return points;
}

Dataset gen_synthetic(int n_nodes, const AdvectionParams& params,
                      double* stability_margin) {
  if (n_nodes < 16) {
    throw ConfigError("gen_synthetic: need at least 16 nodes, got " +
                      std::to_string(n_nodes));
  }
  if (params.kappa < 0.0 || params.alpha < 0.0 || params.steps < 2) {
    throw ConfigError("gen_synthetic: invalid advection parameters");
  }

  Dataset ds;
  ds.num_nodes = n_nodes;
  ds.num_frames = params.steps;
  ds.dim = 1;
  ds.points = fibonacci_lattice(n_nodes);
  ds.coords.reserve(n_nodes);
  for (const SpherePoint& p : ds.points) {
    ds.coords.push_back({p.lat() / kDegToRad, p.lon() / kDegToRad});
  }

  Rng rng(params.seed);

  // Initial field: sum of random spherical Gaussian bumps.
  std::vector<double> field(n_nodes, 0.0);
  for (int b = 0; b < params.bumps; ++b) {
    const double z = rng.uniform(-1.0, 1.0);
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    SpherePoint c;
    c.v = {r * std::cos(a), r * std::sin(a), z};
    const double sigma = rng.uniform(0.3, 0.7);
    const double amp = rng.uniform(0.5, 1.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    for (int i = 0; i < n_nodes; ++i) {
      const double d = geodesic_distance(ds.points[i], c);
      field[i] += amp * std::exp(-d * d / (2.0 * sigma * sigma));
    }
  }

  // Direction-biased diffusion stencil.
  const SphericalGraph graph = knn_graph(ds.points, params.knn);
  std::vector<std::vector<std::pair<int, double>>> stencil(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const SpherePoint& center = ds.points[i];
    const bool pole = center.is_pole();
    LocalFrame frame;
    if (!pole) frame = local_frame(center);
    double total = 0.0;
    auto& row = stencil[i];
    for (int j : graph.neighbors[i]) {
      if (j == i) continue;
      LocalCoord lc = pole ? pole_local_coords(center, ds.points[j])
                           : to_local_coords(frame, horizon_map(center, ds.points[j]));
      const double bearing = std::atan2(lc.z_rel, lc.phi_rel);
      const double w =
          std::max(0.0, 1.0 + params.alpha * std::cos(bearing - params.drift_bearing));
      row.push_back({j, w});
      total += w;
    }
    if (total <= 0.0) {
      for (auto& [j, w] : row) w = 1.0 / static_cast<double>(row.size());
    } else {
      for (auto& [j, w] : row) w /= total;
    }
  }
  if (params.symmetrize) {
    std::vector<std::vector<std::pair<int, double>>> sym(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      for (const auto& [j, w] : stencil[i]) {
        sym[i].push_back({j, 0.5 * w});
        sym[j].push_back({i, 0.5 * w});
      }
    }
    stencil = std::move(sym);
  }
  double max_row_sum = 0.0;
  for (const auto& row : stencil) {
    double s = 0.0;
    for (const auto& [j, w] : row) s += w;
    max_row_sum = std::max(max_row_sum, s);
  }
  // With per-center normalized weights the row sum is 1, so the explicit
  // update is contractive iff kappa * max_row_sum < 1.
  if (params.kappa * max_row_sum >= 1.0) {
    throw StabilityViolated("gen_synthetic: kappa * row-sum = " +
                            std::to_string(params.kappa * max_row_sum) +
                            " >= 1");
  }
  if (stability_margin) *stability_margin = 1.0 - params.kappa * max_row_sum;

  // Spatial anomaly energy of the initial field; each diffusion step is
  // followed by a rescale back to this level so the signal never decays to a
  // constant (forcing that balances dissipation).
  auto mean_std = [n_nodes](const std::vector<double>& f) {
    double mean = 0.0;
    for (double v : f) mean += v;
    mean /= static_cast<double>(n_nodes);
    double sq = 0.0;
    for (double v : f) sq += (v - mean) * (v - mean);
    return std::pair<double, double>(
        mean, std::sqrt(sq / static_cast<double>(n_nodes)));
  };
  const auto [target_mean, target_std] = mean_std(field);

  ds.signals.resize(static_cast<std::size_t>(params.steps) * n_nodes);
  std::vector<double> next(n_nodes, 0.0);
  for (int t = 0; t < params.steps; ++t) {
    std::copy(field.begin(), field.end(),
              ds.signals.begin() + static_cast<std::size_t>(t) * n_nodes);
    if (t + 1 == params.steps) break;
    for (int i = 0; i < n_nodes; ++i) {
      double flux = 0.0;
      for (const auto& [j, w] : stencil[i]) flux += w * (field[j] - field[i]);
      next[i] = field[i] + params.kappa * flux;
    }
    const auto [mean, sd] = mean_std(next);
    if (sd > 0.0 && target_std > 0.0) {
      const double s = target_std / sd;
      if (s != 1.0 || mean != target_mean) {
        for (double& v : next) v = target_mean + (v - mean) * s;
      }
    }
    field.swap(next);
  }

  const int train = static_cast<int>(std::floor(params.steps * params.train_frac));
  const int val = static_cast<int>(std::floor(params.steps * params.val_frac));
  ds.split_frames = {train, val, params.steps - train - val};
  fit_normalization(ds);
  return ds;
}

std::vector<int> window_starts(const Dataset& ds, Split split) {
  const int begin = ds.split_begin(split);
  const int end = ds.split_end(split);
  const int span = ds.input_len + ds.horizon;
  std::vector<int> starts;
  for (int s = begin; s + span <= end; ++s) starts.push_back(s);
  return starts;
}

std::vector<MetricsRow> persistence_baseline(const Dataset& ds, Split split,
                                             const std::vector<int>& horizons) {
  const std::vector<int> starts = window_starts(ds, split);
  if (starts.empty()) throw EmptySplit("persistence_baseline: split has no windows");
  MetricsAccumulator acc(ds.horizon);
  const std::size_t frame = static_cast<std::size_t>(ds.num_nodes) * ds.dim;
  for (int s : starts) {
    const double* last = &ds.signals[(static_cast<std::size_t>(s) + ds.input_len - 1) * frame];
    for (int h = 0; h < ds.horizon; ++h) {
      const double* truth =
          &ds.signals[(static_cast<std::size_t>(s) + ds.input_len + h) * frame];
      acc.add_frame(h, last, truth, frame);
    }
  }
  std::vector<MetricsRow> rows;
  for (int h : horizons) rows.push_back(acc.at_horizon(h));
  return rows;
}

}  // namespace clcrn
