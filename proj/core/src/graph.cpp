// SPDX-License-Identifier: Apache-2.0
#include "clcrn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clcrn/errors.hpp"

namespace clcrn {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

MapKind map_kind_from_string(const std::string& name) {
  if (name == "horizon") return MapKind::kHorizon;
  if (name == "log") return MapKind::kLog;
  if (name == "fast") return MapKind::kFast;
  throw ConfigError("unknown map kind '" + name + "' (horizon|log|fast)");
}

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::kHorizon: return "horizon";
    case MapKind::kLog: return "log";
    case MapKind::kFast: return "fast";
  }
  return "horizon";
}

SphericalGraph knn_graph(const std::vector<SpherePoint>& points, int k) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || n < k + 1) {
    throw TooFewNodes("knn_graph: need at least k+1 = " + std::to_string(k + 1) +
                      " nodes, got " + std::to_string(n));
  }
  SphericalGraph g;
  g.points = points;
  g.k = k;
  g.neighbors.resize(n);

  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      dist[j] = {geodesic_distance(points[i], points[j]), j};
    }
    for (int j = 0; j < n; ++j) {
      if (j != i && dist[j].first <= 1e-9) {
        throw DuplicatePoints("knn_graph: nodes " + std::to_string(i) + " and " +
                              std::to_string(j) + " coincide");
      }
    }
    dist[i] = {std::numeric_limits<double>::infinity(), i};  // exclude self
    std::sort(dist.begin(), dist.end());  // ties broken by lower index
    auto& nbrs = g.neighbors[i];
    nbrs.reserve(k + 1);
    nbrs.push_back(i);
    for (int m = 0; m < k; ++m) nbrs.push_back(dist[m].second);
  }
  return g;
}

std::vector<double> angle_scales(const std::vector<PolarCoord>& polars) {
  const int m = static_cast<int>(polars.size());
  if (m == 0) throw EmptyNeighborhood("angle_scales: no non-self neighbors");
  if (m == 1) return {1.0};

  std::vector<std::pair<double, int>> order(m);
  for (int i = 0; i < m; ++i) order[i] = {polars[i].varphi, i};
  // Sort by (varphi, index); coincident angles get the later-indexed
  // neighbor nudged up so wedges stay non-degenerate and deterministic.
  std::sort(order.begin(), order.end());
  for (int i = 1; i < m; ++i) {
    if (order[i].first <= order[i - 1].first) {
      order[i].first = order[i - 1].first + 1e-9;
    }
  }

  // Bisector between sorted neighbors t and t+1 (circular).
  std::vector<double> bisector(m);
  for (int t = 0; t < m; ++t) {
    const double a = order[t].first;
    const double b = (t + 1 < m) ? order[t + 1].first : order[0].first + 2.0 * kPi;
    bisector[t] = 0.5 * (a + b);
  }
  std::vector<double> scales(m, 0.0);
  for (int t = 0; t < m; ++t) {
    const double lo = (t == 0) ? bisector[m - 1] - 2.0 * kPi : bisector[t - 1];
    scales[order[t].second] = (bisector[t] - lo) / (2.0 * kPi);
  }
  return scales;
}

double tau_from_raw(double tau_raw) {
  // Numerically stable softplus.
  const double sp = tau_raw > 30.0 ? tau_raw : std::log1p(std::exp(tau_raw));
  return sp + 1e-6;
}

double raw_from_tau(double tau) {
  const double sp = std::max(tau - 1e-6, 1e-12);
  return sp > 30.0 ? sp : std::log(std::expm1(sp));
}

double distance_scale(double rho, double tau_raw) {
  return std::exp(-rho * rho / tau_from_raw(tau_raw));
}

std::vector<NeighborhoodGeometry> neighborhood_geometry(
    const SphericalGraph& graph, MapKind map_kind) {
  std::vector<NeighborhoodGeometry> out(graph.num_nodes());
  for (int i = 0; i < graph.num_nodes(); ++i) {
    const SpherePoint& center = graph.points[i];
    NeighborhoodGeometry& geom = out[i];
    geom.center_index = i;
    geom.center_position = center.v;
    const auto& nbrs = graph.neighbors[i];
    geom.records.resize(nbrs.size());

    const bool pole = center.is_pole();
    LocalFrame frame;
    Vec3 log_e_phi{}, log_e_z{};
    if (!pole) {
      frame = local_frame(center);
      if (map_kind == MapKind::kLog) {
        // Tangent-plane frame: e_phi is already tangent; project e_z onto the
        // tangent plane and renormalize.
        log_e_phi = frame.e_phi;
        const double c = center.v[2];
        Vec3 ez = {-c * center.v[0], -c * center.v[1], 1.0 - c * center.v[2]};
        const double n = norm(ez);
        log_e_z = {ez[0] / n, ez[1] / n, ez[2] / n};
      }
    }

    std::vector<PolarCoord> nonself_polars;
    std::vector<int> nonself_slots;
    for (std::size_t s = 0; s < nbrs.size(); ++s) {
      const int j = nbrs[s];
      NeighborRecord& rec = geom.records[s];
      rec.neighbor_index = j;
      if (j == i) {
        rec.local = {0.0, 0.0};
        rec.polar = {0.0, 0.0};
        rec.angle_scale = 1.0;
        continue;
      }
      const SpherePoint& nb = graph.points[j];
      if (pole) {
        rec.local = pole_local_coords(center, nb);
      } else {
        switch (map_kind) {
          case MapKind::kHorizon:
            rec.local = to_local_coords(frame, horizon_map(center, nb));
            break;
          case MapKind::kLog: {
            const Vec3 v = log_map(center, nb);
            rec.local = {dot(v, log_e_phi), dot(v, log_e_z)};
            break;
          }
          case MapKind::kFast:
            rec.local = fast_local_coords(center, nb);
            break;
        }
      }
      rec.polar = to_polar(rec.local);
      nonself_polars.push_back(rec.polar);
      nonself_slots.push_back(static_cast<int>(s));
    }
    if (!nonself_polars.empty()) {
      const std::vector<double> scales = angle_scales(nonself_polars);
      for (std::size_t t = 0; t < nonself_slots.size(); ++t) {
        geom.records[nonself_slots[t]].angle_scale = scales[t];
      }
    }
  }
  return out;
}

}  // namespace clcrn
