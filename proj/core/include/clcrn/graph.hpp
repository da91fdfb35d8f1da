// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_GRAPH_HPP
#define CLCRN_GRAPH_HPP

#include <string>
#include <vector>

#include "clcrn/geometry.hpp"

namespace clcrn {

/// Which isometric map feeds the local coordinates.
enum class MapKind { kHorizon, kLog, kFast };

MapKind map_kind_from_string(const std::string& name);
std::string to_string(MapKind kind);

/// Directed K-NN graph under great-circle distance. Every neighbor list
/// starts with the node itself; the self-loop does not consume a K slot.
struct SphericalGraph {
  std::vector<SpherePoint> points;
  int k = 0;
  std::vector<std::vector<int>> neighbors;

  int num_nodes() const { return static_cast<int>(points.size()); }
};

/// Exact K nearest neighbors by geodesic distance (O(N^2)), ties broken by
/// lower node index. Throws TooFewNodes / DuplicatePoints.
SphericalGraph knn_graph(const std::vector<SpherePoint>& points, int k);

struct NeighborRecord {
  int neighbor_index = 0;
  LocalCoord local;
  PolarCoord polar;
  double angle_scale = 1.0;  // in (0, 1]; 1 for the self-loop
};

/// Precomputed per-center geometry consumed by the kernel: local and polar
/// coordinates of every neighbor plus the angular partition. Immutable once
/// built.
struct NeighborhoodGeometry {
  int center_index = 0;
  Vec3 center_position{};
  std::vector<NeighborRecord> records;  // self-loop first, graph order after
};

/// Angular wedge fractions psi/2pi from adjacent angular bisectors, in the
/// input order. Scales are positive and sum to 1. Throws EmptyNeighborhood.
std::vector<double> angle_scales(const std::vector<PolarCoord>& polars);

/// Gaussian radial decay exp(-rho^2 / tau) with tau = softplus(tau_raw) + 1e-6.
double distance_scale(double rho, double tau_raw);

/// softplus(tau_raw) + 1e-6, the positive bandwidth behind distance_scale.
double tau_from_raw(double tau_raw);

/// Inverse of tau_from_raw, used to initialize tau_raw from a target tau.
double raw_from_tau(double tau);

/// Applies the selected map to every neighborhood. Pole centers fall back to
/// pole_local_coords regardless of map kind.
std::vector<NeighborhoodGeometry> neighborhood_geometry(
    const SphericalGraph& graph, MapKind map_kind);

}  // namespace clcrn

#endif
