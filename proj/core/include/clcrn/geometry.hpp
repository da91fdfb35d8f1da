// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_GEOMETRY_HPP
#define CLCRN_GEOMETRY_HPP

#include <array>

namespace clcrn {

using Vec3 = std::array<double, 3>;

/// A position on the unit sphere. Stored as a 3-vector; latitude/longitude
/// are derived views. All angles are radians.
struct SpherePoint {
  Vec3 v{1.0, 0.0, 0.0};

  SpherePoint() = default;
  explicit SpherePoint(const Vec3& xyz);

  /// Latitude in [-pi/2, pi/2] and longitude in (-pi, pi].
  static SpherePoint from_lat_lon(double theta, double phi);
  double lat() const;
  double lon() const;

  bool is_pole() const;
};

/// Unified orthogonal basis of the cylindrical-tangent space: e_z is the
/// global pole axis, e_phi points due east at the center's longitude.
struct LocalFrame {
  Vec3 e_phi{0.0, 1.0, 0.0};
  Vec3 e_z{0.0, 0.0, 1.0};
};

/// Relative position of a neighbor in a center's local coordinate system.
struct LocalCoord {
  double phi_rel = 0.0;  // along e_phi (east)
  double z_rel = 0.0;    // along e_z (north)
};

struct PolarCoord {
  double varphi = 0.0;  // [0, 2*pi)
  double rho = 0.0;     // >= 0, equals the geodesic distance for isometric maps
};

/// Centers with |v3| >= 1 - 1e-9 are treated as poles; below that e_phi is
/// numerically well-conditioned.
constexpr double kPoleTolerance = 1e-9;

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

/// Great-circle distance arccos(<x, y>), with the inner product clamped to
/// [-1, 1]. Result in [0, pi].
double geodesic_distance(const SpherePoint& x, const SpherePoint& y);

/// Logarithmic map into the tangent space of `center`. Returns the zero
/// vector when neighbor == center; throws DegenerateMap for antipodes.
Vec3 log_map(const SpherePoint& center, const SpherePoint& neighbor);

/// Horizon map into the cylindrical-tangent space of `center`. Returns the
/// zero vector when neighbor == center. Throws PoleCenter at poles (use
/// pole_local_coords there) and DegenerateMap when the direction vector
/// degenerates.
Vec3 horizon_map(const SpherePoint& center, const SpherePoint& neighbor);

/// The unified basis {e_phi, e_z}. Throws PoleCenter at poles.
LocalFrame local_frame(const SpherePoint& center);

/// Coordinates of a cylindrical-tangent vector in the unified basis.
LocalCoord to_local_coords(const LocalFrame& frame, const Vec3& v);

/// Lat/lon difference shortcut with the three-case longitude wrap. The
/// wrapped longitude difference occupies phi_rel, the latitude difference
/// z_rel, matching the axes of the exact transform.
LocalCoord fast_local_coords(const SpherePoint& center,
                             const SpherePoint& neighbor);

/// Relative position convention at the poles: phi_rel = 0 everywhere,
/// z_rel = -distance at the North pole and +distance at the South pole.
LocalCoord pole_local_coords(const SpherePoint& pole,
                             const SpherePoint& neighbor);

/// Polar form (varphi in [0, 2*pi), rho = Cartesian norm). (0, 0) maps to
/// varphi = 0 by convention.
PolarCoord to_polar(const LocalCoord& c);

}  // namespace clcrn

#endif
