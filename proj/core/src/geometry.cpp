// SPDX-License-Identifier: Apache-2.0
#include "clcrn/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "clcrn/errors.hpp"

namespace clcrn {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

Vec3 sub3(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
}  // namespace

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

SpherePoint::SpherePoint(const Vec3& xyz) : v(xyz) {
  const double n = norm(v);
  if (std::abs(n - 1.0) > 1e-9) {
    throw BadCoordinate("SpherePoint: vector norm " + std::to_string(n) +
                        " deviates from 1 beyond 1e-9");
  }
}

SpherePoint SpherePoint::from_lat_lon(double theta, double phi) {
  SpherePoint p;
  const double c = std::cos(theta);
  p.v = {c * std::cos(phi), c * std::sin(phi), std::sin(theta)};
  return p;
}

double SpherePoint::lat() const { return std::asin(std::clamp(v[2], -1.0, 1.0)); }

double SpherePoint::lon() const { return std::atan2(v[1], v[0]); }

bool SpherePoint::is_pole() const { return std::abs(v[2]) >= 1.0 - kPoleTolerance; }

double geodesic_distance(const SpherePoint& x, const SpherePoint& y) {
  return std::acos(std::clamp(dot(x.v, y.v), -1.0, 1.0));
}

Vec3 log_map(const SpherePoint& center, const SpherePoint& neighbor) {
  const double d = geodesic_distance(center, neighbor);
  if (d <= 1e-9) return {0.0, 0.0, 0.0};
  if (d >= kPi - 1e-9) {
    throw DegenerateMap("log_map: antipodal neighbor, direction undefined");
  }
  // Normalized projection of (neighbor - center) onto the tangent plane.
  Vec3 w = sub3(neighbor.v, center.v);
  const double wn = norm(w);
  Vec3 wu = {w[0] / wn, w[1] / wn, w[2] / wn};
  const double c = dot(center.v, wu);
  Vec3 p = {wu[0] - c * center.v[0], wu[1] - c * center.v[1],
            wu[2] - c * center.v[2]};
  const double pn = norm(p);
  return {d * p[0] / pn, d * p[1] / pn, d * p[2] / pn};
}

Vec3 horizon_map(const SpherePoint& center, const SpherePoint& neighbor) {
  if (center.is_pole()) {
    throw PoleCenter("horizon_map: center is a pole; use pole_local_coords");
  }
  const double d = geodesic_distance(center, neighbor);
  if (d <= 1e-9) return {0.0, 0.0, 0.0};
  // 2-D normalized projection of (neighbor^- - center^-) orthogonal to
  // center^-, concatenated with the vertical difference.
  const double cx = center.v[0], cy = center.v[1];
  const double cn = std::sqrt(cx * cx + cy * cy);
  double wx = neighbor.v[0] - cx;
  double wy = neighbor.v[1] - cy;
  const double wn = std::sqrt(wx * wx + wy * wy);
  double px = 0.0, py = 0.0;
  if (wn > 0.0) {
    wx /= wn;
    wy /= wn;
    const double c = (cx * wx + cy * wy) / cn;
    px = wx - c * cx / cn;
    py = wy - c * cy / cn;
  }
  Vec3 u = {px, py, neighbor.v[2] - center.v[2]};
  const double un = norm(u);
  if (un <= 1e-12) {
    throw DegenerateMap("horizon_map: direction vector degenerates");
  }
  return {d * u[0] / un, d * u[1] / un, d * u[2] / un};
}

LocalFrame local_frame(const SpherePoint& center) {
  if (center.is_pole()) {
    throw PoleCenter("local_frame: undefined at poles");
  }
  const double phi = std::atan2(center.v[1], center.v[0]);
  LocalFrame f;
  f.e_phi = {-std::sin(phi), std::cos(phi), 0.0};
  f.e_z = {0.0, 0.0, 1.0};
  return f;
}

LocalCoord to_local_coords(const LocalFrame& frame, const Vec3& v) {
  return {dot(v, frame.e_phi), dot(v, frame.e_z)};
}

LocalCoord fast_local_coords(const SpherePoint& center,
                             const SpherePoint& neighbor) {
  const double dtheta = neighbor.lat() - center.lat();
  double dphi = neighbor.lon() - center.lon();
  if (dphi > kPi) {
    dphi -= 2.0 * kPi;
  } else if (dphi < -kPi) {
    dphi += 2.0 * kPi;
  }
  return {dphi, dtheta};
}

LocalCoord pole_local_coords(const SpherePoint& pole,
                             const SpherePoint& neighbor) {
  if (!pole.is_pole()) {
    throw NotAPole("pole_local_coords: center is not a pole");
  }
  const double d = geodesic_distance(pole, neighbor);
  return {0.0, pole.v[2] > 0.0 ? -d : d};
}

PolarCoord to_polar(const LocalCoord& c) {
  PolarCoord p;
  p.rho = std::hypot(c.phi_rel, c.z_rel);
  if (p.rho == 0.0) return p;
  p.varphi = std::atan2(c.z_rel, c.phi_rel);
  if (p.varphi < 0.0) p.varphi += 2.0 * kPi;
  return p;
}

}  // namespace clcrn
