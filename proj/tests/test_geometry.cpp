// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <doctest.h>

#include "clcrn/errors.hpp"
#include "clcrn/geometry.hpp"
#include "clcrn/rng.hpp"

using namespace clcrn;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

SpherePoint random_point(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double a = rng.uniform(0.0, 2.0 * kPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  SpherePoint p;
  p.v = {r * std::cos(a), r * std::sin(a), z};
  return p;
}
}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("geodesic distance hand cases") {
  SpherePoint x, y;
  x.v = {1, 0, 0};
  y.v = {1, 0, 0};
  CHECK(geodesic_distance(x, y) == doctest::Approx(0.0));
  y.v = {-1, 0, 0};
  CHECK(geodesic_distance(x, y) == doctest::Approx(kPi));
  y.v = {0, 1, 0};
  CHECK(geodesic_distance(x, y) == doctest::Approx(kPi / 2));
  // symmetry
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const SpherePoint a = random_point(rng), b = random_point(rng);
    CHECK(geodesic_distance(a, b) == doctest::Approx(geodesic_distance(b, a)));
  }
}

TEST_CASE("unit norm enforced") {
  CHECK_THROWS_AS(SpherePoint({1.0, 1.0, 0.0}), BadCoordinate);
  CHECK_NOTHROW(SpherePoint({0.0, 0.0, 1.0}));
}

TEST_CASE("lat/lon round trip away from poles") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const double lat = rng.uniform(-1.4, 1.4);
    const double lon = rng.uniform(-kPi, kPi);
    const SpherePoint p = SpherePoint::from_lat_lon(lat, lon);
    CHECK(std::abs(p.lat() - lat) < 1e-9);
    CHECK(std::abs(p.lon() - lon) < 1e-9);
  }
}

TEST_CASE("log map hand cases") {
  SpherePoint c, n;
  c.v = {1, 0, 0};
  n.v = {1, 0, 0};
  const Vec3 zero = log_map(c, n);
  CHECK(norm(zero) == doctest::Approx(0.0));

  n.v = {0, 0, 1};
  const Vec3 v = log_map(c, n);
  CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v[2] == doctest::Approx(kPi / 2));

  n.v = {-1, 0, 0};
  CHECK_THROWS_AS(log_map(c, n), DegenerateMap);
}

TEST_CASE("log map isometry and tangency") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint c = random_point(rng), n = random_point(rng);
    const double d = geodesic_distance(c, n);
    if (d <= 1e-6 || d >= kPi - 1e-6) continue;
    const Vec3 v = log_map(c, n);
    CHECK(std::abs(norm(v) - d) < 1e-9);
    CHECK(std::abs(dot(v, c.v)) < 1e-9);
  }
}

TEST_CASE("horizon map hand cases") {
  SpherePoint c, n;
  c.v = {1, 0, 0};
  n.v = {0, 1, 0};
  const Vec3 v = horizon_map(c, n);
  CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(kPi / 2));
  CHECK(v[2] == doctest::Approx(0.0).epsilon(1e-12));

  n.v = {1, 0, 0};
  CHECK(norm(horizon_map(c, n)) == doctest::Approx(0.0));

  SpherePoint pole;
  pole.v = {0, 0, 1};
  CHECK_THROWS_AS(horizon_map(pole, n), PoleCenter);
}

TEST_CASE("horizon map isometry and cylindrical orthogonality") {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint c = random_point(rng), n = random_point(rng);
    if (c.is_pole()) continue;
    const double d = geodesic_distance(c, n);
    if (d <= 1e-6 || d >= kPi - 1e-6) continue;
    const Vec3 v = horizon_map(c, n);
    CHECK(std::abs(norm(v) - d) < 1e-9);
    // first two components orthogonal to the center's first two components
    CHECK(std::abs(v[0] * c.v[0] + v[1] * c.v[1]) < 1e-9);
  }
}

TEST_CASE("local frame") {
  SpherePoint c;
  c.v = {1, 0, 0};
  LocalFrame f = local_frame(c);
  CHECK(f.e_phi[0] == doctest::Approx(0.0));
  CHECK(f.e_phi[1] == doctest::Approx(1.0));
  CHECK(f.e_z[2] == doctest::Approx(1.0));

  c.v = {0, 1, 0};
  f = local_frame(c);
  CHECK(f.e_phi[0] == doctest::Approx(-1.0));
  CHECK(f.e_phi[1] == doctest::Approx(0.0).epsilon(1e-12));

  SpherePoint pole;
  pole.v = {0, 0, -1};
  CHECK_THROWS_AS(local_frame(pole), PoleCenter);

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const SpherePoint p = random_point(rng);
    if (p.is_pole()) continue;
    const LocalFrame fr = local_frame(p);
    CHECK(std::abs(dot(fr.e_phi, fr.e_z)) < 1e-12);
    CHECK(norm(fr.e_phi) == doctest::Approx(1.0));
    CHECK(norm(fr.e_z) == doctest::Approx(1.0));
  }
}

TEST_CASE("to_local_coords") {
  SpherePoint c;
  c.v = {1, 0, 0};
  const LocalFrame f = local_frame(c);
  LocalCoord lc = to_local_coords(f, {0.0, kPi / 2, 0.0});
  CHECK(lc.phi_rel == doctest::Approx(kPi / 2));
  CHECK(lc.z_rel == doctest::Approx(0.0));
  lc = to_local_coords(f, {0.0, 0.0, 0.0});
  CHECK(lc.phi_rel == 0.0);
  CHECK(lc.z_rel == 0.0);
  lc = to_local_coords(f, {0.0, 0.0, 0.3});
  CHECK(lc.phi_rel == doctest::Approx(0.0));
  CHECK(lc.z_rel == doctest::Approx(0.3));
}

TEST_CASE("fast_local_coords wrap rule") {
  const SpherePoint same = SpherePoint::from_lat_lon(0.3, 0.4);
  const LocalCoord z = fast_local_coords(same, same);
  CHECK(z.phi_rel == 0.0);
  CHECK(z.z_rel == 0.0);

  // longitude difference of 3pi/2 wraps to -pi/2
  const SpherePoint a = SpherePoint::from_lat_lon(0.0, -3.0 * kPi / 4.0);
  const SpherePoint b = SpherePoint::from_lat_lon(0.0, 3.0 * kPi / 4.0);
  const LocalCoord ab = fast_local_coords(a, b);  // +3pi/2 -> -pi/2
  CHECK(ab.phi_rel == doctest::Approx(-kPi / 2));
  const LocalCoord ba = fast_local_coords(b, a);  // -3pi/2 -> +pi/2
  CHECK(ba.phi_rel == doctest::Approx(kPi / 2));
}

TEST_CASE("pole_local_coords convention") {
  SpherePoint north, south, eq;
  north.v = {0, 0, 1};
  south.v = {0, 0, -1};
  eq.v = {1, 0, 0};
  LocalCoord lc = pole_local_coords(north, eq);
  CHECK(lc.phi_rel == 0.0);
  CHECK(lc.z_rel == doctest::Approx(-kPi / 2));
  lc = pole_local_coords(south, eq);
  CHECK(lc.z_rel == doctest::Approx(kPi / 2));
  lc = pole_local_coords(north, north);
  CHECK(lc.z_rel == doctest::Approx(0.0));
  CHECK_THROWS_AS(pole_local_coords(eq, north), NotAPole);
}

TEST_CASE("to_polar") {
  PolarCoord p = to_polar({1.0, 0.0});
  CHECK(p.varphi == doctest::Approx(0.0));
  CHECK(p.rho == doctest::Approx(1.0));
  p = to_polar({0.0, 1.0});
  CHECK(p.varphi == doctest::Approx(kPi / 2));
  p = to_polar({-1.0, -1.0});
  CHECK(p.varphi == doctest::Approx(5.0 * kPi / 4.0));
  CHECK(p.rho == doctest::Approx(std::sqrt(2.0)));
  p = to_polar({0.0, 0.0});
  CHECK(p.varphi == 0.0);
  CHECK(p.rho == 0.0);
}

TEST_CASE("orientation preservation: eastward neighbor stays due east") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const double lat = rng.uniform(-1.3, 1.3);
    const double lon = rng.uniform(-kPi, kPi);
    const double dlon = rng.uniform(0.01, 3.0);
    const SpherePoint c = SpherePoint::from_lat_lon(lat, lon);
    const SpherePoint n = SpherePoint::from_lat_lon(lat, std::remainder(lon + dlon, 2.0 * kPi));
    const LocalCoord lc = to_local_coords(local_frame(c), horizon_map(c, n));
    CHECK(std::abs(lc.z_rel) < 1e-9);
    CHECK(lc.phi_rel > 0.0);
  }
}

TEST_CASE("distance consistency through polar form") {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const SpherePoint c = random_point(rng), n = random_point(rng);
    if (c.is_pole()) continue;
    const double d = geodesic_distance(c, n);
    if (d <= 1e-6 || d >= kPi - 1e-6) continue;
    const PolarCoord p = to_polar(to_local_coords(local_frame(c), horizon_map(c, n)));
    CHECK(std::abs(p.rho - d) < 1e-9);
  }
}

TEST_CASE("fast coordinates agree in quadrant with the exact map nearby") {
  Rng rng(99);
  int checked = 0;
  while (checked < 1000) {
    const SpherePoint c = random_point(rng);
    if (c.is_pole() || std::abs(c.lat()) > 1.4) continue;
    const double d = rng.uniform(0.01, 0.2);
    const double bearing = rng.uniform(0.0, 2.0 * kPi);
    const SpherePoint n = SpherePoint::from_lat_lon(
        c.lat() + d * std::sin(bearing),
        std::remainder(c.lon() + d * std::cos(bearing), 2.0 * kPi));
    if (std::abs(n.lat()) > 1.5) continue;
    const LocalCoord exact = to_local_coords(local_frame(c), horizon_map(c, n));
    const LocalCoord fast = fast_local_coords(c, n);
    if (std::abs(exact.phi_rel) < 1e-4 || std::abs(exact.z_rel) < 1e-4) continue;
    CHECK(std::signbit(exact.phi_rel) == std::signbit(fast.phi_rel));
    CHECK(std::signbit(exact.z_rel) == std::signbit(fast.z_rel));
    ++checked;
  }
}

}  // TEST_SUITE
