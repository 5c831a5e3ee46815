#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "sfbm/sphere_geom.hpp"

using namespace sfbm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SpherePoint random_half_sphere_point(int d, std::mt19937_64& rng) {
  SpherePoint p = sample_uniform(d, rng);
  if (p[0] < 0.0) {
    std::vector<double> c = p.coords();
    c[0] = -c[0];
    return SpherePoint(std::move(c));
  }
  return p;
}

double plane_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("SpherePoint normalizes and validates") {
  const SpherePoint p(std::vector<double>{3.0, 4.0});
  CHECK_THAT(p[0], WithinRel(0.6, 1e-14));
  CHECK_THAT(p[1], WithinRel(0.8, 1e-14));
  CHECK_THROWS_AS(SpherePoint(std::vector<double>{0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SpherePoint(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("geodesic distances") {
  const SpherePoint o = SpherePoint::north_pole(3);
  CHECK(geodesic(o, o) == 0.0);
  const SpherePoint anti({-1.0, 0.0, 0.0});
  CHECK_THAT(geodesic(o, anti), WithinRel(M_PI, 1e-14));
  const SpherePoint orth({0.0, 1.0, 0.0});
  CHECK_THAT(geodesic(o, orth), WithinRel(M_PI / 2.0, 1e-14));
  CHECK_THROWS_AS(geodesic(o, SpherePoint::north_pole(4)), std::invalid_argument);
}

TEST_CASE("in_cap membership") {
  const SpherePoint o = SpherePoint::north_pole(3);
  CHECK(in_cap(o, o, 0.0));
  CHECK_FALSE(in_cap(SpherePoint({-1.0, 0.0, 0.0}), o, 3.0));
  CHECK(in_cap(SpherePoint({-1.0, 0.0, 0.0}), o, M_PI));
}

TEST_CASE("projection fixes the pole and preserves pole distances") {
  const SpherePoint o = SpherePoint::north_pole(4);
  const auto zero = project_ae(o);
  for (double x : zero) CHECK(x == 0.0);

  const SpherePoint equator({0.0, 0.0, 1.0, 0.0});
  const auto eq = project_ae(equator);
  CHECK_THAT(plane_distance(eq, std::vector<double>(3, 0.0)),
             WithinRel(M_PI / 2.0, 1e-12));

  std::mt19937_64 rng(10);
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint p = random_half_sphere_point(3, rng);
    const auto img = project_ae(p);
    double norm = 0.0;
    for (double x : img) norm += x * x;
    CHECK_THAT(std::sqrt(norm),
               WithinAbs(geodesic(p, SpherePoint::north_pole(3)), 1e-12));
  }
  CHECK_THROWS_AS(project_ae(SpherePoint({-0.5, 0.8, std::sqrt(1 - 0.25 - 0.64)})),
                  std::domain_error);
}

TEST_CASE("projection round-trips through its inverse") {
  std::mt19937_64 rng(11);
  for (int d : {2, 3, 5}) {
    for (int i = 0; i < 3500; ++i) {
      const SpherePoint p = random_half_sphere_point(d, rng);
      const SpherePoint back = project_ae_inverse(project_ae(p));
      for (int k = 0; k < d; ++k) {
        CHECK_THAT(back[k], WithinAbs(p[k], 1e-10));
      }
    }
  }
}

TEST_CASE("comparison inequality on the half-sphere") {
  std::mt19937_64 rng(12);
  for (int d : {2, 3, 4, 6}) {
    for (int i = 0; i < 10000; ++i) {
      const SpherePoint a = random_half_sphere_point(d, rng);
      const SpherePoint b = random_half_sphere_point(d, rng);
      CHECK(geodesic(a, b) <=
            plane_distance(project_ae(a), project_ae(b)) + 1e-12);
    }
  }
}

TEST_CASE("uniform sampling statistics") {
  std::mt19937_64 rng1(99), rng2(99);
  const SpherePoint a = sample_uniform(4, rng1);
  const SpherePoint b = sample_uniform(4, rng2);
  for (int i = 0; i < 4; ++i) CHECK(a[i] == b[i]);

  std::mt19937_64 rng(100);
  const int n = 100000;
  std::vector<double> mean(3, 0.0);
  double mean_inner = 0.0;
  for (int i = 0; i < n; ++i) {
    const SpherePoint p = sample_uniform(3, rng);
    for (int k = 0; k < 3; ++k) mean[k] += p[k] / n;
    mean_inner += p[0] / n;
  }
  double norm = 0.0;
  for (double m : mean) norm += m * m;
  CHECK(std::sqrt(norm) <= 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(mean_inner) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("grids: weights, kinds, and quality") {
  {
    const SphereGrid g = make_grid(2, GridKind::equiangular_d2, 4);
    REQUIRE(g.size() == 4);
    CHECK_THAT(g.points[0][0], WithinRel(1.0, 1e-14));
    CHECK_THAT(g.points[1][1], WithinRel(1.0, 1e-14));
    for (double w : g.weights) CHECK_THAT(w, WithinRel(M_PI / 2.0, 1e-13));
  }
  {
    const SphereGrid g = make_grid(3, GridKind::fibonacci_d3, 1000);
    double total = 0.0;
    for (double w : g.weights) total += w;
    CHECK_THAT(total, WithinRel(sphere_area(3), 1e-9));
    double min_sep = M_PI;
    for (std::size_t i = 0; i < 200; ++i) {
      for (std::size_t j = i + 1; j < 200; ++j) {
        min_sep = std::min(min_sep, geodesic(g.points[i], g.points[j]));
      }
    }
    CHECK(min_sep > 0.02);
  }
  {
    const SphereGrid g = make_grid(5, GridKind::random_uniform, 128, 7);
    double total = 0.0;
    for (double w : g.weights) total += w;
    CHECK_THAT(total, WithinRel(sphere_area(5), 1e-9));
    const SphereGrid g2 = make_grid(5, GridKind::random_uniform, 128, 7);
    CHECK(g.points[17][3] == g2.points[17][3]);
  }
  CHECK_THROWS_AS(make_grid(3, GridKind::equiangular_d2, 8),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, GridKind::fibonacci_d3, 8),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, GridKind::fibonacci_d3, 1), std::domain_error);
}

TEST_CASE("surface Monte Carlo integration") {
  std::mt19937_64 rng(2025);
  const McEstimate c = surface_mc_integral(
      [](const SpherePoint&) { return 1.0; }, 3, 1000, rng);
  CHECK_THAT(c.estimate, WithinRel(4.0 * M_PI, 1e-12));
  CHECK_THAT(c.std_error, WithinAbs(0.0, 1e-12));

  const McEstimate q = surface_mc_integral(
      [](const SpherePoint& p) { return p[0] * p[0]; }, 3, 200000, rng);
  CHECK_THAT(q.estimate, WithinAbs(4.0 * M_PI / 3.0, 3.0 * q.std_error));

  CHECK_THROWS_AS(surface_mc_integral([](const SpherePoint&) { return 1.0; }, 3,
                                      10, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      surface_mc_integral(
          [](const SpherePoint& p) { return 1.0 / (p[0] - p[0]); }, 3, 1000, rng),
      std::runtime_error);
}
