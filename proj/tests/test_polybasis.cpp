#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rodrigues_oracle.hpp"
#include "sfbm/polybasis.hpp"
#include "sfbm/sphere_geom.hpp"

using namespace sfbm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Exact moments of w(t) = (1-t^2)^((d-3)/2): zero for odd k, Beta function
// value for even k.
double weight_moment(int d, int k) {
  if (k % 2 == 1) return 0.0;
  return std::exp(std::lgamma((k + 1.0) / 2.0) + std::lgamma((d - 1.0) / 2.0) -
                  std::lgamma((k + d) / 2.0));
}

}  // namespace

TEST_CASE("recurrence matches the symbolic low-degree oracle") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> ts(-1.0, 1.0);
  for (const auto& entry : oracle::rodrigues_table()) {
    const BasisSpec spec(entry.d);
    for (int i = 0; i < 20; ++i) {
      const double t = ts(rng);
      const double want = oracle::eval_poly(entry.coeffs, t);
      CHECK_THAT(legendre_eval(spec, entry.n, t), WithinAbs(want, 1e-12));
    }
  }
}

TEST_CASE("d=2 polynomials are Chebyshev") {
  const BasisSpec spec(2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.0, M_PI);
  for (int n : {0, 1, 3, 17, 100, 200}) {
    for (int i = 0; i < 10; ++i) {
      const double theta = th(rng);
      CHECK_THAT(legendre_eval(spec, n, std::cos(theta)),
                 WithinAbs(std::cos(n * theta), 1e-10));
    }
  }
}

TEST_CASE("legendre_eval endpoints and domain") {
  for (int d : {2, 3, 4, 5, 7}) {
    const BasisSpec spec(d);
    for (int n : {0, 1, 2, 5, 11, 40}) {
      CHECK(legendre_eval(spec, n, 1.0) == 1.0);
      CHECK(legendre_eval(spec, n, -1.0) == (n % 2 == 0 ? 1.0 : -1.0));
    }
  }
  CHECK_THAT(legendre_eval(BasisSpec(3), 2, 0.5), WithinRel(-0.125, 1e-14));
  CHECK(legendre_eval(BasisSpec(4), 0, 0.3) == 1.0);
  CHECK_THROWS_AS(legendre_eval(BasisSpec(3), 2, 1.5), std::domain_error);
  CHECK_THROWS_AS(BasisSpec(1), std::domain_error);
}

TEST_CASE("parity P_n(-t) = (-1)^n P_n(t)") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ts(0.0, 1.0);
  for (int d : {2, 3, 5}) {
    const BasisSpec spec(d);
    for (int n : {1, 2, 7, 30, 101}) {
      for (int i = 0; i < 20; ++i) {
        const double t = ts(rng);
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        CHECK_THAT(legendre_eval(spec, n, -t),
                   WithinAbs(sign * legendre_eval(spec, n, t), 1e-12));
      }
    }
  }
}

TEST_CASE("uniform boundedness |P_n| <= 1") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ts(-1.0, 1.0);
  for (int d : {2, 3, 4, 5}) {
    const BasisSpec spec(d);
    for (int n : {1, 2, 3, 5, 10, 25, 50, 100, 250, 500}) {
      for (int i = 0; i < 300; ++i) {
        CHECK(std::abs(legendre_eval(spec, n, ts(rng))) <= 1.0 + 1e-10);
      }
    }
  }
}

TEST_CASE("n_mult values and growth") {
  CHECK(n_mult(BasisSpec(3), 0) == 1.0);
  CHECK_THAT(n_mult(BasisSpec(3), 1), WithinRel(3.0, 1e-14));
  CHECK_THAT(n_mult(BasisSpec(2), 5), WithinRel(2.0, 1e-14));
  CHECK_THAT(n_mult(BasisSpec(3), 2), WithinRel(5.0, 1e-14));
  // N(d,n) ~ c n^{d-2}: ratio drift under 1% between n = 1e3 and 1e4
  for (int d : {2, 3, 4, 5}) {
    const BasisSpec spec(d);
    const double r1 = n_mult(spec, 1000) / std::pow(1000.0, d - 2.0);
    const double r2 = n_mult(spec, 10000) / std::pow(10000.0, d - 2.0);
    CHECK_THAT(r1 / r2, WithinRel(1.0, 0.01));
  }
  // log variant agrees
  for (int d : {2, 3, 5}) {
    const BasisSpec spec(d);
    for (long long n : {1LL, 7LL, 500LL, 20000LL}) {
      CHECK_THAT(std::exp(log_n_mult(spec, n)), WithinRel(n_mult(spec, n), 1e-12));
    }
  }
}

TEST_CASE("sphere_area and basis_norm_sq") {
  CHECK_THAT(sphere_area(2), WithinRel(2.0 * M_PI, 1e-14));
  CHECK_THAT(sphere_area(3), WithinRel(4.0 * M_PI, 1e-14));
  CHECK_THAT(sphere_area(4), WithinRel(2.0 * M_PI * M_PI, 1e-14));
  CHECK_THAT(basis_norm_sq(BasisSpec(3), 0), WithinRel(2.0, 1e-14));
  CHECK_THAT(basis_norm_sq(BasisSpec(3), 2), WithinRel(0.4, 1e-14));
  CHECK_THAT(basis_norm_sq(BasisSpec(2), 4), WithinRel(M_PI / 2.0, 1e-14));
}

TEST_CASE("quadrature closed-form examples") {
  {
    const QuadratureRule r = build_quadrature(BasisSpec(3), 1);
    REQUIRE(r.nodes.size() == 1);
    CHECK_THAT(r.nodes[0], WithinAbs(0.0, 1e-15));
    CHECK_THAT(r.weights[0], WithinRel(2.0, 1e-13));
  }
  {
    const QuadratureRule r = build_quadrature(BasisSpec(3), 2);
    CHECK_THAT(r.nodes[0], WithinRel(-1.0 / std::sqrt(3.0), 1e-13));
    CHECK_THAT(r.nodes[1], WithinRel(1.0 / std::sqrt(3.0), 1e-13));
    CHECK_THAT(r.weights[0], WithinRel(1.0, 1e-13));
    CHECK_THAT(r.weights[1], WithinRel(1.0, 1e-13));
  }
  {
    const QuadratureRule r = build_quadrature(BasisSpec(2), 3);
    CHECK_THAT(r.nodes[0], WithinRel(-std::sqrt(3.0) / 2.0, 1e-13));
    CHECK_THAT(r.nodes[1], WithinAbs(0.0, 1e-15));
    CHECK_THAT(r.nodes[2], WithinRel(std::sqrt(3.0) / 2.0, 1e-13));
    for (double w : r.weights) CHECK_THAT(w, WithinRel(M_PI / 3.0, 1e-13));
  }
}

TEST_CASE("quadrature integrates weighted monomials exactly") {
  for (int d : {2, 3, 4, 5}) {
    const BasisSpec spec(d);
    for (std::size_t m : {5, 20}) {
      const QuadratureRule rule = build_quadrature(spec, m);
      REQUIRE(rule.exactness_degree == 2 * static_cast<long long>(m) - 1);
      for (int k = 0; k <= rule.exactness_degree; ++k) {
        double got = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          got += rule.weights[j] * std::pow(rule.nodes[j], k);
        }
        const double want = weight_moment(d, k);
        CHECK_THAT(got, WithinAbs(want, 1e-12 * (1.0 + std::abs(want))));
      }
    }
  }
}

TEST_CASE("quadrature nodes are symmetric and weights positive") {
  for (int d : {2, 3, 6}) {
    const QuadratureRule r = build_quadrature(BasisSpec(d), 41);
    for (std::size_t j = 0; j < r.nodes.size(); ++j) {
      CHECK(r.weights[j] > 0.0);
      CHECK(r.nodes[j] == -r.nodes[r.nodes.size() - 1 - j]);
      if (j > 0) CHECK(r.nodes[j] > r.nodes[j - 1]);
    }
  }
}

TEST_CASE("orthogonality under the quadrature rule") {
  for (int d : {2, 3, 4, 5}) {
    const BasisSpec spec(d);
    const QuadratureRule rule = build_quadrature(spec, 100);
    for (int n : {0, 3, 17, 60}) {
      for (int m : {1, 8, 41}) {
        if (n == m) continue;
        double acc = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          acc += rule.weights[j] * legendre_eval(spec, n, rule.nodes[j]) *
                 legendre_eval(spec, m, rule.nodes[j]);
        }
        const double scale =
            std::sqrt(basis_norm_sq(spec, n) * basis_norm_sq(spec, m));
        CHECK(std::abs(acc) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("projection picks out basis coefficients") {
  for (int d : {2, 3, 5}) {
    const BasisSpec spec(d);
    const QuadratureRule rule = build_quadrature(spec, 400);
    const CoeffSeries delta3 = project(
        [&](double t) { return legendre_eval(spec, 3, t); }, spec, 8, rule);
    for (std::size_t n = 0; n <= 8; ++n) {
      CHECK_THAT(delta3.values[n], WithinAbs(n == 3 ? 1.0 : 0.0, 1e-12));
    }
    const CoeffSeries one = project([](double) { return 1.0; }, spec, 5, rule);
    CHECK_THAT(one.values[0], WithinAbs(1.0, 1e-12));
    for (std::size_t n = 1; n <= 5; ++n) {
      CHECK_THAT(one.values[n], WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("projection rejects short rules and bad integrands") {
  const BasisSpec spec(3);
  const QuadratureRule rule = build_quadrature(spec, 10);
  CHECK_THROWS_AS(project([](double) { return 1.0; }, spec, 50, rule),
                  std::invalid_argument);
  const double pole_node = rule.nodes[3];
  CHECK_THROWS_AS(
      project([pole_node](double t) { return 1.0 / (t - pole_node); }, spec, 4,
              rule),
      std::runtime_error);
}

TEST_CASE("series_eval basics") {
  const BasisSpec spec(3);
  const CoeffSeries one(spec, {1.0}, CoeffSource::analytic);
  CHECK_THAT(series_eval(one, 0.37), WithinRel(1.0, 1e-15));
  const CoeffSeries linear(spec, {0.0, 1.0}, CoeffSource::analytic);
  CHECK_THAT(series_eval(linear, 0.3), WithinRel(0.3, 1e-15));
  CHECK_THROWS_AS(series_eval(one, 1.2), std::domain_error);
}

TEST_CASE("series of sqrt(1-t) reconstructs the function") {
  const BasisSpec spec(3);
  const QuadratureRule rule = build_quadrature(spec, projection_nodes(200));
  const CoeffSeries c =
      project([](double t) { return std::sqrt(1.0 - t); }, spec, 200, rule);
  CHECK_THAT(series_eval(c, 0.0), WithinAbs(1.0, 2e-3));
}

TEST_CASE("radial sphere integral") {
  const BasisSpec spec(3);
  CHECK_THAT(radial_sphere_integral([](double) { return 1.0; }, spec),
             WithinRel(4.0 * M_PI, 1e-12));
  CHECK_THAT(radial_sphere_integral([](double t) { return t; }, spec),
             WithinAbs(0.0, 1e-13));
  CHECK_THAT(radial_sphere_integral([](double t) { return t * t; }, spec),
             WithinRel(4.0 * M_PI / 3.0, 1e-12));
}

TEST_CASE("product integral in series form") {
  const BasisSpec spec(3);
  const CoeffSeries c0(spec, {1.0}, CoeffSource::analytic);
  CHECK_THAT(product_integral_series(c0, c0, 0.4),
             WithinRel(4.0 * M_PI, 1e-13));
  const CoeffSeries c1(spec, {0.0, 1.0}, CoeffSource::analytic);
  CHECK_THAT(product_integral_series(c1, c1, 1.0),
             WithinRel(4.0 * M_PI / 3.0, 1e-13));
  // orthogonal inputs
  const CoeffSeries c2(spec, {0.0, 0.0, 1.0}, CoeffSource::analytic);
  const CoeffSeries c3(spec, {0.0, 0.0, 0.0, 1.0}, CoeffSource::analytic);
  CHECK_THAT(product_integral_series(c2, c3, 0.8), WithinAbs(0.0, 1e-14));
  const CoeffSeries other(BasisSpec(4), {1.0}, CoeffSource::analytic);
  CHECK_THROWS_AS(product_integral_series(c0, other, 0.0),
                  std::invalid_argument);
}

TEST_CASE("product integral matches Monte Carlo surface integration") {
  // f = g = P_2(<.,.>) against two fixed directions on S_2
  const BasisSpec spec(3);
  const SpherePoint eta = SpherePoint::north_pole(3);
  const SpherePoint zeta(std::vector<double>{0.6, 0.8, 0.0});
  std::vector<double> unit(3, 0.0);
  CoeffSeries p2(spec, {0.0, 0.0, 1.0}, CoeffSource::analytic);
  const double expected = product_integral_series(p2, p2, dot(eta, zeta));
  std::mt19937_64 rng(2024);
  const McEstimate mc = surface_mc_integral(
      [&](const SpherePoint& xi) {
        return legendre_eval(spec, 2, dot(eta, xi)) *
               legendre_eval(spec, 2, dot(zeta, xi));
      },
      3, 1000000, rng);
  CHECK_THAT(mc.estimate, WithinAbs(expected, 3.0 * mc.std_error));
}

TEST_CASE("CoeffSeries rejects non-finite values") {
  CHECK_THROWS_AS(CoeffSeries(BasisSpec(3), {1.0, std::nan("")},
                              CoeffSource::analytic),
                  std::invalid_argument);
}
