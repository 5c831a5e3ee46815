#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfbm/polybasis.hpp"

namespace sfbm {

// Points on S_{d-1}, geodesic distance, caps, grids, uniform sampling, and
// the azimuthal equidistant projection. The north pole O is pinned to the
// first standard basis vector; everything else is rotation-equivariant.

class SpherePoint {
 public:
  explicit SpherePoint(std::vector<double> coords) : c_(std::move(coords)) {
    if (c_.size() < 2) {
      throw std::invalid_argument("SpherePoint: dimension must be >= 2");
    }
    double norm_sq = 0.0;
    for (double x : c_) norm_sq += x * x;
    if (!(norm_sq > 1e-24) || !std::isfinite(norm_sq)) {
      throw std::invalid_argument("SpherePoint: cannot normalize near-zero vector");
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : c_) x *= inv;
  }

  static SpherePoint north_pole(int d) {
    std::vector<double> c(d, 0.0);
    c[0] = 1.0;
    return SpherePoint(std::move(c));
  }

  int dim() const { return static_cast<int>(c_.size()); }
  double operator[](std::size_t i) const { return c_[i]; }
  const std::vector<double>& coords() const { return c_; }

 private:
  std::vector<double> c_;
};

inline double dot(const SpherePoint& a, const SpherePoint& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("dot: dimension mismatch");
  }
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

// Geodesic distance d(eta, zeta) = arccos(<eta, zeta>), evaluated through
// the chord / anti-chord form 2 atan2(|eta - zeta|, |eta + zeta|). The two
// agree to the last bit away from the ends, and the atan2 form keeps full
// precision near 0 and pi, where arccos of a rounded inner product loses
// half the digits (and would need clamping against NaN).
inline double geodesic(const SpherePoint& eta, const SpherePoint& zeta) {
  if (eta.dim() != zeta.dim()) {
    throw std::invalid_argument("geodesic: dimension mismatch");
  }
  double chord_sq = 0.0, anti_sq = 0.0;
  for (int i = 0; i < eta.dim(); ++i) {
    const double diff = eta[i] - zeta[i];
    const double sum = eta[i] + zeta[i];
    chord_sq += diff * diff;
    anti_sq += sum * sum;
  }
  return 2.0 * std::atan2(std::sqrt(chord_sq), std::sqrt(anti_sq));
}

inline bool in_cap(const SpherePoint& eta, const SpherePoint& center,
                   double radius) {
  return geodesic(eta, center) <= radius;
}

// Azimuthal equidistant projection Psi: H(O) -> {x in R^{d-1}: |x| <= pi/2}.
// Psi(eta) = d(eta,O) * v, where v is the unit direction of eta's component
// orthogonal to O. Distances to the pole are preserved exactly.
inline std::vector<double> project_ae(const SpherePoint& eta) {
  const int d = eta.dim();
  // component orthogonal to O = e_1 is just the trailing coordinates;
  // atan2 keeps r accurate when eta sits next to the pole
  double tail_norm = 0.0;
  for (int i = 1; i < d; ++i) tail_norm += eta[i] * eta[i];
  tail_norm = std::sqrt(tail_norm);
  const double r = std::atan2(tail_norm, eta[0]);  // d(eta, O)
  if (r > M_PI / 2.0 + 1e-12) {
    throw std::domain_error("project_ae: point outside the closed half-sphere");
  }
  std::vector<double> out(d - 1, 0.0);
  if (r < 1e-9) return out;  // direction undefined at the pole, scaled by ~0
  for (int i = 1; i < d; ++i) out[i - 1] = r * eta[i] / tail_norm;
  return out;
}

// Inverse of the projection: (r, v) with r = |x| lifts back to
// cos(r) O + sin(r) v embedded in R^d.
inline SpherePoint project_ae_inverse(const std::vector<double>& x) {
  const int d = static_cast<int>(x.size()) + 1;
  double r = 0.0;
  for (double xi : x) r += xi * xi;
  r = std::sqrt(r);
  if (r > M_PI / 2.0 + 1e-12) {
    throw std::domain_error("project_ae_inverse: |x| must be <= pi/2");
  }
  std::vector<double> c(d, 0.0);
  c[0] = std::cos(r);
  if (r > 0.0) {
    const double s = std::sin(r) / r;
    for (int i = 1; i < d; ++i) c[i] = s * x[i - 1];
  }
  return SpherePoint(std::move(c));
}

inline SpherePoint sample_uniform(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> c(d);
  for (;;) {
    double norm_sq = 0.0;
    for (int i = 0; i < d; ++i) {
      c[i] = gauss(rng);
      norm_sq += c[i] * c[i];
    }
    if (norm_sq > 1e-24) return SpherePoint(std::move(c));
    // astronomically unlikely; redraw rather than divide by ~0
  }
}

enum class GridKind { random_uniform, fibonacci_d3, equiangular_d2 };

inline const char* to_string(GridKind k) {
  switch (k) {
    case GridKind::random_uniform: return "random_uniform";
    case GridKind::fibonacci_d3: return "fibonacci_d3";
    case GridKind::equiangular_d2: return "equiangular_d2";
  }
  return "unknown";
}

// Discretization of the sphere for simulation and surface integrals. Equal
// weights summing to the total surface area.
struct SphereGrid {
  std::vector<SpherePoint> points;
  std::vector<double> weights;
  GridKind kind;

  int dim() const { return points.empty() ? 0 : points.front().dim(); }
  std::size_t size() const { return points.size(); }
};

inline SphereGrid make_grid(int d, GridKind kind, std::size_t resolution,
                            std::uint64_t seed = 0) {
  if (resolution < 2) throw std::domain_error("make_grid: resolution must be >= 2");
  SphereGrid grid;
  grid.kind = kind;
  grid.points.reserve(resolution);
  const double w = sphere_area(d) / static_cast<double>(resolution);
  switch (kind) {
    case GridKind::equiangular_d2: {
      if (d != 2) throw std::invalid_argument("make_grid: equiangular needs d = 2");
      for (std::size_t k = 0; k < resolution; ++k) {
        const double th = 2.0 * M_PI * k / resolution;
        grid.points.push_back(SpherePoint({std::cos(th), std::sin(th)}));
      }
      break;
    }
    case GridKind::fibonacci_d3: {
      if (d != 3) throw std::invalid_argument("make_grid: fibonacci needs d = 3");
      const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
      for (std::size_t i = 0; i < resolution; ++i) {
        // offset lattice: polar coordinate strictly inside (-1,1)
        const double z = 1.0 - (2.0 * i + 1.0) / resolution;
        const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        grid.points.push_back(
            SpherePoint({z, rad * std::cos(phi), rad * std::sin(phi)}));
      }
      break;
    }
    case GridKind::random_uniform: {
      std::mt19937_64 rng(seed);
      for (std::size_t i = 0; i < resolution; ++i) {
        grid.points.push_back(sample_uniform(d, rng));
      }
      break;
    }
  }
  grid.weights.assign(resolution, w);
  return grid;
}

struct McEstimate {
  double estimate;
  double std_error;
};

// Plain Monte Carlo surface integral: area * mean(f) over uniform points.
inline McEstimate surface_mc_integral(
    const std::function<double(const SpherePoint&)>& f, int d,
    std::size_t n_samples, std::mt19937_64& rng) {
  if (n_samples < 100) {
    throw std::invalid_argument("surface_mc_integral: need at least 100 samples");
  }
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const SpherePoint p = sample_uniform(d, rng);
    const double v = f(p);
    if (!std::isfinite(v)) {
      throw std::runtime_error("surface_mc_integral: non-finite value at sample " +
                               std::to_string(i));
    }
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  const double area = sphere_area(d);
  return {area * mean, area * std::sqrt(var / n)};
}

}  // namespace sfbm
