#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfbm/polybasis.hpp"
#include "sfbm/singular_coeffs.hpp"
#include "sfbm/sphere_geom.hpp"

namespace sfbm {

// The auxiliary function G^{(H)}, the explicit RKHS shift function
// f_{delta,alpha} built from it, the bound on its RKHS norm, and the
// Legendre-series identity behind the SFBM covariance.

// G^{(H)}(t) = 2^H - (1-t)^H + (1+t)^H, increasing on [-1,1].
inline double g_aux(double hurst, double t) {
  if (!(hurst > 0.0)) throw std::domain_error("g_aux: H must be positive");
  if (std::abs(t) > 1.0) throw std::domain_error("g_aux: |t| must be <= 1");
  return std::pow(2.0, hurst) - std::pow(1.0 - t, hurst) +
         std::pow(1.0 + t, hurst);
}

// Legendre decomposition G^{(H)} = sum_n (b_n^{(H)})^2 / N(d,n) P_n. The raw
// coefficients come out of the (1 +/- t)^H closed forms:
//   raw_0 = 2^H,   raw_n = -a^-_{H,n} (1 - (-1)^n)   (zero for even n >= 2),
// and are non-negative because 1/Gamma(-H) < 0 carries the sign of a^-_{H,n}
// for odd n.
inline KernelCoeffs g_aux_coeffs(const BasisSpec& spec, double hurst,
                                 std::size_t n_max) {
  if (!(hurst > 0.0)) throw std::domain_error("g_aux_coeffs: H must be positive");
  std::vector<double> raw(n_max + 1, 0.0), b(n_max + 1, 0.0);
  raw[0] = std::pow(2.0, hurst);
  b[0] = std::sqrt(raw[0]);
  for (std::size_t n = 1; n <= n_max; n += 2) {
    const double r = -2.0 * coeff_one_minus_t_pow(spec, hurst, n);
    if (r < 0.0) {
      throw std::runtime_error(
          "g_aux_coeffs: negative raw coefficient at n = " + std::to_string(n) +
          ", closed-form sign bookkeeping is broken");
    }
    raw[n] = r;
    b[n] = std::sqrt(r * n_mult(spec, static_cast<long long>(n)));
  }
  return {CoeffSeries(spec, std::move(b), CoeffSource::closed_form),
          CoeffSeries(spec, std::move(raw), CoeffSource::closed_form), 0};
}

// Parameters of the RKHS shift function f_{delta,alpha} for SFBM with Hurst
// index H in dimension d, truncating series work at N_trunc.
struct RkhsShiftSpec {
  double hurst;     // H in (0, 1/2]
  double alpha;     // in (0, 1/2)
  double delta;     // cap radius, in (0, 1]
  int d;
  std::size_t n_trunc;

  RkhsShiftSpec(double h, double a, double dl, int dim, std::size_t nt)
      : hurst(h), alpha(a), delta(dl), d(dim), n_trunc(nt) {
    if (!(h > 0.0) || !(h <= 0.5)) throw std::domain_error("RkhsShiftSpec: H in (0,1/2]");
    if (!(a > 0.0) || !(a < 0.5)) throw std::domain_error("RkhsShiftSpec: alpha in (0,1/2)");
    if (!(dl > 0.0) || !(dl <= 1.0)) throw std::domain_error("RkhsShiftSpec: delta in (0,1]");
    if (dim < 2) throw std::domain_error("RkhsShiftSpec: d >= 2");
  }
};

// f_{delta,alpha} as a function of the inner product <eta, O>:
//   16^{H+alpha} [G^{((H+alpha)/2)}(1) - G^{((H+alpha)/2)}(<eta,O>)]
//   * delta^{-(H+alpha)}.
// Non-negative, decreasing in the inner product, and >= 1 outside the
// geodesic cap of radius delta around O.
inline double shift_eval(const RkhsShiftSpec& s, double inner) {
  if (std::abs(inner) > 1.0) throw std::domain_error("shift_eval: |inner| <= 1");
  const double h2 = (s.hurst + s.alpha) / 2.0;
  const double g_at_one = std::pow(2.0, h2 + 1.0);
  return std::pow(16.0, s.hurst + s.alpha) * (g_at_one - g_aux(h2, inner)) *
         std::pow(s.delta, -(s.hurst + s.alpha));
}

struct NormBound {
  double bound;          // upper bound on ||f_{delta,alpha}||_H^2
  double truncated_sum;  // sum over {0} and odd n <= N_trunc (delta-free part)
  double tail_estimate;  // fitted power-law tail beyond N_trunc
  std::size_t guarded;   // indices where the division guard substituted a_n
};

// Upper bound for the squared RKHS norm of f_{delta,alpha} via the L2 norm
// of its generating function:
//   delta^{-2(H+alpha)} 2 pi^{-2H} 16^{2(H+alpha)}
//     * sum_{n in {0} u odd} (b_n^{((H+alpha)/2)})^4 / ((a_n^{(H)})^2 N(d,n)).
// The sum is truncated at N_trunc; the remainder is bounded by fitting the
// power law c n^{-1-2 alpha} on the last computed decade and integrating,
// with a safety factor of 2 on the fitted constant.
//
// kernel_a must hold the a_n^{(H)} coefficients out to N_trunc. Strict
// positivity of the odd a_n^{(H)} is a theorem, but quadrature can underflow
// at large n; entries below 1e-13 * a_0 are replaced by the power-law value
// fitted from the preceding decade and counted in `guarded`.
inline NormBound norm_bound_sq(const RkhsShiftSpec& s,
                               const CoeffSeries& kernel_a) {
  if (kernel_a.size() < s.n_trunc + 1) {
    throw std::invalid_argument("norm_bound_sq: kernel coefficients too short");
  }
  if (kernel_a.spec.d != s.d) {
    throw std::invalid_argument("norm_bound_sq: dimension mismatch");
  }
  const BasisSpec spec(s.d);
  const double h_aux = (s.hurst + s.alpha) / 2.0;
  const KernelCoeffs g = g_aux_coeffs(spec, h_aux, s.n_trunc);

  const double a0 = kernel_a.values[0];
  if (!(a0 > 0.0)) throw std::runtime_error("norm_bound_sq: a_0 must be positive");
  const double floor = 1e-13 * a0;

  // power-law model for a_n over odd n, fitted on the top decade, used both
  // for the division guard and (via the summand fit) for the tail bound
  const long long top = static_cast<long long>(s.n_trunc);
  const long long half = std::max<long long>(11, top / 2);
  double fit_log_sum = 0.0, fit_loga_sum = 0.0, fit_logn_sq = 0.0, fit_cross = 0.0;
  long long fit_count = 0;
  for (long long n = half % 2 == 0 ? half + 1 : half; n <= top; n += 2) {
    const double a = kernel_a.values[n];
    if (a > floor) {
      const double x = std::log(static_cast<double>(n));
      const double y = std::log(a);
      fit_log_sum += x; fit_loga_sum += y; fit_logn_sq += x * x; fit_cross += x * y;
      ++fit_count;
    }
  }
  double a_slope = 0.0, a_log_c = 0.0;
  if (fit_count >= 2) {
    const double den = fit_count * fit_logn_sq - fit_log_sum * fit_log_sum;
    a_slope = (fit_count * fit_cross - fit_log_sum * fit_loga_sum) / den;
    a_log_c = (fit_loga_sum - a_slope * fit_log_sum) / fit_count;
  }

  std::size_t guarded = 0;
  auto a_at = [&](long long n) {
    const double a = kernel_a.values[n];
    if (a > floor) return a;
    ++guarded;
    if (fit_count < 2) {
      throw std::runtime_error(
          "norm_bound_sq: a_n^{(H)} below positivity floor at n = " +
          std::to_string(n) + " and no fit available");
    }
    return std::exp(a_log_c + a_slope * std::log(static_cast<double>(n)));
  };

  double sum = 0.0;
  {
    const double b0 = g.a.values[0];
    sum += (b0 * b0 * b0 * b0) / (a0 * a0);  // N(d,0) = 1
  }
  double tail_c_sum = 0.0;
  long long tail_c_count = 0;
  for (long long n = 1; n <= top; n += 2) {
    const double bn = g.a.values[n];
    const double an = a_at(n);
    const double summand =
        (bn * bn * bn * bn) / (an * an * n_mult(spec, n));
    sum += summand;
    if (n >= half && summand > 0.0) {
      // estimate c in summand ~ c n^{-1-2 alpha}
      tail_c_sum += std::log(summand) +
                    (1.0 + 2.0 * s.alpha) * std::log(static_cast<double>(n));
      ++tail_c_count;
    }
  }
  double tail = 0.0;
  if (tail_c_count > 0) {
    const double c_fit = std::exp(tail_c_sum / tail_c_count);
    // sum_{n > N} n^{-1-2a} <= N^{-2a} / (2a); factor 2 on the constant
    tail = 2.0 * c_fit * std::pow(static_cast<double>(top), -2.0 * s.alpha) /
           (2.0 * s.alpha);
  }

  const double prefactor = std::pow(s.delta, -2.0 * (s.hurst + s.alpha)) * 2.0 *
                           std::pow(M_PI, -2.0 * s.hurst) *
                           std::pow(16.0, 2.0 * (s.hurst + s.alpha));
  return {prefactor * (sum + tail), sum, tail, guarded};
}

// Truncated series for the kernel identity
//   1 - (arccos(t)/pi)^{2H} = sum_n (a_n^{(H)})^2 / N(d,n) P_n(t);
// the raw coefficients are exactly the summand weights, so this is a plain
// series evaluation. All summands are non-negative and |P_n| <= 1, so the
// uniform truncation error is bounded by the coefficient tail.
inline double kernel_series(const CoeffSeries& raw, double s) {
  return series_eval(raw, s);
}

inline double kernel_series(const BasisSpec& spec, double hurst, double s,
                            std::size_t n_max) {
  return kernel_series(arccos_power_coeffs(spec, hurst, n_max).raw, s);
}

struct CovarianceCheck {
  double lhs;  // covariance straight from the distance formula
  double rhs;  // series-based reconstruction
};

// Reconstructs E[S_H(eta) S_H(zeta)] from the kernel series:
//   pi^{2H}/2 [ K(<eta,zeta>) - K(<eta,O>) - K(<zeta,O>) + K(1) ],
// where K is the truncated kernel series. Converges to the direct formula
//   1/2 (d(eta,O)^{2H} + d(zeta,O)^{2H} - d(eta,zeta)^{2H})
// as the truncation grows.
inline CovarianceCheck covariance_series_check(const BasisSpec& spec,
                                               double hurst,
                                               const SpherePoint& eta,
                                               const SpherePoint& zeta,
                                               std::size_t n_max) {
  const SpherePoint pole = SpherePoint::north_pole(spec.d);
  const double two_h = 2.0 * hurst;
  const double lhs = 0.5 * (std::pow(geodesic(eta, pole), two_h) +
                            std::pow(geodesic(zeta, pole), two_h) -
                            std::pow(geodesic(eta, zeta), two_h));
  const CoeffSeries raw = arccos_power_coeffs(spec, hurst, n_max).raw;
  const double k_ez = kernel_series(raw, dot(eta, zeta));
  const double k_eo = kernel_series(raw, dot(eta, pole));
  const double k_zo = kernel_series(raw, dot(zeta, pole));
  const double k_11 = kernel_series(raw, 1.0);
  const double rhs =
      0.5 * std::pow(M_PI, two_h) * (k_ez - k_eo - k_zo + k_11);
  return {lhs, rhs};
}

}  // namespace sfbm
