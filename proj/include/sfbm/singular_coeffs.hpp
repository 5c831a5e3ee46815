#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sfbm/polybasis.hpp"
#include "sfbm/specfun.hpp"

namespace sfbm {

// Closed-form Legendre coefficients of (1 +/- t)^gamma, the decay
// classification for algebraic endpoint singularities, and the coefficient
// machinery for arccos(t)^{2H}.

// Closed form for the coefficients of f^-(t) = (1-t)^gamma:
//   a^-_{gamma,n} = N(d,n) Gamma(d/2)/sqrt(pi)
//                   * 2^{d-2+gamma} Gamma(gamma+(d-1)/2) / Gamma(gamma+d+n-1)
//                   * Gamma(n-gamma) / Gamma(-gamma).
// For integer gamma >= 0 the last quotient is replaced by its limit: 0 when
// gamma <= n-1, (-1)^n Gamma(gamma+1)/Gamma(gamma-n+1) when gamma >= n.
// Gamma(-gamma) alternates sign, so everything runs through the log-sign
// pair; the remaining factors are positive under gamma > (1-d)/2.
inline double coeff_one_minus_t_pow(const BasisSpec& spec, double gamma,
                                    long long n) {
  const int d = spec.d;
  if (!(gamma > (1.0 - d) / 2.0)) {
    throw std::domain_error(
        "coeff_one_minus_t_pow: gamma <= (1-d)/2, (1-t)^gamma is not an "
        "L^2_w function");
  }
  LogSigned tail;
  if (is_nonneg_integer(gamma)) {
    if (gamma <= static_cast<double>(n) - 1.0) return 0.0;
    tail = {std::lgamma(gamma + 1.0) - std::lgamma(gamma - n + 1.0),
            (n % 2 == 0) ? 1.0 : -1.0};
  } else {
    tail = log_gamma_signed(static_cast<double>(n) - gamma) /
           log_gamma_signed(-gamma);
  }
  const double log_mag = log_n_mult(spec, n) + std::lgamma(d / 2.0) -
                         0.5 * std::log(M_PI) + (d - 2.0 + gamma) * M_LN2 +
                         std::lgamma(gamma + (d - 1.0) / 2.0) -
                         std::lgamma(gamma + d + n - 1.0) + tail.log_abs;
  return tail.sign * std::exp(log_mag);
}

// Coefficients of f^+(t) = (1+t)^gamma: a^+_{gamma,n} = (-1)^n a^-_{gamma,n}.
inline double coeff_one_plus_t_pow(const BasisSpec& spec, double gamma,
                                   long long n) {
  const double v = coeff_one_minus_t_pow(spec, gamma, n);
  return (n % 2 == 0) ? v : -v;
}

inline CoeffSeries closed_form_series(const BasisSpec& spec, double gamma,
                                      std::size_t n_max, bool plus_side = false) {
  std::vector<double> v(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    v[n] = plus_side ? coeff_one_plus_t_pow(spec, gamma, n)
                     : coeff_one_minus_t_pow(spec, gamma, n);
  }
  return CoeffSeries(spec, std::move(v), CoeffSource::closed_form);
}

// Endpoint singularity data: f(t) = sum A_i (1+t)^{alpha_i} near -1 and
// f(t) = sum B_i (1-t)^{beta_i} near +1, exponents strictly increasing.
struct EndpointExpansion {
  std::vector<std::pair<double, double>> at_minus_one;  // (A_i, alpha_i)
  std::vector<std::pair<double, double>> at_plus_one;   // (B_i, beta_i)

  EndpointExpansion(std::vector<std::pair<double, double>> minus_side,
                    std::vector<std::pair<double, double>> plus_side)
      : at_minus_one(std::move(minus_side)), at_plus_one(std::move(plus_side)) {
    check(at_minus_one, "alpha");
    check(at_plus_one, "beta");
  }

  // Exponents must clear (1-d)/2 for the expansion to describe an L^2_w
  // function in dimension d.
  void validate_for_dimension(int d) const {
    const double lo = (1.0 - d) / 2.0;
    for (const auto& [c, e] : at_minus_one) {
      if (!(e > lo)) throw std::domain_error("EndpointExpansion: exponent too small");
    }
    for (const auto& [c, e] : at_plus_one) {
      if (!(e > lo)) throw std::domain_error("EndpointExpansion: exponent too small");
    }
  }

 private:
  static void check(const std::vector<std::pair<double, double>>& side,
                    const char* name) {
    bool seen_zero = false;
    for (std::size_t i = 0; i < side.size(); ++i) {
      if (i > 0 && !(side[i].second > side[i - 1].second)) {
        throw std::invalid_argument(std::string("EndpointExpansion: ") + name +
                                    " exponents must be strictly increasing");
      }
      if (seen_zero && side[i].first != 0.0) {
        throw std::invalid_argument(
            "EndpointExpansion: nonzero coefficient after a zero one");
      }
      if (side[i].first == 0.0) seen_zero = true;
    }
  }
};

enum class DecayMode { superpolynomial, single_rate, parity_dependent };

// Outcome of the decay classification: the Legendre coefficients b_n of a
// function with the given endpoint data satisfy |b_n| ~ c n^{-2 gamma - 1}
// (single_rate), decay faster than any polynomial (superpolynomial), or
// follow the rate only along the parity subsequence where the leading
// endpoint contributions do not cancel (parity_dependent).
struct DecayLaw {
  double gamma;  // +infinity in the superpolynomial case
  DecayMode mode;
  // ((+1)^n A + B, (-1)^n A + B) for even / odd n; the subsequence with a
  // vanishing combination decays strictly faster.
  std::pair<double, double> parity_coefficients;

  double rate() const { return -2.0 * gamma - 1.0; }
};

inline DecayLaw predict_decay(const EndpointExpansion& exp) {
  const double inf = std::numeric_limits<double>::infinity();
  double gamma_alpha = inf, a_lead = 0.0;
  for (const auto& [c, e] : exp.at_minus_one) {
    if (c != 0.0 && !is_nonneg_integer(e) && e < gamma_alpha) {
      gamma_alpha = e;
      a_lead = c;
    }
  }
  double gamma_beta = inf, b_lead = 0.0;
  for (const auto& [c, e] : exp.at_plus_one) {
    if (c != 0.0 && !is_nonneg_integer(e) && e < gamma_beta) {
      gamma_beta = e;
      b_lead = c;
    }
  }
  DecayLaw law{std::min(gamma_alpha, gamma_beta), DecayMode::single_rate,
               {0.0, 0.0}};
  if (gamma_alpha == inf && gamma_beta == inf) {
    law.mode = DecayMode::superpolynomial;
  } else if (gamma_alpha == gamma_beta) {
    law.mode = DecayMode::parity_dependent;
    law.parity_coefficients = {a_lead + b_lead, -a_lead + b_lead};
  } else {
    law.mode = DecayMode::single_rate;
  }
  return law;
}

enum class FitParity { all, odd, even };

struct DecayFit {
  double slope;
  double r_squared;
};

// Least-squares slope of log|a_n| against log n over n in [n_min, n_max],
// optionally restricted to one parity. A zero coefficient in range aborts
// with its index, which usually means the caller needs a parity filter.
inline DecayFit fit_decay(const std::function<double(long long)>& coeff,
                          long long n_min, long long n_max,
                          FitParity parity = FitParity::all) {
  if (!(n_min >= 10) || !(n_max >= 2 * n_min)) {
    throw std::invalid_argument(
        "fit_decay: require n_max >= 2*n_min >= 20 (the rate is asymptotic)");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  long long count = 0;
  for (long long n = n_min; n <= n_max; ++n) {
    if (parity == FitParity::odd && n % 2 == 0) continue;
    if (parity == FitParity::even && n % 2 != 0) continue;
    const double a = coeff(n);
    if (a == 0.0) {
      throw std::runtime_error(
          "fit_decay: zero coefficient at n = " + std::to_string(n) +
          "; a parity filter is probably needed");
    }
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(std::abs(a));
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    ++count;
  }
  const double den = count * sxx - sx * sx;
  const double slope = (count * sxy - sx * sy) / den;
  const double sst = syy - sy * sy / count;
  const double intercept = (sy - slope * sx) / count;
  double ssr = 0.0;
  for (long long n = n_min; n <= n_max; ++n) {
    if (parity == FitParity::odd && n % 2 == 0) continue;
    if (parity == FitParity::even && n % 2 != 0) continue;
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(std::abs(coeff(n)));
    const double resid = y - (intercept + slope * x);
    ssr += resid * resid;
  }
  const double r2 = (sst > 0.0) ? 1.0 - ssr / sst : 1.0;
  return {slope, r2};
}

inline DecayFit fit_decay(const CoeffSeries& coeffs, long long n_min,
                          long long n_max, FitParity parity = FitParity::all) {
  if (n_max >= static_cast<long long>(coeffs.size())) {
    throw std::invalid_argument("fit_decay: n_max beyond series length");
  }
  return fit_decay([&](long long n) { return coeffs.values[n]; }, n_min, n_max,
                   parity);
}

// Endpoint data of arccos, truncated after m+1 singular terms per side:
//   arccos(t) =        sum_i (-1)^i binom(-1/2,i)/(1/2+i) ((1-t)/2)^{1/2+i}
//   arccos(t) = pi  -  sum_i (-1)^i binom(-1/2,i)/(1/2+i) ((1+t)/2)^{1/2+i}
// The constant pi is folded into the -1 side as an exponent-0 term.
inline EndpointExpansion arccos_endpoint_expansion(int m) {
  if (m < 0) throw std::domain_error("arccos_endpoint_expansion: m must be >= 0");
  std::vector<std::pair<double, double>> minus_side, plus_side;
  minus_side.emplace_back(M_PI, 0.0);
  for (int i = 0; i <= m; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    const double coeff = sign * gen_binomial(-0.5, i) / (0.5 + i) *
                         std::pow(2.0, -(0.5 + i));
    plus_side.emplace_back(coeff, 0.5 + i);
    minus_side.emplace_back(-coeff, 0.5 + i);
  }
  return EndpointExpansion(std::move(minus_side), std::move(plus_side));
}

// Coefficients a_n^{(H)} of the SFBM kernel decomposition
//   1 - (arccos(t)/pi)^{2H} = sum_n a_n^{(H)}^2 / N(d,n) * P_n(t).
// The raw projection coefficients b_n are non-negative by the kernel's
// positive-definiteness; quadrature noise slightly below zero is clamped,
// anything below -tol_neg aborts because it would mean a real sign defect.
struct KernelCoeffs {
  CoeffSeries a;    // a_n^{(H)} = sqrt(b_n N(d,n))
  CoeffSeries raw;  // b_n as projected
  std::size_t clamped;
};

inline KernelCoeffs arccos_power_coeffs(const BasisSpec& spec, double hurst,
                                        std::size_t n_max,
                                        const QuadratureRule& rule,
                                        double tol_neg_scale = 1e-10) {
  if (!(hurst > 0.0) || !(hurst <= 0.5)) {
    throw std::domain_error("arccos_power_coeffs: H must lie in (0, 1/2]");
  }
  const double two_h = 2.0 * hurst;
  CoeffSeries raw = project(
      [two_h](double t) {
        return 1.0 - std::pow(std::acos(std::clamp(t, -1.0, 1.0)) / M_PI, two_h);
      },
      spec, n_max, rule);
  const double tol_neg = tol_neg_scale * raw.values[0];
  std::size_t clamped = 0;
  std::vector<double> a(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    double b = raw.values[n];
    if (b < -tol_neg) {
      throw std::runtime_error(
          "arccos_power_coeffs: raw coefficient " + std::to_string(b) +
          " at n = " + std::to_string(n) +
          " violates positivity beyond quadrature noise");
    }
    if (b < 0.0) {
      b = 0.0;
      raw.values[n] = 0.0;
      ++clamped;
    }
    a[n] = std::sqrt(b * n_mult(spec, static_cast<long long>(n)));
  }
  return {CoeffSeries(spec, std::move(a), CoeffSource::quadrature),
          std::move(raw), clamped};
}

inline KernelCoeffs arccos_power_coeffs(const BasisSpec& spec, double hurst,
                                        std::size_t n_max) {
  return arccos_power_coeffs(spec, hurst, n_max,
                             build_quadrature(spec, projection_nodes(n_max)));
}

// int_{-1}^1 x^n (P_m(x) - P_{m+2}(x)) w(x) dx, always >= 0. Zero for
// parity mismatch or n < m; otherwise the Gamma closed form of the monomial
// integral, with the m and m+2 terms combined analytically.
inline double monomial_gap_integral(const BasisSpec& spec, long long n,
                                    long long m) {
  if (n < 0 || m < 0) throw std::domain_error("monomial_gap_integral: n, m >= 0");
  const int d = spec.d;
  if ((n + m) % 2 != 0) return 0.0;  // parity mismatch
  if (n < m) return 0.0;             // orthogonality
  if (n == m) {
    // int x^m P_m w dx alone; the P_{m+2} term vanishes.
    return std::exp(std::lgamma(n + 1.0) + std::lgamma((d - 1.0) / 2.0) +
                    std::lgamma(0.5) - m * M_LN2 - std::lgamma(m + d / 2.0));
  }
  // n >= m + 2, same parity
  const double log_mag =
      std::lgamma(n + 1.0) + std::lgamma((d - 1.0) / 2.0) +
      std::lgamma((n - m + 1.0) / 2.0 - 1.0) - (m + 2.0) * M_LN2 -
      std::lgamma(n - m + 1.0) - std::lgamma(m + (n - m + d) / 2.0 + 1.0);
  return std::exp(log_mag) * (n - m - 1.0) * (2.0 * m + d);
}

}  // namespace sfbm
