#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sfbm {

// Scalar special functions backing the coefficient formulas: log-gamma,
// stable Gamma ratios, generalized binomials, and the reflection-formula
// limit. All functions are pure and thread-safe.

inline bool is_nonneg_integer(double x) {
  return x >= 0.0 && std::floor(x) == x;
}

inline double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("log_gamma: argument must be positive, got " +
                            std::to_string(x));
  }
  return std::lgamma(x);
}

// Value of Gamma at any non-pole argument, kept as (log|Gamma(x)|, sign).
// Gamma alternates sign between consecutive negative integers, so the sign
// has to travel with the magnitude through every product and quotient.
struct LogSigned {
  double log_abs;
  double sign;  // +1 or -1

  friend LogSigned operator*(LogSigned a, LogSigned b) {
    return {a.log_abs + b.log_abs, a.sign * b.sign};
  }
  friend LogSigned operator/(LogSigned a, LogSigned b) {
    return {a.log_abs - b.log_abs, a.sign * b.sign};
  }
  double value() const { return sign * std::exp(log_abs); }
};

inline LogSigned log_gamma_signed(double x) {
  if (x > 0.0) return {std::lgamma(x), 1.0};
  if (std::floor(x) == x) {
    throw std::domain_error("log_gamma_signed: pole at x = " + std::to_string(x));
  }
  // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x). For x < 0 the factor
  // Gamma(1-x) is positive, so sign(Gamma(x)) = sign(sin(pi x)).
  const double s = std::sin(M_PI * x);
  return {std::log(M_PI) - std::log(std::abs(s)) - std::lgamma(1.0 - x),
          s > 0.0 ? 1.0 : -1.0};
}

struct GammaRatioQuery {
  double x;  // large argument, > 0
  double a;  // numerator offset
  double b;  // denominator offset
};

// Gamma(x+a) / Gamma(x+b), evaluated in the log domain so that x up to 1e6
// cannot overflow. Behaves like x^(a-b) for large x.
inline double gamma_ratio(const GammaRatioQuery& q) {
  if (!(q.x > 0.0) || !(q.x + q.a > 0.0) || !(q.x + q.b > 0.0)) {
    throw std::domain_error("gamma_ratio: arguments must stay right of the pole");
  }
  return std::exp(std::lgamma(q.x + q.a) - std::lgamma(q.x + q.b));
}

// Generalized binomial coefficient binom(x, i) = x(x-1)...(x-i+1) / i!.
// The falling-factorial product is used instead of Gamma quotients so that
// negative integer x (where Gamma has poles) works unchanged.
inline double gen_binomial(double x, int i) {
  if (i < 0) throw std::domain_error("gen_binomial: i must be >= 0");
  double r = 1.0;
  for (int k = 0; k < i; ++k) {
    r *= (x - k) / (k + 1);
  }
  return r;
}

// lim_{g'->g} Gamma(g'+1)/Gamma(g'-n+1) = (-1)^n Gamma(n-g)/Gamma(-g),
// for g not a non-negative integer. Callers hitting integer g must use the
// direct substitution instead (see singular_coeffs).
inline double reflection_limit(double g, int n) {
  if (n < 0) throw std::domain_error("reflection_limit: n must be >= 0");
  if (is_nonneg_integer(g)) {
    throw std::domain_error(
        "reflection_limit: undefined for non-negative integer arguments");
  }
  const LogSigned num = log_gamma_signed(static_cast<double>(n) - g);
  const LogSigned den = log_gamma_signed(-g);
  const double parity = (n % 2 == 0) ? 1.0 : -1.0;
  const LogSigned q = num / den;
  return parity * q.value();
}

}  // namespace sfbm
