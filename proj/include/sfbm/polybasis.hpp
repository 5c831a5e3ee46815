#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfbm/specfun.hpp"

namespace sfbm {

// Generalized Legendre polynomials of dimension d: Gegenbauer polynomials
// with parameter lambda = d/2 - 1, renormalized so that P_n(1) = 1. They are
// orthogonal on [-1,1] under the weight w(t) = (1-t^2)^((d-3)/2). d = 3 gives
// the classical Legendre polynomials, d = 2 the Chebyshev polynomials of the
// first kind.

struct BasisSpec {
  int d;
  double lambda;

  explicit BasisSpec(int dim) : d(dim), lambda(dim / 2.0 - 1.0) {
    if (dim < 2) throw std::domain_error("BasisSpec: dimension must be >= 2");
  }

  friend bool operator==(const BasisSpec& a, const BasisSpec& b) {
    return a.d == b.d;
  }
};

inline double sphere_area(int d) {
  if (d < 1) throw std::domain_error("sphere_area: d must be >= 1");
  return 2.0 * std::pow(M_PI, d / 2.0) / std::exp(std::lgamma(d / 2.0));
}

// Multiplicity factor N(d,n) = (2n+d-2)/n * binom(n+d-3, n-1) for n >= 1,
// N(d,0) = 1. The binomial has d-2 factors, so the direct product stays
// exact and overflow-free for every n we ever use.
inline double n_mult(const BasisSpec& spec, long long n) {
  if (n < 0) throw std::domain_error("n_mult: n must be >= 0");
  if (n == 0) return 1.0;
  const int d = spec.d;
  double binom = 1.0;  // binom(n+d-3, d-2)
  for (int k = 1; k <= d - 2; ++k) {
    binom *= static_cast<double>(n - 1 + k) / k;
  }
  return (2.0 * n + d - 2.0) / n * binom;
}

inline double log_n_mult(const BasisSpec& spec, long long n) {
  if (n == 0) return 0.0;
  const double direct = n_mult(spec, n);
  if (std::isfinite(direct)) return std::log(direct);
  // fall back to lgamma only when the product itself would overflow
  const int d = spec.d;
  return std::log((2.0 * n + d - 2.0) / n) + std::lgamma(n + d - 2.0) -
         std::lgamma(static_cast<double>(n)) - std::lgamma(d - 1.0);
}

// int_{-1}^{1} P_n(t)^2 w(t) dt = |S_{d-1}| / (N(d,n) |S_{d-2}|).
inline double basis_norm_sq(const BasisSpec& spec, long long n) {
  return sphere_area(spec.d) / (n_mult(spec, n) * sphere_area(spec.d - 1));
}

// Streaming evaluator for P_0(t), P_1(t), ... at a fixed abscissa, via the
// normalized three-term recurrence
//   P_n = [2t(n+lambda-1) P_{n-1} - (n-1) P_{n-2}] / (n + 2 lambda - 1),
// which preserves P_n(1) = 1 and is nonsingular for every d >= 2.
class LegendreIter {
 public:
  LegendreIter(const BasisSpec& spec, double t)
      : lambda_(spec.lambda), t_(t), n_(0), prev_(0.0), cur_(1.0) {}

  double current() const { return cur_; }
  long long index() const { return n_; }

  void advance() {
    ++n_;
    double next;
    if (n_ == 1) {
      next = t_;
    } else {
      next = (2.0 * t_ * (n_ + lambda_ - 1.0) * cur_ - (n_ - 1.0) * prev_) /
             (n_ + 2.0 * lambda_ - 1.0);
    }
    prev_ = cur_;
    cur_ = next;
  }

 private:
  double lambda_, t_;
  long long n_;
  double prev_, cur_;
};

inline double legendre_eval(const BasisSpec& spec, long long n, double t) {
  if (n < 0) throw std::domain_error("legendre_eval: n must be >= 0");
  if (std::abs(t) > 1.0) {
    throw std::domain_error("legendre_eval: |t| must be <= 1, got " +
                            std::to_string(t));
  }
  LegendreIter it(spec, t);
  for (long long k = 0; k < n; ++k) it.advance();
  return it.current();
}

enum class CoeffSource { closed_form, quadrature, analytic };

inline const char* to_string(CoeffSource s) {
  switch (s) {
    case CoeffSource::closed_form: return "closed_form";
    case CoeffSource::quadrature: return "quadrature";
    case CoeffSource::analytic: return "analytic";
  }
  return "unknown";
}

// Finite prefix a_0..a_N of a Legendre series for a fixed dimension.
struct CoeffSeries {
  BasisSpec spec;
  std::vector<double> values;
  CoeffSource source;

  CoeffSeries(BasisSpec s, std::vector<double> v, CoeffSource src)
      : spec(s), values(std::move(v)), source(src) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw std::invalid_argument("CoeffSeries: non-finite value at n = " +
                                    std::to_string(i));
      }
    }
  }

  std::size_t size() const { return values.size(); }
};

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, inside (-1,1)
  std::vector<double> weights;  // positive
  long long exactness_degree;   // 2m - 1 for an m-node Gauss rule
};

namespace detail {

// Off-diagonal entries of the symmetric Jacobi matrix for the weight
// (1-t^2)^alpha (monic recurrence beta coefficients, Gautschi's r_jacobi
// specialized to the symmetric case). The k = 1 entry needs its own formula
// because the generic one degenerates to 0/0 at alpha = -1/2.
inline double gegenbauer_beta(double alpha, long long k) {
  if (k == 1) return 1.0 / (2.0 * alpha + 3.0);
  return k * (k + 2.0 * alpha) /
         ((2.0 * k + 2.0 * alpha + 1.0) * (2.0 * k + 2.0 * alpha - 1.0));
}

// Eigenvalues of a symmetric tridiagonal matrix with zero diagonal, by the
// implicit-shift QL method with eigenvalue-only updates. Input is the
// subdiagonal b_1..b_{m-1}; returns the sorted eigenvalues.
inline std::vector<double> symmetric_tridiag_eigenvalues(std::vector<double> e) {
  const std::size_t n = e.size() + 1;
  std::vector<double> d(n, 0.0);
  e.push_back(0.0);
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (++iter > 50) {
          throw std::runtime_error(
              "build_quadrature: tridiagonal eigen-solver failed to converge "
              "(row " + std::to_string(l) + ")");
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            // rotation annihilated early; drop the shift and re-scan
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace detail

// m-node Gauss rule for the weight (1-t^2)^((d-3)/2) on [-1,1], exact for
// polynomial degree <= 2m-1. For d = 2 this is the Chebyshev--Gauss rule in
// closed form; otherwise nodes come from the Golub--Welsch eigenproblem,
// polished by one Newton step on the orthonormal recurrence, with weights
// from the Christoffel sum 1 / sum_k p_k(x_j)^2. The rule is symmetrized so
// node pairs are exact negatives, which makes parity cancellations exact.
inline QuadratureRule build_quadrature(const BasisSpec& spec, std::size_t m) {
  if (m < 1) throw std::domain_error("build_quadrature: m must be >= 1");
  QuadratureRule rule;
  rule.exactness_degree = 2 * static_cast<long long>(m) - 1;
  rule.nodes.resize(m);
  rule.weights.resize(m);

  if (spec.d == 2) {
    for (std::size_t j = 0; j < m; ++j) {
      // increasing order: k = m - j
      rule.nodes[j] = std::cos((2.0 * (m - j) - 1.0) * M_PI / (2.0 * m));
      rule.weights[j] = M_PI / m;
    }
    // exact +/- pairing
    for (std::size_t j = 0; j < m / 2; ++j) {
      const double x = 0.5 * (rule.nodes[m - 1 - j] - rule.nodes[j]);
      rule.nodes[m - 1 - j] = x;
      rule.nodes[j] = -x;
    }
    if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
    return rule;
  }

  const double alpha = (spec.d - 3.0) / 2.0;
  const double mu0 = basis_norm_sq(spec, 0);  // zeroth moment of w

  std::vector<double> offdiag(m - 1);
  for (std::size_t k = 1; k < m; ++k) {
    offdiag[k - 1] = std::sqrt(detail::gegenbauer_beta(alpha, k));
  }
  std::vector<double> x = detail::symmetric_tridiag_eigenvalues(offdiag);

  // Orthonormal recurrence p_{k+1} = (t p_k - b_k p_{k-1}) / b_{k+1} with
  // b_k = offdiag[k-1]; one Newton step per node, then Christoffel weights.
  std::vector<double> b(m + 1);
  b[0] = 0.0;
  for (std::size_t k = 1; k < m; ++k) b[k] = offdiag[k - 1];
  b[m] = std::sqrt(detail::gegenbauer_beta(alpha, static_cast<long long>(m)));

  const double p0 = 1.0 / std::sqrt(mu0);
  for (std::size_t j = 0; j < m; ++j) {
    double t = x[j];
    for (int pass = 0; pass < 2; ++pass) {
      double pm1 = 0.0, pk = p0;
      double dm1 = 0.0, dk = 0.0;
      double christoffel = pk * pk;
      for (std::size_t k = 0; k < m; ++k) {
        const double pnext = (t * pk - b[k] * pm1) / b[k + 1];
        const double dnext = (pk + t * dk - b[k] * dm1) / b[k + 1];
        pm1 = pk;
        pk = pnext;
        dm1 = dk;
        dk = dnext;
        if (k + 1 < m) christoffel += pk * pk;
      }
      if (pass == 0) {
        // Newton on p_m; the step is O(eps) here, it only tightens the
        // eigenvalue to the recurrence's own root.
        t -= pk / dk;
      } else {
        x[j] = t;
        rule.weights[j] = 1.0 / christoffel;
      }
    }
  }

  for (std::size_t j = 0; j + 1 < m; ++j) {
    if (!(x[j] < x[j + 1])) {
      throw std::runtime_error("build_quadrature: nodes not strictly increasing");
    }
  }
  for (std::size_t j = 0; j < m / 2; ++j) {
    const double xs = 0.5 * (x[m - 1 - j] - x[j]);
    x[m - 1 - j] = xs;
    x[j] = -xs;
    const double ws = 0.5 * (rule.weights[m - 1 - j] + rule.weights[j]);
    rule.weights[m - 1 - j] = ws;
    rule.weights[j] = ws;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;
  rule.nodes = std::move(x);
  return rule;
}

// Node count for projecting endpoint-singular integrands up to degree N.
// Gauss rules converge only algebraically for such functions; the default
// margin keeps the residual below the coefficient magnitudes used in tests.
inline std::size_t projection_nodes(std::size_t n_max) {
  return std::max<std::size_t>(4 * n_max, 400);
}

// Legendre coefficients a_n = N(d,n) |S_{d-2}|/|S_{d-1}| int f P_n w of f
// for n = 0..N, by weighted Gauss quadrature. Single pass: the recurrence
// runs once per node while all coefficients accumulate.
inline CoeffSeries project(const std::function<double(double)>& f,
                           const BasisSpec& spec, std::size_t n_max,
                           const QuadratureRule& rule) {
  if (rule.exactness_degree < 2 * static_cast<long long>(n_max)) {
    throw std::invalid_argument(
        "project: quadrature rule too short for requested degree");
  }
  std::vector<double> acc(n_max + 1, 0.0);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double fj = f(rule.nodes[j]);
    if (!std::isfinite(fj)) {
      throw std::runtime_error("project: non-finite integrand value at node " +
                               std::to_string(j) + " (t = " +
                               std::to_string(rule.nodes[j]) + ")");
    }
    const double base = rule.weights[j] * fj;
    LegendreIter it(spec, rule.nodes[j]);
    for (std::size_t n = 0; n <= n_max; ++n) {
      acc[n] += base * it.current();
      it.advance();
    }
  }
  const double area_ratio = sphere_area(spec.d - 1) / sphere_area(spec.d);
  for (std::size_t n = 0; n <= n_max; ++n) {
    acc[n] *= n_mult(spec, static_cast<long long>(n)) * area_ratio;
  }
  return CoeffSeries(spec, std::move(acc), CoeffSource::quadrature);
}

// Partial sum sum_n a_n P_n(t), recurrence running alongside the accumulation.
inline double series_eval(const CoeffSeries& coeffs, double t) {
  if (std::abs(t) > 1.0) {
    throw std::domain_error("series_eval: |t| must be <= 1");
  }
  double acc = 0.0;
  LegendreIter it(coeffs.spec, t);
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    acc += coeffs.values[n] * it.current();
    it.advance();
  }
  return acc;
}

// int_{S_{d-1}} f(<eta, xi>) dsigma(xi) = |S_{d-2}| int_{-1}^1 f(t) w(t) dt,
// for any fixed eta.
inline double radial_sphere_integral(const std::function<double(double)>& f,
                                     const BasisSpec& spec,
                                     const QuadratureRule& rule) {
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double fj = f(rule.nodes[j]);
    if (!std::isfinite(fj)) {
      throw std::runtime_error(
          "radial_sphere_integral: non-finite integrand at node " +
          std::to_string(j));
    }
    acc += rule.weights[j] * fj;
  }
  return sphere_area(spec.d - 1) * acc;
}

inline double radial_sphere_integral(const std::function<double(double)>& f,
                                     const BasisSpec& spec) {
  return radial_sphere_integral(f, spec, build_quadrature(spec, 400));
}

// int_{S_{d-1}} f(<eta,xi>) g(<zeta,xi>) dsigma(xi)
//   = |S_{d-1}| sum_n a_n b_n / N(d,n) * P_n(<eta,zeta>),
// truncated at the shorter of the two series.
inline double product_integral_series(const CoeffSeries& a,
                                      const CoeffSeries& b, double s) {
  if (!(a.spec == b.spec)) {
    throw std::invalid_argument(
        "product_integral_series: dimension mismatch between series");
  }
  if (std::abs(s) > 1.0) {
    throw std::domain_error("product_integral_series: |s| must be <= 1");
  }
  const std::size_t n_terms = std::min(a.size(), b.size());
  double acc = 0.0;
  LegendreIter it(a.spec, s);
  for (std::size_t n = 0; n < n_terms; ++n) {
    acc += a.values[n] * b.values[n] /
           n_mult(a.spec, static_cast<long long>(n)) * it.current();
    it.advance();
  }
  return sphere_area(a.spec.d) * acc;
}

}  // namespace sfbm
