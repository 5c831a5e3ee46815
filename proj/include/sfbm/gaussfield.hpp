#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sfbm/sphere_geom.hpp"

namespace sfbm {

// SFBM covariance assembly, Gaussian sampling on sphere grids, persistence
// Monte Carlo, occupation-time statistics, and the comparison-inequality
// checks. Sampling is reproducible: results depend on the master seed only,
// never on the worker count (work is split into fixed sample blocks, each
// with its own derived RNG stream, and merged with integer counts).

inline void require_hurst(double hurst, const char* where) {
  if (!(hurst > 0.0) || !(hurst <= 0.5)) {
    throw std::domain_error(std::string(where) +
                            ": H must lie in (0, 1/2]; no SFBM exists beyond 1/2");
  }
}

// E[S_H(eta) S_H(zeta)] = (d(eta,O)^{2H} + d(zeta,O)^{2H} - d(eta,zeta)^{2H})/2.
// Non-negative by the spherical triangle inequality and subadditivity of
// x -> x^{2H} for 2H <= 1.
inline double covariance(double hurst, const SpherePoint& eta,
                         const SpherePoint& zeta) {
  require_hurst(hurst, "covariance");
  const SpherePoint pole = SpherePoint::north_pole(eta.dim());
  const double two_h = 2.0 * hurst;
  return 0.5 * (std::pow(geodesic(eta, pole), two_h) +
                std::pow(geodesic(zeta, pole), two_h) -
                std::pow(geodesic(eta, zeta), two_h));
}

// Euclidean FBM kernel (|s|^{2H} + |t|^{2H} - |t-s|^{2H}) / 2.
inline double euclidean_fbm_cov(double hurst, std::span<const double> s,
                                std::span<const double> t) {
  if (s.size() != t.size()) {
    throw std::invalid_argument("euclidean_fbm_cov: dimension mismatch");
  }
  double ns = 0.0, nt = 0.0, nd = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    ns += s[i] * s[i];
    nt += t[i] * t[i];
    nd += (t[i] - s[i]) * (t[i] - s[i]);
  }
  const double h = hurst;  // plain FBM allows H in (0,1); callers pass <= 1/2
  return 0.5 * (std::pow(ns, h) + std::pow(nt, h) - std::pow(nd, h));
}

struct DominationCheck {
  double spherical;
  double euclidean;
};

// Both kernels for a pair in the closed half-sphere around O. The spherical
// covariance dominates the Euclidean one of the projected pair, with exact
// variance match on the diagonal.
inline DominationCheck domination_check(double hurst, const SpherePoint& eta,
                                        const SpherePoint& zeta) {
  const auto pe = project_ae(eta);  // throws outside H(O)
  const auto pz = project_ae(zeta);
  return {covariance(hurst, eta, zeta), euclidean_fbm_cov(hurst, pe, pz)};
}

// Dense covariance of SFBM restricted to a grid, optionally with its
// Cholesky factor. Rows of exact zeros (grid points equal to O) stay exact.
struct CovMatrix {
  SphereGrid grid;
  double hurst;
  Eigen::MatrixXd entries;
  std::optional<Eigen::MatrixXd> factor;  // lower triangular
  double jitter_used = 0.0;
};

inline CovMatrix build_cov(double hurst, SphereGrid grid) {
  require_hurst(hurst, "build_cov");
  const std::size_t m = grid.size();
  const SpherePoint pole = SpherePoint::north_pole(grid.dim());
  const double two_h = 2.0 * hurst;
  std::vector<double> pole_dist(m);
  for (std::size_t i = 0; i < m; ++i) {
    pole_dist[i] = std::pow(geodesic(grid.points[i], pole), two_h);
  }
  Eigen::MatrixXd entries(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    entries(i, i) = pole_dist[i];
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v =
          0.5 * (pole_dist[i] + pole_dist[j] -
                 std::pow(geodesic(grid.points[i], grid.points[j]), two_h));
      if (v < -1e-12) {
        throw std::runtime_error(
            "build_cov: negative covariance entry, kernel non-negativity is "
            "violated");
      }
      entries(i, j) = v;
      entries(j, i) = v;
    }
  }
  return {std::move(grid), hurst, std::move(entries), std::nullopt, 0.0};
}

// Cholesky with an escalating jitter ladder {0, 1e-12, 1e-10, 1e-8} relative
// to the largest diagonal entry. Rows that are exactly zero (the pole) are
// pivoted out first and reinserted as zero rows of the factor; exact grid
// duplicates share their representative's factor row, so the reduced matrix
// stays away from the structural rank deficiency. Failure at the top of the
// ladder signals a kernel bug, not a tuning problem.
inline CovMatrix factorize(CovMatrix cov) {
  const Eigen::Index m = cov.entries.rows();
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    max_diag = std::max(max_diag, cov.entries(i, i));
  }
  constexpr Eigen::Index kZeroRow = -1;
  std::vector<Eigen::Index> reduced_of(m, kZeroRow);  // row -> reduced index
  std::vector<Eigen::Index> live;                     // reduced -> first row
  std::map<std::vector<double>, Eigen::Index> seen;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (cov.entries(i, i) == 0.0) continue;  // the pole: a row of exact zeros
    const auto [it, fresh] = seen.try_emplace(
        cov.grid.points[static_cast<std::size_t>(i)].coords(),
        static_cast<Eigen::Index>(live.size()));
    if (fresh) live.push_back(i);
    reduced_of[i] = it->second;
  }
  const Eigen::Index k = static_cast<Eigen::Index>(live.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      sub(a, b) = cov.entries(live[a], live[b]);
    }
  }
  for (double rel : {0.0, 1e-12, 1e-10, 1e-8}) {
    const double jitter = rel * max_diag;
    Eigen::MatrixXd shifted = sub;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd full = Eigen::MatrixXd::Zero(m, m);
      const Eigen::MatrixXd lower = llt.matrixL();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (reduced_of[i] == kZeroRow) continue;
        for (Eigen::Index b = 0; b <= reduced_of[i]; ++b) {
          full(i, live[b]) = lower(reduced_of[i], b);
        }
      }
      cov.factor = std::move(full);
      cov.jitter_used = jitter;
      return cov;
    }
  }
  throw std::runtime_error(
      "factorize: covariance not positive semi-definite within the jitter "
      "ladder; the kernel assembly is broken");
}

// One Gaussian draw of the field on the grid.
struct FieldSample {
  std::vector<double> values;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::size_t kBlockSamples = 256;

// Fixed-size sample blocks handed to a small thread pool. The block -> RNG
// mapping is what makes results independent of the worker count.
template <class Fn>
void run_blocks(std::size_t n_samples, unsigned n_workers, Fn&& fn) {
  const std::size_t n_blocks = (n_samples + kBlockSamples - 1) / kBlockSamples;
  if (n_workers == 0) n_workers = std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(
      std::min<std::size_t>(n_workers, std::max<std::size_t>(1, n_blocks)));
  std::atomic<std::size_t> next{0};
  auto body = [&]() {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) break;
      const std::size_t begin = b * kBlockSamples;
      const std::size_t count = std::min(kBlockSamples, n_samples - begin);
      fn(b, begin, count);
    }
  };
  if (n_workers == 1) {
    body();
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) workers.emplace_back(body);
  for (auto& t : workers) t.join();
}

}  // namespace detail

// Stream k of a master seed; streams are decorrelated by hashing, so any
// worker (or any sample block) can own stream k without sharing state.
inline std::mt19937_64 stream_rng(std::uint64_t master_seed,
                                  std::uint64_t stream) {
  using detail::splitmix64;
  return std::mt19937_64(splitmix64(splitmix64(master_seed) ^
                                    splitmix64(stream + 0x51ed2701a2f3c4b5ULL)));
}

inline FieldSample sample_field(const CovMatrix& cov, std::mt19937_64& rng) {
  if (!cov.factor) {
    throw std::invalid_argument("sample_field: factorize the covariance first");
  }
  const Eigen::Index m = cov.entries.rows();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = gauss(rng);
  Eigen::VectorXd v = (*cov.factor) * z;
  return {std::vector<double>(v.data(), v.data() + m)};
}

// Weighted fraction of the grid where the sample is <= 0; the discrete
// stand-in for the occupation time Z_-.
inline double occupation_below_zero(const FieldSample& sample,
                                    const SphereGrid& grid) {
  if (sample.values.size() != grid.size()) {
    throw std::invalid_argument("occupation_below_zero: sample/grid mismatch");
  }
  double below = 0.0, total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    total += grid.weights[i];
    if (sample.values[i] <= 0.0) below += grid.weights[i];
  }
  return below / total;
}

// Occupation-time draws for n_samples independent fields, parallel over
// sample blocks; entry i is sample i regardless of scheduling.
inline std::vector<double> occupation_samples(const CovMatrix& cov,
                                              std::size_t n_samples,
                                              std::uint64_t master_seed,
                                              unsigned n_workers = 0) {
  if (!cov.factor) {
    throw std::invalid_argument("occupation_samples: factorize first");
  }
  const Eigen::Index m = cov.entries.rows();
  const Eigen::MatrixXd& lower = *cov.factor;
  double total_w = 0.0;
  for (double w : cov.grid.weights) total_w += w;
  std::vector<double> out(n_samples);
  detail::run_blocks(n_samples, n_workers, [&](std::size_t block,
                                               std::size_t begin,
                                               std::size_t count) {
    std::mt19937_64 rng = stream_rng(master_seed, block);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd z(m, count);
    for (std::size_t j = 0; j < count; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) z(i, j) = gauss(rng);
    }
    Eigen::MatrixXd v = lower * z;
    for (std::size_t j = 0; j < count; ++j) {
      double below = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (v(i, j) <= 0.0) below += cov.grid.weights[i];
      }
      out[begin + j] = below / total_w;
    }
  });
  return out;
}

struct PersistenceEntry {
  double epsilon;
  double p_hat;
  double half_width;  // 1.96 * binomial standard error
};

struct PersistenceCurve {
  std::vector<PersistenceEntry> entries;
  std::size_t n_samples;
  GridKind grid_kind;
  std::size_t grid_size;
  double hurst;
  int d;
  std::uint64_t master_seed;
};

// Monte Carlo estimate of P(max over grid < epsilon) for every epsilon in
// one pass over a shared sample set. Sharing the samples makes p_hat exactly
// monotone in epsilon and reduces comparison variance, at the cost of
// independence across epsilon values.
inline PersistenceCurve persistence_curve(double hurst, const SphereGrid& grid,
                                          const std::vector<double>& eps_list,
                                          std::size_t n_samples,
                                          std::uint64_t master_seed,
                                          unsigned n_workers = 0) {
  require_hurst(hurst, "persistence_curve");
  if (eps_list.empty()) {
    throw std::invalid_argument("persistence_curve: need at least one epsilon");
  }
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) {
      throw std::invalid_argument("persistence_curve: epsilon must be positive");
    }
    if (i > 0 && !(eps_list[i] > eps_list[i - 1])) {
      throw std::invalid_argument("persistence_curve: epsilon list must be ascending");
    }
  }
  if (n_samples < 1000) {
    throw std::invalid_argument("persistence_curve: need at least 1000 samples");
  }
  const CovMatrix cov = factorize(build_cov(hurst, grid));
  const Eigen::MatrixXd& lower = *cov.factor;
  const Eigen::Index m = lower.rows();

  std::mutex merge_mutex;
  std::vector<std::int64_t> counts(eps_list.size(), 0);
  detail::run_blocks(n_samples, n_workers, [&](std::size_t block,
                                               std::size_t /*begin*/,
                                               std::size_t count) {
    std::mt19937_64 rng = stream_rng(master_seed, block);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd z(m, count);
    for (std::size_t j = 0; j < count; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) z(i, j) = gauss(rng);
    }
    Eigen::MatrixXd v = lower * z;
    std::vector<std::int64_t> local(eps_list.size(), 0);
    for (std::size_t j = 0; j < count; ++j) {
      const double mx = v.col(j).maxCoeff();
      for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (mx < eps_list[k]) ++local[k];
      }
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (std::size_t k = 0; k < eps_list.size(); ++k) counts[k] += local[k];
  });

  PersistenceCurve curve;
  curve.n_samples = n_samples;
  curve.grid_kind = grid.kind;
  curve.grid_size = grid.size();
  curve.hurst = hurst;
  curve.d = grid.dim();
  curve.master_seed = master_seed;
  const double n = static_cast<double>(n_samples);
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const double p = counts[k] / n;
    curve.entries.push_back(
        {eps_list[k], p, 1.96 * std::sqrt(p * (1.0 - p) / n)});
  }
  return curve;
}

struct ExponentFit {
  double plain_slope = 0.0;
  double plain_stderr = 0.0;
  bool log_corrected_valid = false;  // needs every |log eps| bounded away from 0
  double log_corrected_slope = 0.0;
  double log_corrected_stderr = 0.0;
  double log_correction_coeff = 0.0;  // coefficient of log|log eps|
};

// Weighted least squares of log p_hat against log eps (weights from the
// delta-method variance of log p_hat), plus a joint fit against log eps and
// log|log eps|. The persistence law carries a |log eps| correction, which
// biases plain fits at desk scale, so both slopes are reported.
inline ExponentFit fit_persistence_exponent(const PersistenceCurve& curve) {
  std::vector<double> x, y, wt, ll;
  bool log_ok = true;
  for (const auto& e : curve.entries) {
    if (!(e.p_hat > 0.0) || !(e.p_hat < 1.0)) continue;
    x.push_back(std::log(e.epsilon));
    y.push_back(std::log(e.p_hat));
    // Var(log p_hat) ~ (1-p) / (n p)
    wt.push_back(curve.n_samples * e.p_hat / (1.0 - e.p_hat));
    const double al = std::abs(std::log(e.epsilon));
    if (al < 1e-9) {
      log_ok = false;
      ll.push_back(0.0);
    } else {
      ll.push_back(std::log(al));
    }
  }
  const std::size_t n = x.size();
  if (n < 3) {
    throw std::runtime_error(
        "fit_persistence_exponent: need at least 3 entries with 0 < p_hat < 1");
  }
  ExponentFit fit;
  {
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sw += wt[i]; swx += wt[i] * x[i]; swy += wt[i] * y[i];
      swxx += wt[i] * x[i] * x[i]; swxy += wt[i] * x[i] * y[i];
    }
    const double den = sw * swxx - swx * swx;
    fit.plain_slope = (sw * swxy - swx * swy) / den;
    fit.plain_stderr = std::sqrt(sw / den);
  }
  if (log_ok && n >= 3) {
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      design(i, 0) = 1.0;
      design(i, 1) = x[i];
      design(i, 2) = ll[i];
      rhs(i) = y[i];
    }
    const Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(wt.data(), n);
    const Eigen::MatrixXd xtwx =
        design.transpose() * w.asDiagonal() * design;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(xtwx);
    if (lu.isInvertible()) {
      const Eigen::VectorXd beta =
          lu.solve(design.transpose() * (w.asDiagonal() * rhs));
      const Eigen::MatrixXd covb = lu.inverse();
      fit.log_corrected_valid = true;
      fit.log_corrected_slope = beta(1);
      fit.log_corrected_stderr = std::sqrt(covb(1, 1));
      fit.log_correction_coeff = beta(2);
    }
  }
  return fit;
}

struct SlepianCheck {
  double p_full;
  double p_a;
  double p_b;
  double margin;  // p_full - p_a p_b + 3 combined standard errors
};

// Product inequality P(Y <= eps on A u B) >= P(on A) P(on B) for the
// positively correlated field, estimated from one shared sample set.
inline SlepianCheck slepian_product_check(double hurst, const SphereGrid& grid,
                                          const std::vector<std::size_t>& set_a,
                                          const std::vector<std::size_t>& set_b,
                                          double eps, std::size_t n_samples,
                                          std::uint64_t master_seed,
                                          unsigned n_workers = 0) {
  require_hurst(hurst, "slepian_product_check");
  if (set_a.empty() && set_b.empty()) {
    throw std::invalid_argument("slepian_product_check: empty split");
  }
  std::vector<bool> covered(grid.size(), false);
  for (std::size_t i : set_a) covered.at(i) = true;
  for (std::size_t i : set_b) covered.at(i) = true;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) {
      throw std::invalid_argument(
          "slepian_product_check: A and B must cover the grid");
    }
  }
  const CovMatrix cov = factorize(build_cov(hurst, grid));
  const Eigen::MatrixXd& lower = *cov.factor;
  const Eigen::Index m = lower.rows();

  std::mutex merge_mutex;
  std::int64_t n_full = 0, n_a = 0, n_b = 0;
  detail::run_blocks(n_samples, n_workers, [&](std::size_t block,
                                               std::size_t /*begin*/,
                                               std::size_t count) {
    std::mt19937_64 rng = stream_rng(master_seed, block);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd z(m, count);
    for (std::size_t j = 0; j < count; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) z(i, j) = gauss(rng);
    }
    Eigen::MatrixXd v = lower * z;
    std::int64_t lf = 0, la = 0, lb = 0;
    for (std::size_t j = 0; j < count; ++j) {
      double max_a = -std::numeric_limits<double>::infinity();
      double max_b = max_a;
      for (std::size_t i : set_a) max_a = std::max(max_a, v(i, j));
      for (std::size_t i : set_b) max_b = std::max(max_b, v(i, j));
      // an empty side has max -inf, hence probability one
      const bool below_a = max_a <= eps;
      const bool below_b = max_b <= eps;
      if (below_a) ++la;
      if (below_b) ++lb;
      if (below_a && below_b) ++lf;
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    n_full += lf;
    n_a += la;
    n_b += lb;
  });

  const double n = static_cast<double>(n_samples);
  const double pf = n_full / n, pa = n_a / n, pb = n_b / n;
  auto se = [n](double p) { return std::sqrt(p * (1.0 - p) / n); };
  const double combined =
      std::sqrt(se(pf) * se(pf) + pb * pb * se(pa) * se(pa) +
                pa * pa * se(pb) * se(pb));
  return {pf, pa, pb, pf - pa * pb + 3.0 * combined};
}

}  // namespace sfbm
