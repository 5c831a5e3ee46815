// Command-line surface for the SFBM toolkit: coefficient tables, decay fits,
// kernel checks, geometry fuzzing, and seeded Monte Carlo experiments, all
// emitting CSV/JSON with a sidecar JSON of the resolved configuration.
//
// Exit codes: 0 success, 2 validation error, 3 numeric error, 4 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sfbm/gaussfield.hpp"
#include "sfbm/polybasis.hpp"
#include "sfbm/rkhs.hpp"
#include "sfbm/serialize.hpp"
#include "sfbm/singular_coeffs.hpp"
#include "sfbm/specfun.hpp"
#include "sfbm/sphere_geom.hpp"
#include "sfbm/stats.hpp"
#include "sfbm/version.hpp"

using nlohmann::json;

namespace {

struct GridSpecArg {
  sfbm::GridKind kind = sfbm::GridKind::equiangular_d2;
  std::size_t size = 0;
};

GridSpecArg parse_grid_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("grid spec must look like kind:size, got " + text);
  }
  const std::string kind = text.substr(0, colon);
  GridSpecArg g;
  if (kind == "equiangular") g.kind = sfbm::GridKind::equiangular_d2;
  else if (kind == "fibonacci") g.kind = sfbm::GridKind::fibonacci_d3;
  else if (kind == "random") g.kind = sfbm::GridKind::random_uniform;
  else throw std::invalid_argument("unknown grid kind: " + kind);
  const long long n = std::stoll(text.substr(colon + 1));
  if (n < 2) throw std::invalid_argument("grid size must be >= 2");
  g.size = static_cast<std::size_t>(n);
  return g;
}

void require_format(const std::string& format) {
  if (format != "csv" && format != "json") {
    throw std::invalid_argument("format must be csv or json, got " + format);
  }
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

void write_sidecar(const std::string& out_path, const json& config,
                   const std::string& quantity) {
  json side = {{"tool", "sfbm"},
               {"version", sfbm::kVersion},
               {"quantity", quantity},
               {"timestamp", iso_timestamp()},
               {"config", config}};
  sfbm::write_text_file(out_path + ".sidecar.json", side.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// coeffs: closed-form Legendre coefficients of (1 -/+ t)^gamma
// ---------------------------------------------------------------------------
struct CoeffsCmd {
  int d = 3;
  double gamma = 0.5;
  long long n_max = 100;
  std::string side = "minus";
  std::string out;
  std::string format = "csv";
};

void run_coeffs(const CoeffsCmd& c) {
  require_format(c.format);
  const sfbm::BasisSpec spec(c.d);
  const bool plus = c.side == "plus";
  if (!plus && c.side != "minus") {
    throw std::invalid_argument("side must be minus or plus");
  }
  const sfbm::CoeffSeries series = sfbm::closed_form_series(
      spec, c.gamma, static_cast<std::size_t>(c.n_max), plus);
  const json config = {{"command", "coeffs"}, {"d", c.d},        {"gamma", c.gamma},
                       {"n_max", c.n_max},    {"side", c.side},  {"format", c.format},
                       {"out", c.out}};
  const std::string quantity = "legendre_coefficient_closed_form";
  if (c.format == "json") {
    json j = sfbm::coeff_series_to_json(series);
    j["quantity"] = quantity;
    j["gamma"] = c.gamma;
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::CsvBuilder csv;
    csv.meta("quantity", quantity);
    csv.meta("d", std::to_string(c.d));
    csv.meta("gamma", c.gamma);
    csv.meta("side", c.side);
    csv.header({"n", "a_n"});
    for (std::size_t n = 0; n < series.size(); ++n) {
      csv.row({std::to_string(n), sfbm::format_g17(series.values[n])});
    }
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, config, quantity);
}

// ---------------------------------------------------------------------------
// decay: closed-form coefficient table with predicted and fitted rates
// ---------------------------------------------------------------------------
struct DecayCmd {
  int d = 3;
  double gamma = 0.5;
  long long n_min = 100;
  long long n_max = 2000;
  std::string parity = "all";
  std::string out;
  std::string format = "csv";
};

void run_decay(const DecayCmd& c) {
  require_format(c.format);
  const sfbm::BasisSpec spec(c.d);
  sfbm::FitParity parity = sfbm::FitParity::all;
  if (c.parity == "odd") parity = sfbm::FitParity::odd;
  else if (c.parity == "even") parity = sfbm::FitParity::even;
  else if (c.parity != "all") throw std::invalid_argument("parity: all|odd|even");

  const double predicted = sfbm::is_nonneg_integer(c.gamma)
                               ? -std::numeric_limits<double>::infinity()
                               : -2.0 * c.gamma - 1.0;
  const sfbm::DecayFit fit = sfbm::fit_decay(
      [&](long long n) { return sfbm::coeff_one_minus_t_pow(spec, c.gamma, n); },
      c.n_min, c.n_max, parity);

  const json config = {{"command", "decay"},   {"d", c.d},
                       {"gamma", c.gamma},     {"n_min", c.n_min},
                       {"n_max", c.n_max},     {"parity", c.parity},
                       {"format", c.format},   {"out", c.out}};
  const std::string quantity = "legendre_coefficient_decay_rate";
  if (c.format == "json") {
    json j = {{"quantity", quantity},
              {"d", c.d},
              {"gamma", c.gamma},
              {"predicted_rate", predicted},
              {"fitted_rate", fit.slope},
              {"r_squared", fit.r_squared}};
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::CsvBuilder csv;
    csv.meta("quantity", quantity);
    csv.meta("d", std::to_string(c.d));
    csv.meta("gamma", c.gamma);
    csv.meta("r_squared", fit.r_squared);
    csv.header({"n", "a_n", "predicted_rate", "fitted_rate"});
    for (long long n = c.n_min; n <= c.n_max; ++n) {
      csv.row({std::to_string(n),
               sfbm::format_g17(sfbm::coeff_one_minus_t_pow(spec, c.gamma, n)),
               sfbm::format_g17(predicted), sfbm::format_g17(fit.slope)});
    }
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, config, quantity);
}

// ---------------------------------------------------------------------------
// kernel-check: uniform error of the truncated kernel series
// ---------------------------------------------------------------------------
struct KernelCheckCmd {
  int d = 3;
  double hurst = 0.5;
  long long n_trunc = 2000;
  long long grid_points = 1001;
  std::string out;
  std::string format = "csv";
};

void run_kernel_check(const KernelCheckCmd& c) {
  require_format(c.format);
  const sfbm::BasisSpec spec(c.d);
  const sfbm::KernelCoeffs kc = sfbm::arccos_power_coeffs(
      spec, c.hurst, static_cast<std::size_t>(c.n_trunc));
  const double two_h = 2.0 * c.hurst;
  double max_err = 0.0;
  std::vector<std::array<double, 3>> rows;
  rows.reserve(c.grid_points);
  for (long long j = 0; j < c.grid_points; ++j) {
    const double t = -1.0 + (j + 0.5) * (2.0 / c.grid_points);
    const double series = sfbm::kernel_series(kc.raw, t);
    const double target = 1.0 - std::pow(std::acos(t) / M_PI, two_h);
    max_err = std::max(max_err, std::abs(series - target));
    rows.push_back({t, series, target});
  }
  const json config = {{"command", "kernel-check"}, {"d", c.d},
                       {"hurst", c.hurst},          {"n_trunc", c.n_trunc},
                       {"grid_points", c.grid_points}, {"format", c.format},
                       {"out", c.out}};
  const std::string quantity = "kernel_series_uniform_error";
  if (c.format == "json") {
    json j = {{"quantity", quantity}, {"d", c.d},
              {"hurst", c.hurst},     {"n_trunc", c.n_trunc},
              {"max_abs_error", max_err}};
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::CsvBuilder csv;
    csv.meta("quantity", quantity);
    csv.meta("d", std::to_string(c.d));
    csv.meta("hurst", c.hurst);
    csv.meta("n_trunc", std::to_string(c.n_trunc));
    csv.meta("max_abs_error", max_err);
    csv.header({"t", "series", "target"});
    for (const auto& r : rows) {
      csv.row({sfbm::format_g17(r[0]), sfbm::format_g17(r[1]),
               sfbm::format_g17(r[2])});
    }
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, config, quantity);
}

// ---------------------------------------------------------------------------
// rkhs-bound: norm bound of the shift function
// ---------------------------------------------------------------------------
struct RkhsBoundCmd {
  int d = 3;
  double hurst = 0.25;
  double alpha = 0.25;
  double delta = 1.0;
  long long n_trunc = 2001;
  std::string out;
  std::string format = "json";
};

void run_rkhs_bound(const RkhsBoundCmd& c) {
  require_format(c.format);
  const sfbm::BasisSpec spec(c.d);
  const sfbm::RkhsShiftSpec shift(c.hurst, c.alpha, c.delta, c.d,
                                  static_cast<std::size_t>(c.n_trunc));
  const sfbm::KernelCoeffs kc = sfbm::arccos_power_coeffs(
      spec, c.hurst, static_cast<std::size_t>(c.n_trunc));
  const sfbm::NormBound nb = sfbm::norm_bound_sq(shift, kc.a);
  const json config = {{"command", "rkhs-bound"}, {"d", c.d},
                       {"hurst", c.hurst},        {"alpha", c.alpha},
                       {"delta", c.delta},        {"n_trunc", c.n_trunc},
                       {"format", c.format},      {"out", c.out}};
  const std::string quantity = "rkhs_shift_norm_bound";
  json j = {{"quantity", quantity},
            {"H", c.hurst},
            {"alpha", c.alpha},
            {"delta", c.delta},
            {"N_trunc", c.n_trunc},
            {"bound", nb.bound},
            {"tail_estimate", nb.tail_estimate},
            {"truncated_sum", nb.truncated_sum},
            {"guarded_indices", nb.guarded}};
  if (c.format == "json") {
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::CsvBuilder csv;
    csv.meta("quantity", quantity);
    csv.header({"H", "alpha", "delta", "N_trunc", "bound", "tail_estimate"});
    csv.row({sfbm::format_g17(c.hurst), sfbm::format_g17(c.alpha),
             sfbm::format_g17(c.delta), std::to_string(c.n_trunc),
             sfbm::format_g17(nb.bound), sfbm::format_g17(nb.tail_estimate)});
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, config, quantity);
}

// ---------------------------------------------------------------------------
// geometry-fuzz: comparison inequalities over random half-sphere pairs
// ---------------------------------------------------------------------------
struct GeometryFuzzCmd {
  int d = 3;
  double hurst = 0.5;
  long long pairs = 100000;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

void run_geometry_fuzz(const GeometryFuzzCmd& c) {
  require_format(c.format);
  std::mt19937_64 rng(c.seed);
  long long topo_viol = 0, norm_viol = 0, dom_viol = 0;
  double topo_worst = 0.0, norm_worst = 0.0, dom_worst = 0.0;
  for (long long i = 0; i < c.pairs; ++i) {
    auto half = [&]() {
      sfbm::SpherePoint p = sfbm::sample_uniform(c.d, rng);
      if (p[0] < 0.0) {
        std::vector<double> flipped = p.coords();
        flipped[0] = -flipped[0];
        return sfbm::SpherePoint(flipped);
      }
      return p;
    };
    const sfbm::SpherePoint eta = half();
    const sfbm::SpherePoint zeta = half();
    const auto pe = sfbm::project_ae(eta);
    const auto pz = sfbm::project_ae(zeta);
    double plane = 0.0;
    for (std::size_t k = 0; k < pe.size(); ++k) {
      plane += (pe[k] - pz[k]) * (pe[k] - pz[k]);
    }
    plane = std::sqrt(plane);
    const double geo = sfbm::geodesic(eta, zeta);
    if (geo > plane + 1e-12) {
      ++topo_viol;
      topo_worst = std::max(topo_worst, geo - plane);
    }
    double pn = 0.0;
    for (double x : pe) pn += x * x;
    const double norm_gap =
        std::abs(std::sqrt(pn) - sfbm::geodesic(eta, sfbm::SpherePoint::north_pole(c.d)));
    if (norm_gap > 1e-12) {
      ++norm_viol;
      norm_worst = std::max(norm_worst, norm_gap);
    }
    const sfbm::DominationCheck dc = sfbm::domination_check(c.hurst, eta, zeta);
    if (dc.spherical < dc.euclidean - 1e-12) {
      ++dom_viol;
      dom_worst = std::max(dom_worst, dc.euclidean - dc.spherical);
    }
  }
  const json config = {{"command", "geometry-fuzz"}, {"d", c.d},
                       {"hurst", c.hurst},           {"pairs", c.pairs},
                       {"seed", c.seed},             {"format", c.format},
                       {"out", c.out}};
  const std::string quantity = "comparison_inequalities";
  if (c.format == "json") {
    json j = {{"quantity", quantity},
              {"pairs", c.pairs},
              {"toponogov_violations", topo_viol},
              {"norm_preservation_violations", norm_viol},
              {"covariance_domination_violations", dom_viol}};
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::CsvBuilder csv;
    csv.meta("quantity", quantity);
    csv.meta("d", std::to_string(c.d));
    csv.meta("pairs", std::to_string(c.pairs));
    csv.header({"check", "violations", "worst_excess"});
    csv.row({"toponogov", std::to_string(topo_viol), sfbm::format_g17(topo_worst)});
    csv.row({"norm_preservation", std::to_string(norm_viol),
             sfbm::format_g17(norm_worst)});
    csv.row({"covariance_domination", std::to_string(dom_viol),
             sfbm::format_g17(dom_worst)});
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, config, quantity);
}

// ---------------------------------------------------------------------------
// shared pieces for the Monte Carlo commands
// ---------------------------------------------------------------------------
struct McCommon {
  int d = 3;
  double hurst = 0.5;
  std::string grid = "fibonacci:400";
  long long samples = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out;
  std::string format = "csv";
};

sfbm::SphereGrid build_grid(const McCommon& c) {
  const GridSpecArg g = parse_grid_spec(c.grid);
  return sfbm::make_grid(c.d, g.kind, g.size, c.seed);
}

json mc_config(const char* command, const McCommon& c) {
  return {{"command", command}, {"d", c.d},           {"hurst", c.hurst},
          {"grid", c.grid},     {"samples", c.samples}, {"seed", c.seed},
          {"workers", c.workers}, {"format", c.format}, {"out", c.out}};
}

// simulate: raw field draws on a grid
void run_simulate(const McCommon& c) {
  require_format(c.format);
  const sfbm::SphereGrid grid = build_grid(c);
  const sfbm::CovMatrix cov = sfbm::factorize(sfbm::build_cov(c.hurst, grid));
  const std::string quantity = "sfbm_field_samples";
  if (c.format == "json") {
    json samples = json::array();
    for (long long s = 0; s < c.samples; ++s) {
      std::mt19937_64 rng = sfbm::stream_rng(c.seed, s);
      samples.push_back(sfbm::sample_field(cov, rng).values);
    }
    json j = {{"quantity", quantity},  {"d", c.d},
              {"hurst", c.hurst},      {"grid", c.grid},
              {"master_seed", c.seed}, {"jitter_used", cov.jitter_used},
              {"samples", samples}};
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::CsvBuilder csv;
    csv.meta("quantity", quantity);
    csv.meta("d", std::to_string(c.d));
    csv.meta("hurst", c.hurst);
    csv.meta("grid", c.grid);
    csv.meta("master_seed", std::to_string(c.seed));
    csv.meta("jitter_used", cov.jitter_used);
    csv.header({"sample", "point", "value"});
    for (long long s = 0; s < c.samples; ++s) {
      std::mt19937_64 rng = sfbm::stream_rng(c.seed, s);
      const sfbm::FieldSample field = sfbm::sample_field(cov, rng);
      for (std::size_t p = 0; p < field.values.size(); ++p) {
        csv.row({std::to_string(s), std::to_string(p),
                 sfbm::format_g17(field.values[p])});
      }
    }
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, mc_config("simulate", c), quantity);
}

struct PersistenceCmd : McCommon {
  std::vector<double> eps;
};

void run_persistence(const PersistenceCmd& c) {
  require_format(c.format);
  const sfbm::SphereGrid grid = build_grid(c);
  const sfbm::PersistenceCurve curve = sfbm::persistence_curve(
      c.hurst, grid, c.eps, static_cast<std::size_t>(c.samples), c.seed,
      c.workers);
  // the exponent fit needs >= 3 interior probabilities; a short curve is
  // still a valid run, it just ships without slopes
  sfbm::ExponentFit fit;
  bool fit_available = true;
  try {
    fit = sfbm::fit_persistence_exponent(curve);
  } catch (const std::exception&) {
    fit_available = false;
    fit.log_corrected_valid = false;
  }
  json config = mc_config("persistence", c);
  config["eps"] = c.eps;
  const std::string quantity = "persistence_probability_and_exponent";
  if (c.format == "json") {
    json j = sfbm::persistence_curve_to_json(curve);
    j["quantity"] = quantity;
    j["fit_available"] = fit_available;
    if (fit_available) {
      j["fit_plain_slope"] = fit.plain_slope;
      j["fit_plain_stderr"] = fit.plain_stderr;
      j["fit_log_corrected_valid"] = fit.log_corrected_valid;
      j["fit_log_corrected_slope"] = fit.log_corrected_slope;
      j["fit_log_corrected_stderr"] = fit.log_corrected_stderr;
    }
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::CsvBuilder csv;
    csv.meta("quantity", quantity);
    csv.meta("d", std::to_string(curve.d));
    csv.meta("hurst", curve.hurst);
    csv.meta("grid", c.grid);
    csv.meta("n_samples", std::to_string(curve.n_samples));
    csv.meta("master_seed", std::to_string(curve.master_seed));
    csv.meta("fit_available", fit_available ? 1.0 : 0.0);
    if (fit_available) {
      csv.meta("fit_plain_slope", fit.plain_slope);
      csv.meta("fit_plain_stderr", fit.plain_stderr);
      csv.meta("fit_log_corrected_valid", fit.log_corrected_valid ? 1.0 : 0.0);
      csv.meta("fit_log_corrected_slope", fit.log_corrected_slope);
      csv.meta("fit_log_corrected_stderr", fit.log_corrected_stderr);
    }
    csv.header({"epsilon", "p_hat", "half_width"});
    for (const auto& e : curve.entries) {
      csv.row({sfbm::format_g17(e.epsilon), sfbm::format_g17(e.p_hat),
               sfbm::format_g17(e.half_width)});
    }
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, config, quantity);
}

void run_occupation(const McCommon& c) {
  require_format(c.format);
  const sfbm::SphereGrid grid = build_grid(c);
  const sfbm::CovMatrix cov = sfbm::factorize(sfbm::build_cov(c.hurst, grid));
  const std::vector<double> z = sfbm::occupation_samples(
      cov, static_cast<std::size_t>(c.samples), c.seed, c.workers);
  const double ks = sfbm::uniform_ks_distance(z);
  const std::string quantity = "occupation_time_below_zero";
  if (c.format == "json") {
    json j = {{"quantity", quantity},
              {"d", c.d},
              {"hurst", c.hurst},
              {"grid", c.grid},
              {"master_seed", c.seed},
              {"ks_distance_to_uniform", ks},
              {"samples", z}};
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::CsvBuilder csv;
    csv.meta("quantity", quantity);
    csv.meta("d", std::to_string(c.d));
    csv.meta("hurst", c.hurst);
    csv.meta("grid", c.grid);
    csv.meta("n_samples", std::to_string(c.samples));
    csv.meta("master_seed", std::to_string(c.seed));
    csv.meta("ks_distance_to_uniform", ks);
    csv.header({"sample", "z_minus"});
    for (std::size_t i = 0; i < z.size(); ++i) {
      csv.row({std::to_string(i), sfbm::format_g17(z[i])});
    }
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, mc_config("occupation", c), quantity);
}

struct SlepianCmd : McCommon {
  std::vector<double> eps;
};

void run_slepian(const SlepianCmd& c) {
  require_format(c.format);
  const sfbm::SphereGrid grid = build_grid(c);
  // hemispheric split along the first coordinate; both halves carry the
  // boundary so A u B covers the grid
  std::vector<std::size_t> set_a, set_b;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.points[i][0] >= 0.0) set_a.push_back(i);
    if (grid.points[i][0] <= 0.0) set_b.push_back(i);
  }
  const std::string quantity = "slepian_product_inequality";
  sfbm::CsvBuilder csv;
  csv.meta("quantity", quantity);
  csv.meta("d", std::to_string(c.d));
  csv.meta("hurst", c.hurst);
  csv.meta("grid", c.grid);
  csv.meta("n_samples", std::to_string(c.samples));
  csv.meta("master_seed", std::to_string(c.seed));
  csv.header({"epsilon", "p_full", "p_a", "p_b", "margin"});
  json rows = json::array();
  for (double eps : c.eps) {
    const sfbm::SlepianCheck sc = sfbm::slepian_product_check(
        c.hurst, grid, set_a, set_b, eps, static_cast<std::size_t>(c.samples),
        c.seed, c.workers);
    csv.row({sfbm::format_g17(eps), sfbm::format_g17(sc.p_full),
             sfbm::format_g17(sc.p_a), sfbm::format_g17(sc.p_b),
             sfbm::format_g17(sc.margin)});
    rows.push_back({{"epsilon", eps},
                    {"p_full", sc.p_full},
                    {"p_a", sc.p_a},
                    {"p_b", sc.p_b},
                    {"margin", sc.margin}});
  }
  json config = mc_config("slepian", c);
  config["eps"] = c.eps;
  if (c.format == "json") {
    json j = {{"quantity", quantity}, {"d", c.d}, {"hurst", c.hurst},
              {"entries", rows}};
    sfbm::write_text_file(c.out, j.dump(2) + "\n");
  } else {
    sfbm::write_text_file(c.out, csv.str());
  }
  write_sidecar(c.out, config, quantity);
}

template <class T>
void maybe_from_json(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

void mc_from_json(const json& j, McCommon& c) {
  maybe_from_json(j, "d", c.d);
  maybe_from_json(j, "hurst", c.hurst);
  maybe_from_json(j, "grid", c.grid);
  maybe_from_json(j, "samples", c.samples);
  maybe_from_json(j, "seed", c.seed);
  maybe_from_json(j, "workers", c.workers);
  maybe_from_json(j, "out", c.out);
  maybe_from_json(j, "format", c.format);
  if (c.out.empty()) throw std::invalid_argument("config: 'out' is required");
  if (!j.contains("seed")) throw std::invalid_argument("config: 'seed' is required");
}

int dispatch_config_file(const std::string& path) {
  const json j = json::parse(sfbm::read_text_file(path));
  const std::string command = j.at("command").get<std::string>();
  if (command == "coeffs") {
    CoeffsCmd c;
    maybe_from_json(j, "d", c.d);
    maybe_from_json(j, "gamma", c.gamma);
    maybe_from_json(j, "n_max", c.n_max);
    maybe_from_json(j, "side", c.side);
    maybe_from_json(j, "out", c.out);
    maybe_from_json(j, "format", c.format);
    run_coeffs(c);
  } else if (command == "decay") {
    DecayCmd c;
    maybe_from_json(j, "d", c.d);
    maybe_from_json(j, "gamma", c.gamma);
    maybe_from_json(j, "n_min", c.n_min);
    maybe_from_json(j, "n_max", c.n_max);
    maybe_from_json(j, "parity", c.parity);
    maybe_from_json(j, "out", c.out);
    maybe_from_json(j, "format", c.format);
    run_decay(c);
  } else if (command == "kernel-check") {
    KernelCheckCmd c;
    maybe_from_json(j, "d", c.d);
    maybe_from_json(j, "hurst", c.hurst);
    maybe_from_json(j, "n_trunc", c.n_trunc);
    maybe_from_json(j, "grid_points", c.grid_points);
    maybe_from_json(j, "out", c.out);
    maybe_from_json(j, "format", c.format);
    run_kernel_check(c);
  } else if (command == "rkhs-bound") {
    RkhsBoundCmd c;
    maybe_from_json(j, "d", c.d);
    maybe_from_json(j, "hurst", c.hurst);
    maybe_from_json(j, "alpha", c.alpha);
    maybe_from_json(j, "delta", c.delta);
    maybe_from_json(j, "n_trunc", c.n_trunc);
    maybe_from_json(j, "out", c.out);
    maybe_from_json(j, "format", c.format);
    run_rkhs_bound(c);
  } else if (command == "geometry-fuzz") {
    GeometryFuzzCmd c;
    maybe_from_json(j, "d", c.d);
    maybe_from_json(j, "hurst", c.hurst);
    maybe_from_json(j, "pairs", c.pairs);
    maybe_from_json(j, "seed", c.seed);
    maybe_from_json(j, "out", c.out);
    maybe_from_json(j, "format", c.format);
    run_geometry_fuzz(c);
  } else if (command == "simulate") {
    McCommon c;
    mc_from_json(j, c);
    run_simulate(c);
  } else if (command == "persistence") {
    PersistenceCmd c;
    mc_from_json(j, c);
    c.eps = j.at("eps").get<std::vector<double>>();
    run_persistence(c);
  } else if (command == "occupation") {
    McCommon c;
    mc_from_json(j, c);
    run_occupation(c);
  } else if (command == "slepian") {
    SlepianCmd c;
    mc_from_json(j, c);
    c.eps = j.at("eps").get<std::vector<double>>();
    run_slepian(c);
  } else {
    throw std::invalid_argument("unknown command in config: " + command);
  }
  return 0;
}

void add_mc_options(CLI::App* cmd, McCommon& c, bool seed_required = true) {
  cmd->add_option("--d", c.d, "sphere dimension parameter (points live on S_{d-1})");
  cmd->add_option("--hurst", c.hurst, "Hurst parameter, in (0, 1/2]");
  cmd->add_option("--grid", c.grid, "grid spec kind:size (equiangular|fibonacci|random)");
  cmd->add_option("--samples", c.samples, "number of Monte Carlo samples");
  auto* seed = cmd->add_option("--seed", c.seed, "master seed (reproducibility)");
  if (seed_required) seed->required();
  cmd->add_option("--workers", c.workers, "worker threads (0 = hardware)");
  cmd->add_option("--out", c.out, "output file path")->required();
  cmd->add_option("--format", c.format, "csv or json");
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"spherical fractional Brownian motion toolkit"};
  app.set_version_flag("--version", sfbm::kVersion);

  std::string config_path;
  app.add_option("--config", config_path, "JSON file with command + parameters");

  CoeffsCmd coeffs;
  auto* c1 = app.add_subcommand("coeffs", "closed-form Legendre coefficients of (1 -/+ t)^gamma");
  c1->add_option("--d", coeffs.d);
  c1->add_option("--gamma", coeffs.gamma);
  c1->add_option("--n-max", coeffs.n_max);
  c1->add_option("--side", coeffs.side, "minus or plus");
  c1->add_option("--out", coeffs.out)->required();
  c1->add_option("--format", coeffs.format);

  DecayCmd decay;
  auto* c2 = app.add_subcommand("decay", "coefficient table with predicted and fitted decay rates");
  c2->add_option("--d", decay.d);
  c2->add_option("--gamma", decay.gamma);
  c2->add_option("--n-min", decay.n_min);
  c2->add_option("--n-max", decay.n_max);
  c2->add_option("--parity", decay.parity);
  c2->add_option("--out", decay.out)->required();
  c2->add_option("--format", decay.format);

  KernelCheckCmd kernel;
  auto* c3 = app.add_subcommand("kernel-check", "uniform error of the truncated kernel series");
  c3->add_option("--d", kernel.d);
  c3->add_option("--hurst", kernel.hurst);
  c3->add_option("--n-trunc", kernel.n_trunc);
  c3->add_option("--grid-points", kernel.grid_points);
  c3->add_option("--out", kernel.out)->required();
  c3->add_option("--format", kernel.format);

  RkhsBoundCmd rkhs;
  auto* c4 = app.add_subcommand("rkhs-bound", "norm bound of the RKHS shift function");
  c4->add_option("--d", rkhs.d);
  c4->add_option("--hurst", rkhs.hurst);
  c4->add_option("--alpha", rkhs.alpha);
  c4->add_option("--delta", rkhs.delta);
  c4->add_option("--n-trunc", rkhs.n_trunc);
  c4->add_option("--out", rkhs.out)->required();
  c4->add_option("--format", rkhs.format);

  GeometryFuzzCmd fuzz;
  auto* c5 = app.add_subcommand("geometry-fuzz", "comparison inequalities over random pairs");
  c5->add_option("--d", fuzz.d);
  c5->add_option("--hurst", fuzz.hurst);
  c5->add_option("--pairs", fuzz.pairs);
  c5->add_option("--seed", fuzz.seed)->required();
  c5->add_option("--out", fuzz.out)->required();
  c5->add_option("--format", fuzz.format);

  McCommon simulate;
  auto* c6 = app.add_subcommand("simulate", "draw SFBM field samples on a grid");
  add_mc_options(c6, simulate);

  PersistenceCmd persistence;
  auto* c7 = app.add_subcommand("persistence", "persistence probabilities and exponent fits");
  add_mc_options(c7, persistence);
  c7->add_option("--eps", persistence.eps, "ascending epsilon list")
      ->required()
      ->delimiter(',');

  McCommon occupation;
  auto* c8 = app.add_subcommand("occupation", "occupation time below zero");
  add_mc_options(c8, occupation);

  SlepianCmd slepian;
  auto* c9 = app.add_subcommand("slepian", "product inequality on a hemispheric split");
  add_mc_options(c9, slepian);
  c9->add_option("--eps", slepian.eps, "epsilon list")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) return dispatch_config_file(config_path);
    if (c1->parsed()) run_coeffs(coeffs);
    else if (c2->parsed()) run_decay(decay);
    else if (c3->parsed()) run_kernel_check(kernel);
    else if (c4->parsed()) run_rkhs_bound(rkhs);
    else if (c5->parsed()) run_geometry_fuzz(fuzz);
    else if (c6->parsed()) run_simulate(simulate);
    else if (c7->parsed()) run_persistence(persistence);
    else if (c8->parsed()) run_occupation(occupation);
    else if (c9->parsed()) run_slepian(slepian);
    else {
      std::cerr << "error: no command given (see --help)\n";
      return 2;
    }
  } catch (const sfbm::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
