#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfbm/gaussfield.hpp"
#include "sfbm/polybasis.hpp"

namespace sfbm {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant decimal digits: enough for a lossless double round-trip,
// so re-running a command with the same seed reproduces files byte for byte.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << body;
  if (!out) throw IoError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// CSV with '# key: value' metadata lines before the header row.
class CsvBuilder {
 public:
  void meta(const std::string& key, const std::string& value) {
    body_ += "# " + key + ": " + value + "\n";
  }
  void meta(const std::string& key, double value) { meta(key, format_g17(value)); }
  void header(const std::vector<std::string>& cols) {
    append_row(cols);
  }
  void row(const std::vector<std::string>& cells) { append_row(cells); }
  const std::string& str() const { return body_; }

 private:
  void append_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }
  std::string body_;
};

inline std::string coeff_series_to_csv(const CoeffSeries& series,
                                       const std::string& quantity) {
  CsvBuilder csv;
  csv.meta("quantity", quantity);
  csv.meta("d", std::to_string(series.spec.d));
  csv.meta("source", to_string(series.source));
  csv.header({"n", "a_n"});
  for (std::size_t n = 0; n < series.size(); ++n) {
    csv.row({std::to_string(n), format_g17(series.values[n])});
  }
  return csv.str();
}

inline nlohmann::json coeff_series_to_json(const CoeffSeries& series) {
  return {{"d", series.spec.d},
          {"source", to_string(series.source)},
          {"values", series.values}};
}

inline CoeffSeries coeff_series_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  const std::string src = j.at("source").get<std::string>();
  CoeffSource source = CoeffSource::analytic;
  if (src == "closed_form") source = CoeffSource::closed_form;
  else if (src == "quadrature") source = CoeffSource::quadrature;
  else if (src != "analytic") throw std::invalid_argument("unknown source: " + src);
  return CoeffSeries(BasisSpec(d), j.at("values").get<std::vector<double>>(),
                     source);
}

inline CoeffSeries coeff_series_from_csv(const std::string& text, int d,
                                         CoeffSource source) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> values;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // column names
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("coeff_series_from_csv: malformed row: " + line);
    }
    values.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  return CoeffSeries(BasisSpec(d), std::move(values), source);
}

inline std::string grid_to_csv(const SphereGrid& grid) {
  CsvBuilder csv;
  csv.meta("quantity", "sphere_grid");
  csv.meta("kind", to_string(grid.kind));
  csv.meta("size", std::to_string(grid.size()));
  std::vector<std::string> cols;
  for (int i = 0; i < grid.dim(); ++i) cols.push_back("x" + std::to_string(i));
  cols.push_back("weight");
  csv.header(cols);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    std::vector<std::string> cells;
    for (int i = 0; i < grid.dim(); ++i) {
      cells.push_back(format_g17(grid.points[p][i]));
    }
    cells.push_back(format_g17(grid.weights[p]));
    csv.row(cells);
  }
  return csv.str();
}

inline std::string persistence_curve_to_csv(const PersistenceCurve& curve) {
  CsvBuilder csv;
  csv.meta("quantity", "persistence_probability");
  csv.meta("d", std::to_string(curve.d));
  csv.meta("hurst", curve.hurst);
  csv.meta("grid_kind", to_string(curve.grid_kind));
  csv.meta("grid_size", std::to_string(curve.grid_size));
  csv.meta("n_samples", std::to_string(curve.n_samples));
  csv.meta("master_seed", std::to_string(curve.master_seed));
  csv.header({"epsilon", "p_hat", "half_width"});
  for (const auto& e : curve.entries) {
    csv.row({format_g17(e.epsilon), format_g17(e.p_hat),
             format_g17(e.half_width)});
  }
  return csv.str();
}

inline nlohmann::json persistence_curve_to_json(const PersistenceCurve& curve) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : curve.entries) {
    entries.push_back({{"epsilon", e.epsilon},
                       {"p_hat", e.p_hat},
                       {"half_width", e.half_width}});
  }
  return {{"quantity", "persistence_probability"},
          {"d", curve.d},
          {"hurst", curve.hurst},
          {"grid_kind", to_string(curve.grid_kind)},
          {"grid_size", curve.grid_size},
          {"n_samples", curve.n_samples},
          {"master_seed", curve.master_seed},
          {"entries", entries}};
}

}  // namespace sfbm
