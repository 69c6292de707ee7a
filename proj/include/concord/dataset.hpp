#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "concord/error.hpp"
#include "concord/linalg.hpp"
#include "concord/rng.hpp"

namespace concord {

enum class FeatureKind { numeric, binary };

/// Lowercase, trim, and collapse internal whitespace runs. Feature names are
/// always compared in this canonical form.
inline std::string canonicalize(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  bool expert_flagged = false;
  double observed_min = 0.0;
  double observed_max = 0.0;

  bool operator==(const FeatureSpec&) const = default;
};

struct Dataset {
  std::vector<FeatureSpec> features;
  Matrix rows;              // n x d
  std::vector<int> labels;  // each 0 or 1

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_features() const { return features.size(); }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> names;
    names.reserve(features.size());
    for (const auto& f : features) names.push_back(f.name);
    return names;
  }

  std::optional<std::size_t> feature_index(std::string_view name) const {
    const std::string canon = canonicalize(name);
    for (std::size_t j = 0; j < features.size(); ++j)
      if (canonicalize(features[j].name) == canon) return j;
    return std::nullopt;
  }

  std::vector<std::string> expert_names() const {
    std::vector<std::string> names;
    for (const auto& f : features)
      if (f.expert_flagged) names.push_back(f.name);
    return names;
  }

  Vector column(std::size_t j) const {
    Vector col(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][j];
    return col;
  }

  void validate() const {
    if (rows.size() != labels.size())
      throw Error("dataset row count does not match label count");
    const std::size_t d = features.size();
    std::set<std::string> seen;
    for (const auto& f : features) {
      if (f.name.empty()) throw Error("dataset has an empty feature name");
      if (!seen.insert(f.name).second)
        throw Error("duplicate feature name: " + f.name);
      if (f.observed_min > f.observed_max)
        throw Error("feature " + f.name + " has observed_min > observed_max");
    }
    for (const auto& row : rows) {
      if (row.size() != d) throw Error("dataset row width does not match feature count");
      for (double v : row)
        if (!std::isfinite(v)) throw Error("dataset contains a non-finite value");
    }
    for (int y : labels)
      if (y != 0 && y != 1) throw Error("dataset label outside {0,1}");
  }

  bool operator==(const Dataset&) const = default;
};

struct StandardizationParams {
  Vector mean;
  Vector scale;  // strictly positive; constant columns carry scale 1

  bool operator==(const StandardizationParams&) const = default;
};

struct SyntheticSpec {
  std::size_t d = 0;
  std::size_t n = 0;
  Vector beta;             // length d generative coefficients
  double intercept = 0.0;
  Matrix correlation;      // d x d, symmetric, unit diagonal, PSD
  std::uint64_t seed = 0;
};

namespace detail {

inline void refresh_observed_range(Dataset& data) {
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    double lo = data.rows.empty() ? 0.0 : data.rows[0][j];
    double hi = lo;
    for (const auto& row : data.rows) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    data.features[j].observed_min = lo;
    data.features[j].observed_max = hi;
  }
}

inline FeatureKind detect_kind(const Dataset& data, std::size_t j) {
  for (const auto& row : data.rows)
    if (row[j] != 0.0 && row[j] != 1.0) return FeatureKind::numeric;
  return FeatureKind::binary;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

inline double parse_cell(const std::string& raw, std::size_t line_no, std::size_t col_no) {
  const std::string cell = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
    throw Error("unparsable numeric cell '" + cell + "' at line " + std::to_string(line_no) +
                ", column " + std::to_string(col_no));
  return value;
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Load a comma-delimited, header-first CSV. The label column is removed from
/// the feature list; expert_names are matched canonically against the header.
inline Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                        const std::vector<std::string>& expert_names = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error("empty CSV file: " + path.string());

  const std::vector<std::string> header_raw = detail::split_csv_line(lines[0]);
  std::vector<std::string> header;
  header.reserve(header_raw.size());
  for (const auto& h : header_raw) header.push_back(detail::trim(h));

  std::set<std::string> seen;
  for (const auto& h : header) {
    if (h.empty()) throw Error("empty column name in CSV header");
    if (!seen.insert(h).second) throw Error("duplicate header name: " + h);
  }

  std::optional<std::size_t> label_col;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == label_column) label_col = j;
  if (!label_col) throw Error("label column '" + label_column + "' not found in header");

  Dataset data;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == *label_col) continue;
    data.features.push_back({header[j], FeatureKind::numeric, false, 0.0, 0.0});
  }
  const std::size_t d = data.features.size();

  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto cells = detail::split_csv_line(lines[li]);
    if (cells.size() != header.size())
      throw Error("line " + std::to_string(li + 1) + " has " + std::to_string(cells.size()) +
                  " cells, expected " + std::to_string(header.size()));
    Vector row;
    row.reserve(d);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double v = detail::parse_cell(cells[j], li + 1, j + 1);
      if (j == *label_col) {
        if (v != 0.0 && v != 1.0)
          throw Error("label value " + detail::trim(cells[j]) + " at line " +
                      std::to_string(li + 1) + " is outside {0,1}");
        data.labels.push_back(static_cast<int>(v));
      } else {
        row.push_back(v);
      }
    }
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty()) throw Error("CSV has no data rows: " + path.string());

  for (std::size_t j = 0; j < d; ++j) data.features[j].kind = detail::detect_kind(data, j);
  detail::refresh_observed_range(data);

  for (const auto& name : expert_names) {
    const auto idx = data.feature_index(name);
    if (!idx) throw Error("expert feature '" + name + "' not found in header");
    data.features[*idx].expert_flagged = true;
  }

  data.validate();
  return data;
}

/// Write a dataset back to CSV with full-precision values, so a reload
/// reproduces it field for field.
inline void write_csv(const Dataset& data, const std::filesystem::path& path,
                      const std::string& label_column = "label") {
  for (const auto& f : data.features)
    if (f.name == label_column)
      throw Error("label column name '" + label_column + "' collides with a feature");
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  for (const auto& f : data.features) out << f.name << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (double v : data.rows[i]) out << detail::format_double(v) << ',';
    out << data.labels[i] << '\n';
  }
}

inline double sigmoid_value(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

/// Draw correlated standard Gaussian rows via the Cholesky factor of
/// spec.correlation and Bernoulli labels from a logistic model on them.
/// A pure function of its argument: equal SyntheticSpec values produce equal datasets.
inline Dataset synthesize(const SyntheticSpec& spec) {
  if (spec.d == 0 || spec.n == 0) throw Error("synthetic spec requires n >= 1 and d >= 1");
  if (spec.beta.size() != spec.d)
    throw Error("synthetic beta length does not match feature count");
  if (spec.correlation.size() != spec.d)
    throw Error("synthetic correlation matrix must be d x d");
  if (!is_symmetric_unit_diagonal(spec.correlation))
    throw Error("synthetic correlation matrix must be symmetric with unit diagonal");
  const Matrix lower = cholesky_psd(spec.correlation);

  Dataset data;
  for (std::size_t j = 0; j < spec.d; ++j)
    data.features.push_back({"f" + std::to_string(j + 1), FeatureKind::numeric, false, 0.0, 0.0});

  Rng rng(spec.seed);
  Vector z(spec.d);
  data.rows.reserve(spec.n);
  data.labels.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (auto& v : z) v = rng.next_normal();
    Vector row(spec.d, 0.0);
    for (std::size_t r = 0; r < spec.d; ++r)
      for (std::size_t c = 0; c <= r; ++c) row[r] += lower[r][c] * z[c];
    double margin = spec.intercept;
    for (std::size_t j = 0; j < spec.d; ++j) margin += spec.beta[j] * row[j];
    data.labels.push_back(rng.next_double() < sigmoid_value(margin) ? 1 : 0);
    data.rows.push_back(std::move(row));
  }
  detail::refresh_observed_range(data);
  data.validate();
  return data;
}

/// Center and scale numeric columns to zero mean and unit population standard
/// deviation. Columns with deviation below 1e-12 are centered only (scale 1),
/// and binary columns are left untouched.
inline std::pair<Dataset, StandardizationParams> standardize(const Dataset& data) {
  if (data.n_rows() == 0) throw Error("cannot standardize an empty dataset");
  const std::size_t d = data.n_features();
  const double n = static_cast<double>(data.n_rows());

  StandardizationParams params{Vector(d, 0.0), Vector(d, 1.0)};
  Dataset out = data;
  for (std::size_t j = 0; j < d; ++j) {
    if (data.features[j].kind == FeatureKind::binary) continue;
    double mean = 0.0;
    for (const auto& row : data.rows) mean += row[j];
    mean /= n;
    double var = 0.0;
    for (const auto& row : data.rows) var += (row[j] - mean) * (row[j] - mean);
    var /= n;
    const double sd = std::sqrt(var);
    params.mean[j] = mean;
    params.scale[j] = sd < 1e-12 ? 1.0 : sd;
    for (auto& row : out.rows) row[j] = (row[j] - params.mean[j]) / params.scale[j];
  }
  detail::refresh_observed_range(out);
  return {std::move(out), std::move(params)};
}

/// Exact inverse of standardize given the returned parameters.
inline Dataset destandardize(const Dataset& data, const StandardizationParams& params) {
  Dataset out = data;
  for (auto& row : out.rows)
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = row[j] * params.scale[j] + params.mean[j];
  detail::refresh_observed_range(out);
  return out;
}

}  // namespace concord
