#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "concord/agreement.hpp"
#include "concord/dataset.hpp"
#include "concord/error.hpp"
#include "concord/neural.hpp"
#include "concord/rng.hpp"

namespace concord {

struct CsvSource {
  std::string path;
  std::string label_column = "label";
  std::vector<std::string> expert_features;
};

struct SyntheticConfig {
  std::size_t n = 0;
  std::size_t d = 0;
  Vector beta;
  double intercept = 0.0;
  Matrix correlation;  // d x d, identity when not configured
  std::optional<std::uint64_t> seed;  // defaults to a seed derived from the master
};

struct L1Config {
  double lambda = 0.01;
  std::size_t max_iterations = 10000;
  double tolerance = 1e-8;
};

struct GbtConfig {
  std::size_t rounds = 50;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  double reg_lambda = 1.0;
};

struct NnConfig {
  std::vector<std::size_t> hidden{16, 8};
  std::size_t conv_filters = 0;
  std::size_t conv_width = 3;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
};

struct Pairing {
  std::string model;      // l1 | gbt | nn
  std::string explainer;  // shapley | shapley_exact | shapley_sampled | linear_coef | dtd
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::variant<CsvSource, SyntheticConfig> source;
  bool standardize = true;
  std::size_t background_size = 64;
  std::optional<L1Config> l1;
  std::optional<GbtConfig> gbt;
  std::optional<NnConfig> nn;
  std::vector<Pairing> pairings;
  std::size_t permutations = 2000;
  std::vector<std::size_t> n_values{1, 3, 5, 10};
  AggregationMode aggregation = AggregationMode::abs_sum;
  std::vector<std::string> formats{"json", "csv", "svg"};
  std::string digest;
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline bool is_uint(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

inline void require_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                         const std::string& where, std::vector<std::string>& issues) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) issues.push_back(where + ": unknown key '" + key + "'");
  }
}

inline Matrix parse_correlation(const nlohmann::json& node, std::size_t d,
                                std::vector<std::string>& issues) {
  if (node.is_array()) {
    Matrix m;
    for (const auto& row : node) m.push_back(row.get<Vector>());
    if (m.size() != d) issues.push_back("data.synthetic.correlation: matrix must be d x d");
    for (const auto& row : m)
      if (row.size() != d) issues.push_back("data.synthetic.correlation: matrix must be d x d");
    return m;
  }
  if (node.is_object()) {
    const std::string kind = node.value("kind", "");
    if (kind == "identity") {
      require_keys(node, {"kind"}, "data.synthetic.correlation", issues);
      return identity_matrix(d);
    }
    if (kind == "block") {
      require_keys(node, {"kind", "rho", "indices"}, "data.synthetic.correlation", issues);
      const double rho = node.value("rho", 0.0);
      if (!(rho > -1.0 && rho < 1.0))
        issues.push_back("data.synthetic.correlation.rho: must lie in (-1, 1)");
      Matrix m = identity_matrix(d);
      std::vector<std::size_t> indices;
      if (node.contains("indices")) indices = node["indices"].get<std::vector<std::size_t>>();
      for (const std::size_t i : indices)
        if (i >= d) issues.push_back("data.synthetic.correlation.indices: index out of range");
      for (const std::size_t i : indices)
        for (const std::size_t j : indices)
          if (i != j && i < d && j < d) m[i][j] = rho;
      return m;
    }
    issues.push_back("data.synthetic.correlation.kind: expected identity or block");
    return identity_matrix(d);
  }
  issues.push_back("data.synthetic.correlation: expected a matrix or a kind object");
  return identity_matrix(d);
}

}  // namespace detail

inline const std::set<std::string>& known_explainers() {
  static const std::set<std::string> kinds{"shapley", "shapley_exact", "shapley_sampled",
                                           "linear_coef", "dtd"};
  return kinds;
}

/// Parses and fully validates; every problem found is reported in one error.
inline PipelineConfig parse_config(const nlohmann::json& doc) {
  std::vector<std::string> issues;
  PipelineConfig cfg;
  if (!doc.is_object()) throw ConfigError("config root must be an object");

  detail::require_keys(doc,
                       {"seed", "output_dir", "data", "standardize", "background_size", "models",
                        "pairings", "permutations", "n_values", "aggregation", "formats"},
                       "config", issues);

  if (doc.contains("seed")) {
    if (detail::is_uint(doc["seed"]))
      cfg.seed = doc["seed"].get<std::uint64_t>();
    else
      issues.push_back("seed: must be an unsigned integer");
  }
  if (doc.contains("output_dir")) {
    if (doc["output_dir"].is_string() && !doc["output_dir"].get<std::string>().empty())
      cfg.output_dir = doc["output_dir"].get<std::string>();
    else
      issues.push_back("output_dir: must be a non-empty string");
  }
  if (doc.contains("standardize")) {
    if (doc["standardize"].is_boolean())
      cfg.standardize = doc["standardize"].get<bool>();
    else
      issues.push_back("standardize: must be a boolean");
  }
  if (doc.contains("background_size")) {
    if (detail::is_uint(doc["background_size"]) && doc["background_size"].get<std::size_t>() > 0)
      cfg.background_size = doc["background_size"].get<std::size_t>();
    else
      issues.push_back("background_size: must be a positive integer");
  }
  if (doc.contains("permutations")) {
    if (detail::is_uint(doc["permutations"]) && doc["permutations"].get<std::size_t>() > 0)
      cfg.permutations = doc["permutations"].get<std::size_t>();
    else
      issues.push_back("permutations: must be a positive integer");
  }
  if (doc.contains("n_values")) {
    bool ok = doc["n_values"].is_array() && !doc["n_values"].empty();
    if (ok)
      for (const auto& v : doc["n_values"]) ok = ok && detail::is_uint(v) && v.get<std::size_t>() > 0;
    if (ok) {
      cfg.n_values = doc["n_values"].get<std::vector<std::size_t>>();
      if (std::find(cfg.n_values.begin(), cfg.n_values.end(), std::size_t{5}) ==
          cfg.n_values.end())
        issues.push_back("n_values: must include 5");
    } else {
      issues.push_back("n_values: must be a non-empty array of positive integers");
    }
  }
  if (doc.contains("aggregation")) {
    try {
      cfg.aggregation = aggregation_from_string(doc["aggregation"].get<std::string>());
    } catch (const std::exception& e) {
      issues.push_back(std::string("aggregation: ") + e.what());
    }
  }
  if (doc.contains("formats")) {
    if (!doc["formats"].is_array()) {
      issues.push_back("formats: must be an array");
    } else {
      cfg.formats.clear();
      for (const auto& f : doc["formats"]) {
        const std::string token = f.is_string() ? f.get<std::string>() : "";
        if (token != "json" && token != "csv" && token != "svg")
          issues.push_back("formats: unknown format token '" + token + "'");
        else
          cfg.formats.push_back(token);
      }
    }
  }

  // data source
  if (!doc.contains("data") || !doc["data"].is_object()) {
    issues.push_back("data: section is required");
  } else {
    const auto& data = doc["data"];
    detail::require_keys(data, {"csv", "synthetic"}, "data", issues);
    const bool has_csv = data.contains("csv");
    const bool has_syn = data.contains("synthetic");
    if (has_csv == has_syn) {
      issues.push_back("data: exactly one of csv or synthetic is required");
    } else if (has_csv) {
      CsvSource src;
      const auto& csv = data["csv"];
      detail::require_keys(csv, {"path", "label_column", "expert_features"}, "data.csv", issues);
      if (!csv.contains("path") || !csv["path"].is_string() || csv["path"].get<std::string>().empty())
        issues.push_back("data.csv.path: required non-empty string");
      else
        src.path = csv["path"].get<std::string>();
      if (csv.contains("label_column")) src.label_column = csv["label_column"].get<std::string>();
      if (csv.contains("expert_features"))
        src.expert_features = csv["expert_features"].get<std::vector<std::string>>();
      cfg.source = std::move(src);
    } else {
      SyntheticConfig src;
      const auto& syn = data["synthetic"];
      detail::require_keys(syn, {"n", "d", "beta", "intercept", "correlation", "seed"},
                           "data.synthetic", issues);
      if (!syn.contains("n") || !detail::is_uint(syn["n"]) || syn["n"].get<std::size_t>() == 0)
        issues.push_back("data.synthetic.n: required positive integer");
      else
        src.n = syn["n"].get<std::size_t>();
      if (!syn.contains("d") || !detail::is_uint(syn["d"]) || syn["d"].get<std::size_t>() == 0)
        issues.push_back("data.synthetic.d: required positive integer");
      else
        src.d = syn["d"].get<std::size_t>();
      if (!syn.contains("beta") || !syn["beta"].is_array())
        issues.push_back("data.synthetic.beta: required array of reals");
      else
        src.beta = syn["beta"].get<Vector>();
      if (src.d > 0 && !src.beta.empty() && src.beta.size() != src.d)
        issues.push_back("data.synthetic.beta: length must equal d");
      if (syn.contains("intercept")) {
        src.intercept = syn["intercept"].get<double>();
        if (!std::isfinite(src.intercept)) issues.push_back("data.synthetic.intercept: must be finite");
      }
      src.correlation = syn.contains("correlation") && src.d > 0
                            ? detail::parse_correlation(syn["correlation"], src.d, issues)
                            : identity_matrix(src.d);
      if (syn.contains("seed")) {
        if (detail::is_uint(syn["seed"]))
          src.seed = syn["seed"].get<std::uint64_t>();
        else
          issues.push_back("data.synthetic.seed: must be an unsigned integer");
      }
      cfg.source = std::move(src);
    }
  }

  // model sections; all three are enabled with defaults when the section is absent
  if (!doc.contains("models")) {
    cfg.l1 = L1Config{};
    cfg.gbt = GbtConfig{};
    cfg.nn = NnConfig{};
  } else if (!doc["models"].is_object()) {
    issues.push_back("models: must be an object");
  } else {
    const auto& models = doc["models"];
    detail::require_keys(models, {"l1", "gbt", "nn"}, "models", issues);
    if (models.contains("l1")) {
      L1Config m;
      const auto& node = models["l1"];
      detail::require_keys(node, {"lambda", "max_iterations", "tolerance"}, "models.l1", issues);
      if (node.contains("lambda")) m.lambda = node["lambda"].get<double>();
      if (m.lambda < 0 || !std::isfinite(m.lambda))
        issues.push_back("models.l1.lambda: must be finite and non-negative");
      if (node.contains("max_iterations")) {
        if (detail::is_uint(node["max_iterations"]))
          m.max_iterations = node["max_iterations"].get<std::size_t>();
        else
          issues.push_back("models.l1.max_iterations: must be a non-negative integer");
      }
      if (m.max_iterations == 0) issues.push_back("models.l1.max_iterations: must be positive");
      if (node.contains("tolerance")) m.tolerance = node["tolerance"].get<double>();
      if (!(m.tolerance > 0)) issues.push_back("models.l1.tolerance: must be positive");
      cfg.l1 = m;
    }
    if (models.contains("gbt")) {
      GbtConfig m;
      const auto& node = models["gbt"];
      detail::require_keys(node, {"rounds", "max_depth", "learning_rate", "reg_lambda"},
                           "models.gbt", issues);
      if (node.contains("rounds")) {
        if (detail::is_uint(node["rounds"]))
          m.rounds = node["rounds"].get<std::size_t>();
        else
          issues.push_back("models.gbt.rounds: must be a non-negative integer");
      }
      if (node.contains("max_depth")) {
        if (detail::is_uint(node["max_depth"]))
          m.max_depth = node["max_depth"].get<std::size_t>();
        else
          issues.push_back("models.gbt.max_depth: must be a positive integer");
      }
      if (m.max_depth == 0) issues.push_back("models.gbt.max_depth: must be positive");
      if (node.contains("learning_rate")) m.learning_rate = node["learning_rate"].get<double>();
      if (!(m.learning_rate > 0)) issues.push_back("models.gbt.learning_rate: must be positive");
      if (node.contains("reg_lambda")) m.reg_lambda = node["reg_lambda"].get<double>();
      if (m.reg_lambda < 0) issues.push_back("models.gbt.reg_lambda: must be non-negative");
      cfg.gbt = m;
    }
    if (models.contains("nn")) {
      NnConfig m;
      const auto& node = models["nn"];
      detail::require_keys(
          node, {"hidden", "conv_filters", "conv_width", "epochs", "batch_size", "learning_rate"},
          "models.nn", issues);
      if (node.contains("hidden")) {
        bool hidden_ok = node["hidden"].is_array();
        if (hidden_ok)
          for (const auto& h : node["hidden"]) hidden_ok = hidden_ok && detail::is_uint(h);
        if (hidden_ok)
          m.hidden = node["hidden"].get<std::vector<std::size_t>>();
        else
          issues.push_back("models.nn.hidden: must be an array of non-negative integers");
      }
      for (const std::size_t h : m.hidden)
        if (h == 0) issues.push_back("models.nn.hidden: layer sizes must be positive");
      if (node.contains("conv_filters")) {
        if (detail::is_uint(node["conv_filters"]))
          m.conv_filters = node["conv_filters"].get<std::size_t>();
        else
          issues.push_back("models.nn.conv_filters: must be a non-negative integer");
      }
      if (node.contains("conv_width")) {
        if (detail::is_uint(node["conv_width"]))
          m.conv_width = node["conv_width"].get<std::size_t>();
        else
          issues.push_back("models.nn.conv_width: must be a positive integer");
      }
      if (m.conv_filters > 0 && m.conv_width == 0)
        issues.push_back("models.nn.conv_width: must be positive");
      if (node.contains("epochs")) {
        if (detail::is_uint(node["epochs"]))
          m.epochs = node["epochs"].get<std::size_t>();
        else
          issues.push_back("models.nn.epochs: must be a non-negative integer");
      }
      if (node.contains("batch_size")) {
        if (detail::is_uint(node["batch_size"]))
          m.batch_size = node["batch_size"].get<std::size_t>();
        else
          issues.push_back("models.nn.batch_size: must be a positive integer");
      }
      if (m.batch_size == 0) issues.push_back("models.nn.batch_size: must be positive");
      if (node.contains("learning_rate")) m.learning_rate = node["learning_rate"].get<double>();
      if (!(m.learning_rate > 0)) issues.push_back("models.nn.learning_rate: must be positive");
      cfg.nn = m;
    }
  }

  // pairings; the default trio mirrors the audit design
  if (!doc.contains("pairings")) {
    cfg.pairings = {{"l1", "linear_coef"}, {"gbt", "shapley"}, {"nn", "dtd"}};
  } else if (!doc["pairings"].is_array()) {
    issues.push_back("pairings: must be an array");
  } else {
    for (const auto& node : doc["pairings"]) {
      if (!node.is_object() || !node.contains("model") || !node.contains("explainer")) {
        issues.push_back("pairings: each entry needs model and explainer");
        continue;
      }
      detail::require_keys(node, {"model", "explainer"}, "pairings entry", issues);
      cfg.pairings.push_back({node["model"].get<std::string>(), node["explainer"].get<std::string>()});
    }
  }
  for (const auto& pairing : cfg.pairings) {
    const bool have_model = (pairing.model == "l1" && cfg.l1.has_value()) ||
                            (pairing.model == "gbt" && cfg.gbt.has_value()) ||
                            (pairing.model == "nn" && cfg.nn.has_value());
    if (pairing.model != "l1" && pairing.model != "gbt" && pairing.model != "nn")
      issues.push_back("pairings: unknown model '" + pairing.model + "'");
    else if (!have_model)
      issues.push_back("pairings: model section '" + pairing.model + "' is not configured");
    if (!known_explainers().count(pairing.explainer)) {
      issues.push_back("pairings: unknown explainer '" + pairing.explainer + "'");
    } else {
      if (pairing.explainer == "dtd" && pairing.model != "nn")
        issues.push_back("pairings: dtd is only compatible with the nn model, got '" +
                         pairing.model + "'");
      if (pairing.explainer == "linear_coef" && pairing.model != "l1")
        issues.push_back("pairings: linear_coef is only compatible with the l1 model, got '" +
                         pairing.model + "'");
    }
  }
  if (cfg.pairings.size() < 2)
    issues.push_back("pairings: at least two tracks are required for pairwise agreement");
  for (std::size_t a = 0; a < cfg.pairings.size(); ++a)
    for (std::size_t b = a + 1; b < cfg.pairings.size(); ++b)
      if (cfg.pairings[a].model == cfg.pairings[b].model &&
          cfg.pairings[a].explainer == cfg.pairings[b].explainer)
        issues.push_back("pairings: duplicate pairing (" + cfg.pairings[a].model + ", " +
                         cfg.pairings[a].explainer + ")");

  if (!issues.empty()) {
    std::string message = "config validation failed:";
    for (const auto& issue : issues) message += "\n  - " + issue;
    throw ConfigError(message);
  }

  cfg.digest = detail::hex64(fnv1a64(doc.dump()));
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

/// Network shape implied by an nn section: optional conv+relu front end,
/// then dense+relu per hidden width, then the scalar head.
inline std::vector<LayerSpec> nn_architecture(const NnConfig& cfg) {
  std::vector<LayerSpec> arch;
  if (cfg.conv_filters > 0) {
    arch.push_back(LayerSpec::conv1d(cfg.conv_filters, cfg.conv_width));
    arch.push_back(LayerSpec::relu());
  }
  for (const std::size_t h : cfg.hidden) {
    arch.push_back(LayerSpec::dense(h));
    arch.push_back(LayerSpec::relu());
  }
  arch.push_back(LayerSpec::dense(1));
  return arch;
}

}  // namespace concord
