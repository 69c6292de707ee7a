#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "concord/agreement.hpp"
#include "concord/attribution.hpp"
#include "concord/config.hpp"
#include "concord/dataset.hpp"
#include "concord/error.hpp"
#include "concord/explain.hpp"
#include "concord/fixtures.hpp"
#include "concord/model.hpp"
#include "concord/rng.hpp"
#include "concord/svg.hpp"

namespace concord {

struct TrackResult {
  std::string label;
  std::string model_key;
  ExplainerKind kind = ExplainerKind::shapley_exact;
  GlobalExplanation global;
  std::string attribution_file;  // basename inside the output directory
};

struct ModelPerf {
  std::string model_key;
  double logloss = 0.0;
  double accuracy = 0.0;
};

struct ReportBundle {
  AgreementReport agreement;
  std::vector<TrackResult> tracks;
  std::vector<ModelPerf> performance;
  std::map<std::string, std::string> metadata;
  std::map<std::string, std::string> model_files;  // model key -> basename
  std::string output_dir;
};

namespace detail {

inline std::string track_letter(ExplainerKind kind) {
  switch (kind) {
    case ExplainerKind::shapley_exact:
    case ExplainerKind::shapley_sampled: return "S";
    case ExplainerKind::dtd: return "D";
    case ExplainerKind::linear_coef: return "L";
  }
  throw Error("unreachable explainer kind");
}

inline std::string sanitize_for_filename(std::string name) {
  for (char& c : name)
    if (c == ':' || c == '/' || c == '\\' || c == ' ') c = '_';
  return name;
}

inline ExplainerKind resolve_explainer(const std::string& token, std::size_t d) {
  if (token == "shapley") return d <= 12 ? ExplainerKind::shapley_exact : ExplainerKind::shapley_sampled;
  if (token == "shapley_exact") return ExplainerKind::shapley_exact;
  if (token == "shapley_sampled") return ExplainerKind::shapley_sampled;
  if (token == "dtd") return ExplainerKind::dtd;
  if (token == "linear_coef") return ExplainerKind::linear_coef;
  throw ConfigError("unknown explainer: " + token);
}

}  // namespace detail

inline nlohmann::json report_to_json(const ReportBundle& bundle) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["agreement"] = agreement_to_json(bundle.agreement);
  doc["globals"] = nlohmann::json::array();
  for (const auto& track : bundle.tracks)
    doc["globals"].push_back({{"label", track.label},
                              {"model", track.model_key},
                              {"explainer", explainer_name(track.kind)},
                              {"feature_names", track.global.feature_names},
                              {"scores", track.global.scores},
                              {"ranking", track.global.ranking}});
  doc["performance"] = nlohmann::json::array();
  for (const auto& perf : bundle.performance)
    doc["performance"].push_back(
        {{"model", perf.model_key}, {"logloss", perf.logloss}, {"accuracy", perf.accuracy}});
  nlohmann::json attributions = nlohmann::json::object();
  for (const auto& track : bundle.tracks) attributions[track.label] = track.attribution_file;
  doc["artifacts"] = {{"attributions", attributions}, {"models", bundle.model_files}};
  doc["metadata"] = bundle.metadata;
  return doc;
}

inline ReportBundle run_pipeline(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  ReportBundle bundle;
  bundle.output_dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw Error("cannot create output directory: " + config.output_dir);

  // data stage
  Dataset data;
  ExpertSet expert;
  if (const auto* csv = std::get_if<CsvSource>(&config.source)) {
    try {
      data = load_csv(csv->path, csv->label_column, csv->expert_features);
    } catch (const Error& e) {
      throw Error("data stage: " + std::string(e.what()));
    }
    expert = ExpertSet::from_names(data.expert_names());
  } else {
    const auto& syn = std::get<SyntheticConfig>(config.source);
    SyntheticSpec spec;
    spec.d = syn.d;
    spec.n = syn.n;
    spec.beta = syn.beta;
    spec.intercept = syn.intercept;
    spec.correlation = syn.correlation;
    spec.seed = syn.seed ? *syn.seed : derive_seed(config.seed, "data");
    try {
      data = synthesize(spec);
    } catch (const Error& e) {
      throw Error("data stage: " + std::string(e.what()));
    }
  }

  StandardizationParams standardization;
  if (config.standardize) {
    auto [scaled, params] = standardize(data);
    data = std::move(scaled);
    standardization = std::move(params);
  }

  // training stage; every configured section trains so that dropping a
  // pairing leaves all other report entries bit-identical
  std::map<std::string, Model> models;
  if (config.l1) {
    TrainConfig tc;
    tc.max_iterations = config.l1->max_iterations;
    tc.tolerance = config.l1->tolerance;
    try {
      LinearModel model = train_l1_logistic(data, config.l1->lambda, tc);
      if (config.standardize) model.standardization = standardization;
      models.emplace("l1", std::move(model));
    } catch (const Error& e) {
      throw Error("training stage (l1): " + std::string(e.what()));
    }
  }
  if (config.gbt) {
    try {
      models.emplace("gbt", train_gbt(data, config.gbt->rounds, config.gbt->max_depth, {},
                                      config.gbt->learning_rate, config.gbt->reg_lambda));
    } catch (const Error& e) {
      throw Error("training stage (gbt): " + std::string(e.what()));
    }
  }
  if (config.nn) {
    TrainConfig tc;
    tc.max_iterations = config.nn->epochs;
    tc.batch_size = config.nn->batch_size;
    tc.step_size = config.nn->learning_rate;
    tc.seed = derive_seed(config.seed, "train-nn");
    try {
      models.emplace("nn", train_nn(data, nn_architecture(*config.nn), tc));
    } catch (const Error& e) {
      throw Error("training stage (nn): " + std::string(e.what()));
    }
  }
  for (const auto& [key, model] : models) {
    ModelPerf perf;
    perf.model_key = key;
    perf.logloss = mean_logloss(model, data);
    perf.accuracy = accuracy(model, data);
    bundle.performance.push_back(std::move(perf));
  }

  const Background background =
      sample_background(data, config.background_size, derive_seed(config.seed, "background"));

  // explanation stage
  DtdStats dtd_stats;
  std::vector<std::string> letters;
  std::vector<ExplainerKind> kinds;
  for (const auto& pairing : config.pairings) {
    const ExplainerKind kind = detail::resolve_explainer(pairing.explainer, data.n_features());
    kinds.push_back(kind);
    letters.push_back(detail::track_letter(kind));
  }
  const std::vector<std::string> bare = letters;
  for (std::size_t i = 0; i < config.pairings.size(); ++i) {
    for (std::size_t j = 0; j < config.pairings.size(); ++j) {
      if (i != j && bare[i] == bare[j]) {
        letters[i] += ":" + config.pairings[i].model;
        break;
      }
    }
  }

  for (std::size_t i = 0; i < config.pairings.size(); ++i) {
    const auto& pairing = config.pairings[i];
    const Model& model = models.at(pairing.model);
    ExplainOptions options;
    options.permutations = config.permutations;
    options.seed = derive_seed(config.seed, "explain-" + pairing.model + "-" + pairing.explainer);
    AttributionMatrix matrix;
    try {
      matrix = explain_dataset(model, data, kinds[i], background, options, &dtd_stats);
    } catch (const Error& e) {
      throw Error("explanation stage (" + pairing.model + ", " + pairing.explainer + "): " +
                  std::string(e.what()));
    }
    TrackResult track;
    track.label = letters[i];
    track.model_key = pairing.model;
    track.kind = kinds[i];
    track.global = aggregate_global(matrix, config.aggregation, track.label);
    track.attribution_file = "attributions_" + detail::sanitize_for_filename(track.label) + ".csv";
    write_attributions_csv(matrix, (fs::path(config.output_dir) / track.attribution_file).string());
    bundle.tracks.push_back(std::move(track));
  }

  for (const auto& [key, model] : models) {
    const std::string file = "model_" + key + ".json";
    write_text_file((fs::path(config.output_dir) / file).string(), model_to_json(model).dump(2) + "\n");
    bundle.model_files[key] = file;
  }

  // agreement stage
  std::vector<GlobalExplanation> globals;
  for (const auto& track : bundle.tracks) globals.push_back(track.global);
  bundle.agreement = pairwise_report(globals, config.n_values, expert);

  bundle.metadata["rng_algorithm"] = kRngAlgorithm;
  bundle.metadata["seed_derivation"] = kSeedDerivation;
  bundle.metadata["master_seed"] = std::to_string(config.seed);
  bundle.metadata["config_digest"] = config.digest;
  bundle.metadata["aggregation"] =
      config.aggregation == AggregationMode::abs_sum ? "abs_sum" : "signed_sum";
  bundle.metadata["standardize"] = config.standardize ? "true" : "false";
  bundle.metadata["background_rows"] = std::to_string(background.rows.size());
  bundle.metadata["dtd_clamped_values"] = std::to_string(dtd_stats.clamped_values);
  bundle.metadata["dtd_negative_score_rows"] = std::to_string(dtd_stats.negative_score_rows);
  bundle.metadata["ties"] = bundle.agreement.metadata.at("ties");
  for (const auto& track : bundle.tracks)
    bundle.metadata["track:" + track.label] = track.model_key + "/" + explainer_name(track.kind);
  bundle.agreement.metadata["master_seed"] = bundle.metadata["master_seed"];
  bundle.agreement.metadata["config_digest"] = bundle.metadata["config_digest"];
  return bundle;
}

/// Writes the requested report formats and returns the paths written.
/// Per-track attribution files and model files are written by run_pipeline.
inline std::vector<std::string> emit(const ReportBundle& bundle,
                                     const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(bundle.output_dir, ec);
  if (ec) throw Error("cannot create output directory: " + bundle.output_dir);
  for (const auto& format : formats)
    if (format != "json" && format != "csv" && format != "svg")
      throw ConfigError("unknown format token: " + format);

  std::vector<std::string> written;
  for (const auto& format : formats) {
    if (format == "json") {
      const std::string path = (fs::path(bundle.output_dir) / "report.json").string();
      write_text_file(path, report_to_json(bundle).dump(2) + "\n");
      written.push_back(path);
    } else if (format == "csv") {
      const std::string path = (fs::path(bundle.output_dir) / "report.csv").string();
      write_agreement_csv(bundle.agreement, path);
      written.push_back(path);
    } else {
      // one heatmap per metric: rows are track pairs, columns are n values
      std::vector<std::string> row_labels;
      std::vector<std::string> col_labels;
      std::vector<std::size_t> n_values;
      for (const auto& pair : bundle.agreement.pairs) {
        const std::string tag = pair.label_a + pair.label_b;
        if (std::find(row_labels.begin(), row_labels.end(), tag) == row_labels.end())
          row_labels.push_back(tag);
        if (std::find(n_values.begin(), n_values.end(), pair.n) == n_values.end())
          n_values.push_back(pair.n);
      }
      for (const std::size_t n : n_values) col_labels.push_back("n=" + std::to_string(n));
      Matrix fa(row_labels.size(), Vector(n_values.size(), 0.0));
      Matrix ra(row_labels.size(), Vector(n_values.size(), 0.0));
      for (const auto& pair : bundle.agreement.pairs) {
        const std::string tag = pair.label_a + pair.label_b;
        const auto r = static_cast<std::size_t>(
            std::find(row_labels.begin(), row_labels.end(), tag) - row_labels.begin());
        const auto c = static_cast<std::size_t>(
            std::find(n_values.begin(), n_values.end(), pair.n) - n_values.begin());
        fa[r][c] = pair.fa;
        ra[r][c] = pair.ra;
      }
      const std::string fa_path = (fs::path(bundle.output_dir) / "heatmap_fa.svg").string();
      const std::string ra_path = (fs::path(bundle.output_dir) / "heatmap_ra.svg").string();
      write_text_file(fa_path, heatmap_svg("Feature Agreement", row_labels, col_labels, fa));
      write_text_file(ra_path, heatmap_svg("Rank Agreement", row_labels, col_labels, ra));
      written.push_back(fa_path);
      written.push_back(ra_path);
    }
  }
  return written;
}

/// Two matched synthetic runs, identical but for the correlation matrix,
/// plus a side-by-side FA/RA delta table.
inline std::pair<ReportBundle, ReportBundle> run_correlation_scenario(std::uint64_t seed,
                                                                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  auto base_config = [&](const std::string& subdir, const nlohmann::json& correlation) {
    nlohmann::json doc;
    doc["seed"] = seed;
    doc["output_dir"] = (fs::path(out_dir) / subdir).string();
    doc["data"] = {{"synthetic",
                    {{"n", 2000},
                     {"d", 6},
                     {"beta", {3.0, 0.0, 0.0, 0.0, 0.0, 0.0}},
                     {"intercept", 0.0},
                     {"correlation", correlation}}}};
    return parse_config(doc);
  };
  const nlohmann::json identity = {{"kind", "identity"}};
  const nlohmann::json block = {{"kind", "block"}, {"rho", 0.95}, {"indices", {0, 1, 2}}};

  ReportBundle first = run_pipeline(base_config("identity", identity));
  emit(first, {"json", "csv", "svg"});
  ReportBundle second = run_pipeline(base_config("correlated", block));
  emit(second, {"json", "csv", "svg"});

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory: " + out_dir);
  std::string csv = "pair,n,fa_identity,fa_correlated,fa_delta,ra_identity,ra_correlated,ra_delta\n";
  if (first.agreement.pairs.size() != second.agreement.pairs.size())
    throw Error("correlation scenario produced mismatched reports");
  for (std::size_t i = 0; i < first.agreement.pairs.size(); ++i) {
    const auto& a = first.agreement.pairs[i];
    const auto& b = second.agreement.pairs[i];
    if (a.label_a != b.label_a || a.label_b != b.label_b || a.n != b.n)
      throw Error("correlation scenario produced mismatched reports");
    csv += a.label_a + a.label_b + ',' + std::to_string(a.n) + ',' +
           detail::format_double(a.fa) + ',' + detail::format_double(b.fa) + ',' +
           detail::format_double(b.fa - a.fa) + ',' + detail::format_double(a.ra) + ',' +
           detail::format_double(b.ra) + ',' + detail::format_double(b.ra - a.ra) + '\n';
  }
  write_text_file((fs::path(out_dir) / "delta.csv").string(), csv);
  return {std::move(first), std::move(second)};
}

/// Materializes the built-in study cases without any training stage.
inline std::vector<std::string> run_fixtures(const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory: " + out_dir);
  std::vector<std::string> written;
  for (const auto& c : builtin_study_cases()) {
    const AgreementReport report = study_case_report(c);
    const std::string json_path = (fs::path(out_dir) / ("fixture_" + c.name + ".json")).string();
    const std::string csv_path = (fs::path(out_dir) / ("fixture_" + c.name + ".csv")).string();
    write_text_file(json_path, agreement_to_json(report).dump(2) + "\n");
    write_agreement_csv(report, csv_path);
    written.push_back(json_path);
    written.push_back(csv_path);
  }
  return written;
}

}  // namespace concord
