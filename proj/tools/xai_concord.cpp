#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "concord/concord.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  const concord::PipelineConfig config = concord::load_config(config_path);
  const concord::ReportBundle bundle = concord::run_pipeline(config);
  const auto written = concord::emit(bundle, config.formats);
  for (const auto& track : bundle.tracks)
    std::printf("track %s: %s via %s\n", track.label.c_str(), track.model_key.c_str(),
                concord::explainer_name(track.kind));
  std::printf("top feature unanimous: %s\n",
              bundle.agreement.top_feature_unanimous ? "yes" : "no");
  for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_fixtures(const std::string& out_dir) {
  for (const auto& path : concord::run_fixtures(out_dir)) std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_correlation(std::uint64_t seed, const std::string& out_dir) {
  const auto [identity, correlated] = concord::run_correlation_scenario(seed, out_dir);
  std::printf("identity run: %zu pairs; correlated run: %zu pairs\n",
              identity.agreement.pairs.size(), correlated.agreement.pairs.size());
  std::printf("wrote %s/delta.csv\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trains three classifier families, explains them four ways, and measures how much the explanations agree"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the full audit described by a config file");
  run->add_option("config", config_path, "path to the JSON config")->required();

  std::string fixtures_out;
  auto* fixtures = app.add_subcommand("fixtures", "emit the built-in study-case agreement reports");
  fixtures->add_option("--out", fixtures_out, "output directory")->required();

  std::uint64_t seed = 0;
  std::string correlation_out;
  auto* correlation =
      app.add_subcommand("correlation-demo", "matched runs differing only in feature correlation");
  correlation->add_option("--seed", seed, "master seed")->required();
  correlation->add_option("--out", correlation_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (fixtures->parsed()) return cmd_fixtures(fixtures_out);
    return cmd_correlation(seed, correlation_out);
  } catch (const concord::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
