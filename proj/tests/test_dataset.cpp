#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace concord;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path dir = fs::path("test_tmp");
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_csv parses an inline literal") {
  const auto path = write_temp("basic.csv", "a,b,y\n1,2,0\n3,4,1\n5,6,1\n");
  const Dataset data = load_csv(path, "y");
  REQUIRE(data.n_features() == 2);
  REQUIRE(data.n_rows() == 3);
  CHECK(data.labels == std::vector<int>{0, 1, 1});
  CHECK(data.features[0].name == "a");
  CHECK(data.features[0].observed_min == 1.0);
  CHECK(data.features[0].observed_max == 5.0);
  CHECK(data.rows[1] == Vector{3.0, 4.0});
}

TEST_CASE("load_csv flags expert features") {
  const auto path = write_temp("expert.csv", "a,b,y\n1,2,0\n3,4,1\n");
  const Dataset data = load_csv(path, "y", {"a"});
  CHECK(data.features[0].expert_flagged);
  CHECK_FALSE(data.features[1].expert_flagged);
  CHECK(data.expert_names() == std::vector<std::string>{"a"});
}

TEST_CASE("expert names match canonically") {
  const auto path = write_temp("expert_canon.csv", "Heart Rate,y\n1,0\n2,1\n");
  const Dataset data = load_csv(path, "y", {"  heart   rate "});
  CHECK(data.features[0].expert_flagged);
}

TEST_CASE("load_csv reports precise errors") {
  CHECK_THROWS_WITH(load_csv("test_tmp/absent.csv", "y"),
                    Catch::Matchers::ContainsSubstring("cannot open"));
  const auto bad_cell = write_temp("bad_cell.csv", "a,y\n1,0\nfoo,1\n");
  CHECK_THROWS_WITH(load_csv(bad_cell, "y"), Catch::Matchers::ContainsSubstring("line 3") &&
                                                 Catch::Matchers::ContainsSubstring("column 1"));
  const auto bad_label = write_temp("bad_label.csv", "a,y\n1,2\n");
  CHECK_THROWS_WITH(load_csv(bad_label, "y"), Catch::Matchers::ContainsSubstring("label"));
  const auto dup = write_temp("dup.csv", "a,a,y\n1,2,0\n");
  CHECK_THROWS_WITH(load_csv(dup, "y"), Catch::Matchers::ContainsSubstring("duplicate"));
  const auto ok = write_temp("ok.csv", "a,y\n1,0\n2,1\n");
  CHECK_THROWS_WITH(load_csv(ok, "y", {"missing"}),
                    Catch::Matchers::ContainsSubstring("missing"));
  CHECK_THROWS_WITH(load_csv(ok, "z"), Catch::Matchers::ContainsSubstring("label column"));
}

TEST_CASE("binary columns are detected") {
  const auto path = write_temp("kinds.csv", "a,b,y\n0,0.5,0\n1,2,1\n0,3,1\n");
  const Dataset data = load_csv(path, "y");
  CHECK(data.features[0].kind == FeatureKind::binary);
  CHECK(data.features[1].kind == FeatureKind::numeric);
}

TEST_CASE("csv round trip is exact") {
  Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    Dataset original = test_support::random_dataset(rng, 20, 4);
    const auto path = write_temp("roundtrip.csv", "");
    write_csv(original, path);
    const Dataset reloaded = load_csv(path, "label");
    REQUIRE(reloaded.n_rows() == original.n_rows());
    REQUIRE(reloaded.n_features() == original.n_features());
    CHECK(reloaded.rows == original.rows);
    CHECK(reloaded.labels == original.labels);
    for (std::size_t j = 0; j < original.n_features(); ++j)
      CHECK(reloaded.features[j].name == original.features[j].name);
  }
}

TEST_CASE("synthesize with zero beta balances labels") {
  SyntheticSpec spec;
  spec.d = 3;
  spec.n = 10000;
  spec.beta = {0.0, 0.0, 0.0};
  spec.correlation = identity_matrix(3);
  spec.seed = 77;
  const Dataset data = synthesize(spec);
  double rate = 0.0;
  for (int y : data.labels) rate += y;
  rate /= static_cast<double>(data.n_rows());
  CHECK(std::abs(rate - 0.5) < 0.02);
}

TEST_CASE("synthesize is deterministic") {
  SyntheticSpec spec;
  spec.d = 2;
  spec.n = 50;
  spec.beta = {1.0, -1.0};
  spec.correlation = identity_matrix(2);
  spec.seed = 123;
  const Dataset a = synthesize(spec);
  const Dataset b = synthesize(spec);
  CHECK(a.rows == b.rows);
  CHECK(a.labels == b.labels);
}

TEST_CASE("identity correlation produces near-orthogonal columns") {
  SyntheticSpec spec;
  spec.d = 4;
  spec.n = 20000;
  spec.beta = {0.0, 0.0, 0.0, 0.0};
  spec.correlation = identity_matrix(4);
  spec.seed = 9;
  const Dataset data = synthesize(spec);
  const double n = static_cast<double>(data.n_rows());
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      double ma = 0.0, mb = 0.0;
      for (const auto& row : data.rows) {
        ma += row[a];
        mb += row[b];
      }
      ma /= n;
      mb /= n;
      double cov = 0.0, va = 0.0, vb = 0.0;
      for (const auto& row : data.rows) {
        cov += (row[a] - ma) * (row[b] - mb);
        va += (row[a] - ma) * (row[a] - ma);
        vb += (row[b] - mb) * (row[b] - mb);
      }
      CHECK(std::abs(cov / std::sqrt(va * vb)) < 0.03);
    }
  }
}

TEST_CASE("block correlation is realized empirically") {
  SyntheticSpec spec;
  spec.d = 3;
  spec.n = 20000;
  spec.beta = {0.0, 0.0, 0.0};
  spec.correlation = {{1.0, 0.9, 0.0}, {0.9, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  spec.seed = 31;
  const Dataset data = synthesize(spec);
  const double n = static_cast<double>(data.n_rows());
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (const auto& row : data.rows) {
    cov += row[0] * row[1];
    va += row[0] * row[0];
    vb += row[1] * row[1];
  }
  (void)n;
  CHECK(std::abs(cov / std::sqrt(va * vb) - 0.9) < 0.03);
}

TEST_CASE("synthesize rejects bad specs") {
  SyntheticSpec spec;
  spec.d = 2;
  spec.n = 10;
  spec.beta = {1.0, 1.0};
  spec.correlation = {{1.0, 0.5}, {0.5, 1.0}};
  spec.seed = 1;
  SyntheticSpec zero_n = spec;
  zero_n.n = 0;
  CHECK_THROWS_AS(synthesize(zero_n), Error);
  SyntheticSpec bad_beta = spec;
  bad_beta.beta = {1.0};
  CHECK_THROWS_AS(synthesize(bad_beta), Error);
  SyntheticSpec not_psd = spec;
  not_psd.correlation = {{1.0, 2.0}, {2.0, 1.0}};  // |rho| > 1 cannot be PSD
  CHECK_THROWS_AS(synthesize(not_psd), Error);
}

TEST_CASE("cholesky factor reproduces the matrix") {
  const Matrix a = {{1.0, 0.8, 0.2}, {0.8, 1.0, 0.3}, {0.2, 0.3, 1.0}};
  const Matrix l = cholesky_psd(a);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < 3; ++k) sum += l[i][k] * l[j][k];
      CHECK_THAT(sum, Catch::Matchers::WithinAbs(a[i][j], 1e-12));
    }
  }
}

TEST_CASE("standardize handles constant and two-point columns") {
  Dataset data;
  data.features = {FeatureSpec{"c", FeatureKind::numeric, false, 2, 2},
                   FeatureSpec{"t", FeatureKind::numeric, false, 0, 2}};
  data.rows = {{2.0, 0.0}, {2.0, 2.0}};
  data.labels = {0, 1};
  const auto [scaled, params] = standardize(data);
  CHECK(scaled.rows[0][0] == 0.0);
  CHECK(scaled.rows[1][0] == 0.0);
  CHECK(params.mean[0] == 2.0);
  CHECK(params.scale[0] == 1.0);
  CHECK(scaled.rows[0][1] == -1.0);
  CHECK(scaled.rows[1][1] == 1.0);
  CHECK(params.mean[1] == 1.0);
  CHECK(params.scale[1] == 1.0);
}

TEST_CASE("standardize leaves binary columns untouched and inverts exactly") {
  Rng rng(55);
  Dataset data = test_support::random_dataset(rng, 30, 3);
  data.features.push_back(FeatureSpec{"flag", FeatureKind::binary, false, 0, 1});
  for (auto& row : data.rows) row.push_back(rng.next_double() < 0.5 ? 1.0 : 0.0);
  detail::refresh_observed_range(data);

  const auto [scaled, params] = standardize(data);
  for (std::size_t i = 0; i < data.n_rows(); ++i)
    CHECK(scaled.rows[i][3] == data.rows[i][3]);
  CHECK(params.mean[3] == 0.0);
  CHECK(params.scale[3] == 1.0);

  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0, var = 0.0;
    for (const auto& row : scaled.rows) mean += row[j];
    mean /= static_cast<double>(scaled.n_rows());
    for (const auto& row : scaled.rows) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(scaled.n_rows());
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
  }

  const Dataset back = destandardize(scaled, params);
  for (std::size_t i = 0; i < data.n_rows(); ++i)
    for (std::size_t j = 0; j < data.n_features(); ++j)
      CHECK_THAT(back.rows[i][j], Catch::Matchers::WithinAbs(data.rows[i][j], 1e-10));
}

TEST_CASE("canonicalize trims, lowercases, and collapses whitespace") {
  CHECK(canonicalize("  Heart   Rate ") == "heart rate");
  CHECK(canonicalize("LOS") == "los");
  CHECK(canonicalize("a\tb") == "a b");
}
