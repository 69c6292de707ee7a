#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "concord/attribution.hpp"
#include "concord/dataset.hpp"
#include "concord/error.hpp"

namespace concord {

enum class AggregationMode { abs_sum, signed_sum };

inline AggregationMode aggregation_from_string(const std::string& name) {
  if (name == "abs_sum") return AggregationMode::abs_sum;
  if (name == "signed_sum") return AggregationMode::signed_sum;
  throw ConfigError("unknown aggregation mode: " + name + " (expected abs_sum or signed_sum)");
}

struct GlobalExplanation {
  std::string method_label;
  std::vector<std::string> feature_names;
  Vector scores;
  std::vector<std::size_t> ranking;  // best first; ties broken by ascending index
};

struct TopList {
  std::size_t n = 0;
  std::vector<std::string> entries;  // length min(n, d)
};

struct ExpertSet {
  std::set<std::string> canonical;

  static ExpertSet from_names(const std::vector<std::string>& names) {
    ExpertSet expert;
    for (const auto& name : names) expert.canonical.insert(canonicalize(name));
    return expert;
  }
  bool contains(const std::string& name) const { return canonical.count(canonicalize(name)) > 0; }
  bool empty() const { return canonical.empty(); }
};

struct PairAgreement {
  std::string label_a;
  std::string label_b;
  std::size_t n = 0;
  double fa = 0.0;
  double ra = 0.0;
};

struct ConcordanceEntry {
  std::string method_label;
  std::size_t n = 0;
  double fraction = 0.0;
};

struct AgreementReport {
  std::vector<PairAgreement> pairs;
  std::vector<ConcordanceEntry> concordance;
  bool top_feature_unanimous = false;
  std::map<std::string, std::string> metadata;
};

inline std::vector<std::size_t> rank_by_magnitude(const Vector& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(scores[a]) > std::abs(scores[b]);
  });
  return order;
}

inline GlobalExplanation aggregate_global(const AttributionMatrix& matrix, AggregationMode mode,
                                          const std::string& label = "") {
  if (matrix.rows.empty()) throw Error("cannot aggregate an empty attribution matrix");
  const std::size_t d = matrix.feature_names.size();
  GlobalExplanation global;
  global.method_label = label;
  global.feature_names = matrix.feature_names;
  global.scores.assign(d, 0.0);
  for (const auto& row : matrix.rows) {
    if (row.values.size() != d) throw Error("attribution row width does not match feature names");
    for (std::size_t j = 0; j < d; ++j)
      global.scores[j] += mode == AggregationMode::abs_sum ? std::abs(row.values[j]) : row.values[j];
  }
  global.ranking = rank_by_magnitude(global.scores);
  return global;
}

inline TopList top_n(const GlobalExplanation& global, std::size_t n) {
  if (n == 0) throw Error("top list size must be positive");
  TopList list;
  list.n = n;
  const std::size_t take = std::min(n, global.ranking.size());
  for (std::size_t k = 0; k < take; ++k)
    list.entries.push_back(global.feature_names[global.ranking[k]]);
  return list;
}

// FA and RA divide by the realized list length so that self-agreement is
// exactly 1 even when n exceeds the feature count.
inline double feature_agreement(const TopList& a, const TopList& b) {
  if (a.n != b.n) throw Error("feature agreement requires equal n");
  std::set<std::string> in_b(b.entries.begin(), b.entries.end());
  std::size_t common = 0;
  for (const auto& name : a.entries) common += in_b.count(name);
  return static_cast<double>(common) / static_cast<double>(a.entries.size());
}

inline double rank_agreement(const TopList& a, const TopList& b) {
  if (a.n != b.n) throw Error("rank agreement requires equal n");
  std::size_t matches = 0;
  for (std::size_t k = 0; k < a.entries.size() && k < b.entries.size(); ++k)
    matches += a.entries[k] == b.entries[k];
  return static_cast<double>(matches) / static_cast<double>(a.entries.size());
}

inline double expert_concordance(const TopList& a, const ExpertSet& expert) {
  std::size_t common = 0;
  for (const auto& name : a.entries) common += expert.contains(name);
  return static_cast<double>(common) / static_cast<double>(a.entries.size());
}

namespace detail {

inline bool has_top_n_tie(const GlobalExplanation& global, std::size_t n) {
  const std::size_t limit = std::min(n, global.ranking.size());
  for (std::size_t k = 0; k < limit && k + 1 < global.ranking.size(); ++k) {
    const double a = std::abs(global.scores[global.ranking[k]]);
    const double b = std::abs(global.scores[global.ranking[k + 1]]);
    if (a == b) return true;
  }
  return false;
}

}  // namespace detail

inline AgreementReport pairwise_report(const std::vector<GlobalExplanation>& globals,
                                       const std::vector<std::size_t>& n_values,
                                       const ExpertSet& expert = {}) {
  if (globals.size() < 2) throw Error("pairwise report needs at least two global explanations");
  for (const auto& g : globals) {
    if (g.feature_names != globals.front().feature_names)
      throw Error("global explanations cover different feature spaces");
  }
  if (n_values.empty()) throw Error("pairwise report needs at least one n value");

  AgreementReport report;
  std::vector<std::string> tie_tags;
  for (const std::size_t n : n_values) {
    if (n == 0) throw Error("n values must be positive");
    std::vector<TopList> lists;
    for (const auto& g : globals) lists.push_back(top_n(g, n));
    for (std::size_t a = 0; a < globals.size(); ++a) {
      for (std::size_t b = a + 1; b < globals.size(); ++b) {
        PairAgreement pair;
        pair.label_a = globals[a].method_label;
        pair.label_b = globals[b].method_label;
        pair.n = n;
        pair.fa = feature_agreement(lists[a], lists[b]);
        pair.ra = rank_agreement(lists[a], lists[b]);
        report.pairs.push_back(std::move(pair));
      }
    }
    for (std::size_t a = 0; a < globals.size(); ++a) {
      if (!expert.empty())
        report.concordance.push_back({globals[a].method_label, n, expert_concordance(lists[a], expert)});
      if (detail::has_top_n_tie(globals[a], n))
        tie_tags.push_back(globals[a].method_label + ":" + std::to_string(n));
    }
  }

  report.top_feature_unanimous = true;
  const std::string& leader = globals.front().feature_names[globals.front().ranking.front()];
  for (const auto& g : globals)
    if (g.feature_names[g.ranking.front()] != leader) report.top_feature_unanimous = false;

  std::string ties = "none";
  if (!tie_tags.empty()) {
    ties.clear();
    for (std::size_t i = 0; i < tie_tags.size(); ++i) {
      if (i > 0) ties += ";";
      ties += tie_tags[i];
    }
  }
  report.metadata["ties"] = ties;
  return report;
}

inline nlohmann::json agreement_to_json(const AgreementReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["pairs"] = nlohmann::json::array();
  for (const auto& pair : report.pairs)
    doc["pairs"].push_back({{"label_a", pair.label_a},
                            {"label_b", pair.label_b},
                            {"n", pair.n},
                            {"fa", pair.fa},
                            {"ra", pair.ra}});
  doc["concordance"] = nlohmann::json::array();
  for (const auto& entry : report.concordance)
    doc["concordance"].push_back(
        {{"method", entry.method_label}, {"n", entry.n}, {"fraction", entry.fraction}});
  doc["top_feature_unanimous"] = report.top_feature_unanimous;
  doc["metadata"] = report.metadata;
  return doc;
}

inline void write_agreement_csv(const AgreementReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << "pair,n,metric,value\n";
  for (const auto& pair : report.pairs) {
    const std::string tag = pair.label_a + pair.label_b;
    out << tag << ',' << pair.n << ",fa," << detail::format_double(pair.fa) << '\n';
    out << tag << ',' << pair.n << ",ra," << detail::format_double(pair.ra) << '\n';
  }
  for (const auto& entry : report.concordance)
    out << entry.method_label << ',' << entry.n << ",concordance,"
        << detail::format_double(entry.fraction) << '\n';
  out << "all,1,top_feature_unanimous," << (report.top_feature_unanimous ? 1 : 0) << '\n';
  if (!out) throw Error("failed while writing: " + path);
}

}  // namespace concord
