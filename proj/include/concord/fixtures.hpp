#pragma once

#include <string>
#include <vector>

#include "concord/agreement.hpp"

namespace concord {

/// A published audit case: three method rankings over one cohort plus the
/// clinician-nominated feature set, comparable without any training stage.
struct StudyCase {
  std::string name;
  std::vector<GlobalExplanation> globals;  // labels S, L, D
  ExpertSet expert;
  std::vector<std::size_t> n_values{1, 3, 5};
};

namespace detail {

inline GlobalExplanation ranked_global(const std::string& label,
                                       const std::vector<std::string>& space,
                                       const std::vector<std::string>& top) {
  GlobalExplanation global;
  global.method_label = label;
  global.feature_names = space;
  global.scores.assign(space.size(), 0.0);
  for (std::size_t k = 0; k < top.size(); ++k) {
    bool found = false;
    for (std::size_t j = 0; j < space.size(); ++j) {
      if (space[j] == top[k]) {
        global.scores[j] = static_cast<double>(top.size() - k);
        found = true;
        break;
      }
    }
    if (!found) throw Error("fixture name missing from feature space: " + top[k]);
  }
  global.ranking = rank_by_magnitude(global.scores);
  return global;
}

inline std::vector<std::string> name_union(const std::vector<std::vector<std::string>>& lists) {
  std::vector<std::string> space;
  for (const auto& list : lists)
    for (const auto& name : list)
      if (std::find(space.begin(), space.end(), name) == space.end()) space.push_back(name);
  return space;
}

}  // namespace detail

inline std::vector<StudyCase> builtin_study_cases() {
  std::vector<StudyCase> cases;

  {
    const std::vector<std::string> shap{
        "Prev. inpat. stay count", "Patho.: No unique tests", "Elect. status: Not assigned",
        "LOS", "Planned the same day"};
    const std::vector<std::string> l1{
        "Prev. inpat. stay count", "Prev. inpat. stay count^2", "Patho.: No unique tests",
        "Adm. source: Broader", "Elect. status: Not assigned"};
    const std::vector<std::string> dtd{
        "Prev. inpat. stay count", "Ed presentations stay counts", "Age",
        "Prev. inpat. stay count^2", "Elect. status: Emergency"};
    const std::vector<std::string> expert{
        "Prev. inpat. stay count", "Ed presentations stay counts", "Age",
        "Index of socioeconomic status", "Stay longer than a day"};
    StudyCase c;
    c.name = "ra30";
    const auto space = detail::name_union({shap, l1, dtd, expert});
    c.globals = {detail::ranked_global("S", space, shap), detail::ranked_global("L", space, l1),
                 detail::ranked_global("D", space, dtd)};
    c.expert = ExpertSet::from_names(expert);
    cases.push_back(std::move(c));
  }

  {
    const std::vector<std::string> shap{"LOS", "SpO2", "SBP", "N_RecordedVS", "min SpO2"};
    const std::vector<std::string> l1{"LOS", "SpO2", "SBP count", "Resp. Rate count", "DBP"};
    const std::vector<std::string> dtd{"AVPU", "O2 Flow rate", "N_MeasuredEvents", "N_RecordedVS",
                                       "SpO2"};
    const std::vector<std::string> expert{"AVPU",         "SpO2", "Resp. Rate count",
                                          "O2 Flow rate", "SBP",  "DBP",
                                          "N_RecordedVS", "N_MeasuredEvents", "LOS"};
    StudyCase c;
    c.name = "vs";
    const auto space = detail::name_union({shap, l1, dtd, expert});
    c.globals = {detail::ranked_global("S", space, shap), detail::ranked_global("L", space, l1),
                 detail::ranked_global("D", space, dtd)};
    c.expert = ExpertSet::from_names(expert);
    cases.push_back(std::move(c));
  }

  return cases;
}

inline AgreementReport study_case_report(const StudyCase& c) {
  return pairwise_report(c.globals, c.n_values, c.expert);
}

}  // namespace concord
