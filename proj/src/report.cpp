#include "hect/report.hpp"

namespace hect {

using json = nlohmann::ordered_json;

json to_json(const ClassifierSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["folds"] = spec.folds;
  j["class_weighting"] = to_string(spec.weighting);
  switch (spec.kind) {
    case ClassifierKind::ConstantPrior:
      break;
    case ClassifierKind::LogisticRegression:
      j["l2_lambda"] = spec.logistic.l2_lambda;
      j["max_iters"] = spec.logistic.max_iters;
      j["tol"] = spec.logistic.tol;
      break;
    case ClassifierKind::GradientBoostedStumps:
      j["n_rounds"] = spec.boost.n_rounds;
      j["learning_rate"] = spec.boost.learning_rate;
      j["max_leaves"] = spec.boost.max_leaves;
      j["l2_leaf"] = spec.boost.l2_leaf;
      j["min_leaf"] = spec.boost.min_leaf;
      break;
    case ClassifierKind::KNearest:
      j["k"] = spec.knn.k;
      break;
  }
  return j;
}

json to_json(const TestReport& r) {
  json j;
  j["method"] = to_string(r.method);
  j["decision"] = to_string(r.decision);
  j["p_value"] = r.p_value;
  j["alpha"] = r.alpha;
  j["statistic_observed"] = r.statistic_observed;
  j["class_prior_hat"] = r.class_prior_hat;
  j["seed"] = r.seed;
  j["n_trusted"] = r.n_trusted;
  j["n_test"] = r.n_test;
  if (r.method == TestMethod::PcaBaseline) {
    if (r.baseline) {
      json b;
      b["n_pc"] = r.baseline->n_pc;
      b["z_threshold"] = r.baseline->z_threshold;
      b["fail_count"] = r.baseline->fail_count;
      b["extreme_scores"] = r.baseline->extreme_scores;
      std::vector<bool> failed(r.baseline->run_failed.begin(), r.baseline->run_failed.end());
      b["run_failed"] = failed;
      j["baseline"] = std::move(b);
    }
  } else {
    j["classifier"] = to_json(r.classifier);
    j[r.method == TestMethod::GoodnessOfFit ? "E" : "B"] = r.replicates;
    if (r.method == TestMethod::GoodnessOfFit) j["m_e"] = r.m_e;
    j["null_statistics"] = r.null_statistics;
  }
  j["warnings"] = r.warnings;
  return j;
}

json to_json(const DiagnosticsReport& r) {
  json j;
  j["alpha"] = r.alpha;
  json features = json::array();
  for (const auto& f : r.features) {
    features.push_back({{"name", f.name},
                        {"importance", f.importance},
                        {"null_quantile_exceeded", f.quantile},
                        {"significant", f.flagged}});
  }
  j["features"] = std::move(features);
  json sig = json::array();
  for (const auto& f : r.significant_features()) sig.push_back(f.name);
  j["significant_features"] = std::move(sig);
  json samples = json::array();
  for (std::size_t i = 0; i < r.sample_ids.size(); ++i) {
    samples.push_back({{"id", r.sample_ids[i]},
                       {"label", r.labels[i]},
                       {"local_discrepancy", r.local_discrepancies[i]}});
  }
  j["samples"] = std::move(samples);
  return j;
}

json to_json(const FilterMask& mask) {
  json j;
  json kept = json::array();
  json by_reason = {{"ZeroVariance", json::array()},
                    {"Redundant", json::array()},
                    {"LowTemporalVariability", json::array()}};
  for (std::size_t k = 0; k < mask.kept.size(); ++k) {
    if (mask.kept[k]) {
      kept.push_back(mask.variable_names[k]);
    } else {
      by_reason[std::string(to_string(*mask.reasons[k]))].push_back(mask.variable_names[k]);
    }
  }
  j["n_features_in"] = mask.kept.size();
  j["n_features_kept"] = mask.kept_count();
  j["kept"] = std::move(kept);
  j["dropped"] = std::move(by_reason);
  return j;
}

json to_json(const StandardizationParams& p) {
  json j;
  j["fitted_on"] = p.fitted_on;
  j["variable_names"] = p.variable_names;
  j["means"] = p.means;
  j["sds"] = p.sds;
  return j;
}

json to_json(const StudyTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"shift", r.shift},
                    {"classifier", r.classifier},
                    {"method", r.method},
                    {"trials", r.trials},
                    {"rejections", r.rejections},
                    {"rejection_rate", r.rejection_rate},
                    {"mc_se", r.mc_se},
                    {"mean_p", r.mean_p}});
  }
  return rows;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace hect
