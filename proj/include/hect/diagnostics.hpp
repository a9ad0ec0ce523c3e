#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hect/classifier.hpp"
#include "hect/core.hpp"
#include "hect/testing.hpp"

namespace hect {

struct FeatureSignificance {
  std::size_t index = 0;
  std::string name;
  double importance = 0.0;
  double quantile = 0.0;  // fraction of the feature's null values strictly below
  bool flagged = false;
};

struct DiagnosticsReport {
  std::vector<std::string> sample_ids;
  std::vector<int> labels;
  std::vector<double> local_discrepancies;
  Names variable_names;
  std::vector<double> feature_importances;
  std::vector<FeatureSignificance> features;  // every feature, in feature order
  double alpha = 0.05;

  std::vector<FeatureSignificance> significant_features() const;
};

/// r_hat_i minus the label-1 fraction; positive marks test-like samples.
std::vector<double> local_discrepancy(const LabeledDataset& d, std::span<const double> r_hats);

/// Predict-time permutation importance: mean drop of the label-aligned
/// statistic (1/N) sum (r_i - prior)(y_i - prior) when one column is shuffled
/// before the out-of-fold models predict, floored at 0.
std::vector<double> feature_importance(const ClassifierSpec& spec, const LabeledDataset& d,
                                       int n_shuffles, std::uint64_t seed);
std::vector<double> feature_importance(const CrossFitResult& fitted, const LabeledDataset& d,
                                       int n_shuffles, std::uint64_t seed);

/// Feature j is flagged iff its importance exceeds the (1 - alpha) empirical
/// quantile of column j of `null_importances` (replicates x features).
std::vector<FeatureSignificance> significant_features(std::span<const double> importances,
                                                      const Matrix& null_importances,
                                                      double alpha, const Names& names = {});

struct GofDiagnostics {
  TestReport test;
  DiagnosticsReport diagnostics;
  Matrix null_importances;
};

/// Goodness-of-fit test whose null replicates also recompute permutation
/// importances, so each feature gets its own null distribution.
GofDiagnostics gof_diagnose(const Ensemble& trusted, const Ensemble& test,
                            const ClassifierSpec& spec, const GofConfig& cfg, int n_shuffles);

}  // namespace hect
