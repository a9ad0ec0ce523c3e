#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "hect/core.hpp"

namespace hect {

enum class ClassifierKind { ConstantPrior, LogisticRegression, GradientBoostedStumps, KNearest };

// Auto resolves per test: balanced for the two-sample test, unweighted for GoF.
enum class ClassWeighting { Auto, Balanced, Unweighted };

std::string_view to_string(ClassifierKind kind);
std::string_view to_string(ClassWeighting w);
// Accepts the CLI names: constant, logistic, gbstumps, knn.
ClassifierKind parse_classifier_kind(std::string_view name);
ClassWeighting parse_class_weighting(std::string_view name);

struct LogisticParams {
  double l2_lambda = 0.01;
  int max_iters = 200;
  double tol = 1e-6;
};

struct BoostParams {
  int n_rounds = 50;
  double learning_rate = 0.3;
  int max_leaves = 2;
  double l2_leaf = 1.0;
  int min_leaf = 1;
};

struct KnnParams {
  int k = 5;
};

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::LogisticRegression;
  LogisticParams logistic;
  BoostParams boost;
  KnnParams knn;
  int folds = 5;
  ClassWeighting weighting = ClassWeighting::Auto;

  // Throws InvalidConfig when a hyperparameter is out of range.
  void validate() const;
  // Copy with Auto weighting replaced by the given default.
  ClassifierSpec resolved(ClassWeighting default_weighting) const;
};

inline constexpr double kProbabilityEps = 1e-6;

double clip_probability(double p) noexcept;
double sigmoid(double z) noexcept;

struct ConstantModel {
  double prior = 0.5;
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  int iterations = 0;
};

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;  // x <= threshold goes left
  double left = 0.0;
  double right = 0.0;
};

struct StumpEnsemble {
  std::size_t n_features = 0;
  double base_score = 0.0;
  std::vector<Stump> stumps;
  std::vector<double> training_loss;  // after init and after each accepted round
};

struct KnnModel {
  Matrix points;
  std::vector<int> labels;
  std::vector<double> weights;
  int k = 1;
};

/// Estimate of P(Y=1 | X=x), clipped to [eps, 1-eps].
class FittedClassifier {
 public:
  using Model = std::variant<ConstantModel, LogisticModel, StumpEnsemble, KnnModel>;

  FittedClassifier(Model model, std::size_t n_features, double logit_offset = 0.0)
      : model_(std::move(model)), n_features_(n_features), logit_offset_(logit_offset) {}

  ClassifierKind kind() const noexcept;
  std::size_t feature_count() const noexcept { return n_features_; }
  const Model& model() const noexcept { return model_; }
  // Added to the model's log-odds before clipping. Models fit with class
  // weights use logit(prior) - logit(weighted prior) so predictions estimate
  // the posterior under the actual training prior.
  double logit_offset() const noexcept { return logit_offset_; }

  double predict_proba(std::span<const double> x) const;
  std::vector<double> predict_proba(const Matrix& x) const;

 private:
  double finish(double p) const noexcept;

  Model model_;
  std::size_t n_features_;
  double logit_offset_ = 0.0;
};

FittedClassifier fit(const ClassifierSpec& spec, const LabeledDataset& d);

/// Fits on raw arrays. `sample_weights` must be positive and match labels.
FittedClassifier fit(const ClassifierSpec& spec, const Matrix& x, std::span<const int> labels,
                     std::span<const double> sample_weights);

/// Inverse-frequency weights normalized to sum to the sample count.
std::vector<double> balanced_weights(std::span<const int> labels);

struct LogisticObjective {
  double loss = 0.0;
  Eigen::VectorXd grad_weights;
  double grad_bias = 0.0;
};

/// Weighted mean cross-entropy plus (l2/2)|w|^2 (bias unpenalized) and its
/// analytic gradient.
LogisticObjective logistic_objective(const Matrix& x, std::span<const int> labels,
                                     std::span<const double> sample_weights,
                                     const Eigen::VectorXd& weights, double bias, double l2);

LogisticModel fit_logistic(const Matrix& x, std::span<const int> labels,
                           std::span<const double> sample_weights, const LogisticParams& params);
StumpEnsemble fit_boosted_stumps(const Matrix& x, std::span<const int> labels,
                                 std::span<const double> sample_weights, const BoostParams& params);

// ---------------------------------------------------------------------------
// Cross-fitting

/// Stratified K-fold assignment keyed on run ids: within each class, samples
/// are ordered by a seeded hash of their id and dealt round-robin.
std::vector<int> stratified_folds(const LabeledDataset& d, int folds, std::uint64_t seed);

struct CrossFitResult {
  std::vector<double> predictions;  // out-of-fold, in sample order
  std::vector<int> fold_of;
  std::vector<FittedClassifier> models;  // one per fold
  std::vector<std::vector<std::size_t>> training_rows;  // per fold
};

CrossFitResult cross_fit(const ClassifierSpec& spec, const LabeledDataset& d, std::uint64_t seed);
std::vector<double> cross_fit_predictions(const ClassifierSpec& spec, const LabeledDataset& d,
                                          std::uint64_t seed);

}  // namespace hect
