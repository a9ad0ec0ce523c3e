#include "hect/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "hect/rng.hpp"

namespace hect {

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::ConstantPrior: return "constant";
    case ClassifierKind::LogisticRegression: return "logistic";
    case ClassifierKind::GradientBoostedStumps: return "gbstumps";
    case ClassifierKind::KNearest: return "knn";
  }
  return "unknown";
}

std::string_view to_string(ClassWeighting w) {
  switch (w) {
    case ClassWeighting::Auto: return "auto";
    case ClassWeighting::Balanced: return "balanced";
    case ClassWeighting::Unweighted: return "none";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "constant") return ClassifierKind::ConstantPrior;
  if (name == "logistic") return ClassifierKind::LogisticRegression;
  if (name == "gbstumps") return ClassifierKind::GradientBoostedStumps;
  if (name == "knn") return ClassifierKind::KNearest;
  throw Error(ErrorCode::InvalidConfig, "unknown classifier '" + std::string(name) + "'");
}

ClassWeighting parse_class_weighting(std::string_view name) {
  if (name == "auto") return ClassWeighting::Auto;
  if (name == "balanced") return ClassWeighting::Balanced;
  if (name == "none") return ClassWeighting::Unweighted;
  throw Error(ErrorCode::InvalidConfig, "unknown class weighting '" + std::string(name) + "'");
}

void ClassifierSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (folds < 2) bad("folds must be >= 2");
  if (!(logistic.l2_lambda >= 0.0)) bad("l2_lambda must be >= 0");
  if (logistic.max_iters < 1) bad("max_iters must be >= 1");
  if (!(logistic.tol >= 0.0)) bad("tol must be >= 0");
  if (boost.n_rounds < 1) bad("n_rounds must be >= 1");
  if (!(boost.learning_rate > 0.0 && boost.learning_rate <= 1.0)) {
    bad("learning_rate must be in (0, 1]");
  }
  if (boost.max_leaves != 2) bad("max_leaves must be 2 (stumps)");
  if (!(boost.l2_leaf >= 0.0)) bad("l2_leaf must be >= 0");
  if (boost.min_leaf < 1) bad("min_leaf must be >= 1");
  if (knn.k < 1) bad("k must be >= 1");
}

ClassifierSpec ClassifierSpec::resolved(ClassWeighting default_weighting) const {
  ClassifierSpec copy = *this;
  if (copy.weighting == ClassWeighting::Auto) copy.weighting = default_weighting;
  return copy;
}

double clip_probability(double p) noexcept {
  return std::clamp(p, kProbabilityEps, 1.0 - kProbabilityEps);
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) noexcept {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void check_training_input(const Matrix& x, std::span<const int> labels,
                          std::span<const double> weights) {
  if (static_cast<std::size_t>(x.rows()) != labels.size() || labels.size() != weights.size()) {
    throw Error(ErrorCode::LengthMismatch, "training rows, labels and weights differ in length");
  }
  std::size_t ones = 0;
  for (int y : labels) ones += (y == 1);
  if (ones == 0 || ones == labels.size()) {
    throw Error(ErrorCode::SingleClass, "training data needs both classes");
  }
}

double weighted_prior(std::span<const int> labels, std::span<const double> weights) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    num += weights[i] * labels[i];
    den += weights[i];
  }
  return num / den;
}

double weighted_log_loss(std::span<const double> scores, std::span<const int> labels,
                         std::span<const double> weights) {
  double acc = 0.0, total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    acc += weights[i] * (softplus(scores[i]) - labels[i] * scores[i]);
    total += weights[i];
  }
  return acc / total;
}

}  // namespace

std::vector<double> balanced_weights(std::span<const int> labels) {
  std::size_t ones = 0;
  for (int y : labels) ones += (y == 1);
  const double n = static_cast<double>(labels.size());
  const double w1 = ones ? n / (2.0 * static_cast<double>(ones)) : 0.0;
  const double w0 = ones < labels.size() ? n / (2.0 * static_cast<double>(labels.size() - ones)) : 0.0;
  std::vector<double> w(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) w[i] = labels[i] == 1 ? w1 : w0;
  return w;
}

LogisticObjective logistic_objective(const Matrix& x, std::span<const int> labels,
                                     std::span<const double> sample_weights,
                                     const Eigen::VectorXd& weights, double bias, double l2) {
  const Eigen::VectorXd z = (x * weights).array() + bias;
  Eigen::VectorXd residual(z.size());
  double loss = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double s = sample_weights[k];
    loss += s * (softplus(z[i]) - labels[k] * z[i]);
    residual[i] = s * (sigmoid(z[i]) - labels[k]);
    total += s;
  }
  LogisticObjective out;
  out.loss = loss / total + 0.5 * l2 * weights.squaredNorm();
  out.grad_weights = x.transpose() * residual / total + l2 * weights;
  out.grad_bias = residual.sum() / total;
  return out;
}

LogisticModel fit_logistic(const Matrix& x, std::span<const int> labels,
                           std::span<const double> sample_weights, const LogisticParams& params) {
  check_training_input(x, labels, sample_weights);
  const Eigen::Index d = x.cols();

  // Step 1/L with L bounding the Hessian: 0.25 * lambda_max(X~' S X~ / sum s) + l2.
  double total = 0.0;
  for (double s : sample_weights) total += s;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d + 1, d + 1);
  {
    Eigen::MatrixXd aug(x.rows(), d + 1);
    aug.leftCols(d) = x;
    aug.col(d).setOnes();
    const Eigen::Map<const Eigen::VectorXd> s(sample_weights.data(),
                                              static_cast<Eigen::Index>(sample_weights.size()));
    gram.noalias() = aug.transpose() * (s.asDiagonal() * aug);
    gram /= total;
  }
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  const double step = 1.0 / (0.25 * top + params.l2_lambda);

  // Nesterov-accelerated gradient descent from zero with gradient-based
  // adaptive restart.
  const Eigen::Map<const Eigen::VectorXd> s(sample_weights.data(),
                                            static_cast<Eigen::Index>(sample_weights.size()));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);  // weights then bias
  Eigen::VectorXd look = theta;
  Eigen::VectorXd grad(d + 1);
  Eigen::VectorXd residual(x.rows());
  double momentum_t = 1.0;
  int iterations = 0;
  for (int it = 0; it < params.max_iters; ++it) {
    const Eigen::VectorXd z = (x * look.head(d)).array() + look[d];
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      residual[i] = s[i] * (sigmoid(z[i]) - labels[static_cast<std::size_t>(i)]);
    }
    grad.head(d).noalias() = x.transpose() * residual / total;
    grad.head(d) += params.l2_lambda * look.head(d);
    grad[d] = residual.sum() / total;
    if (!grad.allFinite()) throw Error(ErrorCode::NonFinite, "logistic gradient diverged");
    if (grad.cwiseAbs().maxCoeff() < params.tol) {
      theta = look;
      break;
    }
    const Eigen::VectorXd next = look - step * grad;
    const bool restart = grad.dot(next - theta) > 0.0;
    const double t_next = restart ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
    look = restart ? next : Eigen::VectorXd(next + ((momentum_t - 1.0) / t_next) * (next - theta));
    theta = next;
    momentum_t = t_next;
    iterations = it + 1;
  }
  LogisticModel model{theta.head(d), theta[d], iterations};
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) {
    throw Error(ErrorCode::NonFinite, "logistic parameters diverged");
  }
  const double loss = logistic_objective(x, labels, sample_weights, model.weights, model.bias,
                                         params.l2_lambda).loss;
  if (!std::isfinite(loss)) throw Error(ErrorCode::NonFinite, "logistic loss diverged");
  return model;
}

StumpEnsemble fit_boosted_stumps(const Matrix& x, std::span<const int> labels,
                                 std::span<const double> sample_weights, const BoostParams& params) {
  check_training_input(x, labels, sample_weights);
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());

  // Per-feature ascending order (ties by row) and the sorted values.
  std::vector<std::vector<std::uint32_t>> order(d);
  std::vector<std::vector<double>> sorted(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& o = order[j];
    o.resize(n);
    std::iota(o.begin(), o.end(), 0u);
    const auto col = x.col(static_cast<Eigen::Index>(j));
    std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) {
      return col[a] < col[b];
    });
    sorted[j].resize(n);
    for (std::size_t k = 0; k < n; ++k) sorted[j][k] = col[o[k]];
  }

  const double prior = weighted_prior(labels, sample_weights);
  StumpEnsemble model;
  model.n_features = d;
  model.base_score = std::log(prior / (1.0 - prior));
  std::vector<double> score(n, model.base_score);
  double loss = weighted_log_loss(score, labels, sample_weights);
  model.training_loss.push_back(loss);

  std::vector<double> grad(n), hess(n), trial(n);
  const double lambda = params.l2_leaf;
  const auto min_leaf = static_cast<std::size_t>(params.min_leaf);

  for (int round = 0; round < params.n_rounds; ++round) {
    double g_total = 0.0, h_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(score[i]);
      grad[i] = sample_weights[i] * (p - labels[i]);
      hess[i] = sample_weights[i] * p * (1.0 - p);
      g_total += grad[i];
      h_total += hess[i];
    }
    const double parent = g_total * g_total / (h_total + lambda);

    double best_gain = 0.0;
    Stump best;
    double best_gl = 0.0, best_hl = 0.0;
    bool found = false;
    const std::size_t k_lo = min_leaf - 1;
    const std::size_t k_hi = n - min_leaf;  // exclusive
    for (std::size_t j = 0; j < d; ++j) {
      const auto& o = order[j];
      const double* v = sorted[j].data();
      double gl = 0.0, hl = 0.0;
      for (std::size_t k = 0; k < k_hi; ++k) {
        gl += grad[o[k]];
        hl += hess[o[k]];
        if (k < k_lo || !(v[k] < v[k + 1])) continue;
        // gain = num / den - parent, compared without dividing.
        const double gr = g_total - gl;
        const double a = hl + lambda;
        const double b = h_total - hl + lambda;
        const double num = gl * gl * b + gr * gr * a;
        const double den = a * b;
        if (num > (best_gain + parent) * den) {
          best_gain = num / den - parent;
          best.feature = j;
          best.threshold = 0.5 * (v[k] + v[k + 1]);
          best_gl = gl;
          best_hl = hl;
          found = true;
        }
      }
    }
    if (!found || best_gain <= 1e-12) break;

    const double left = -best_gl / (best_hl + lambda);
    const double right = -(g_total - best_gl) / (h_total - best_hl + lambda);
    const auto col = x.col(static_cast<Eigen::Index>(best.feature));

    // Halve the shrinkage until the weighted training loss does not increase.
    double shrink = params.learning_rate;
    bool accepted = false;
    double new_loss = loss;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt, shrink *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = score[i] + shrink * (col[static_cast<Eigen::Index>(i)] <= best.threshold ? left : right);
      }
      new_loss = weighted_log_loss(trial, labels, sample_weights);
      accepted = new_loss <= loss;
      if (accepted) {
        best.left = shrink * left;
        best.right = shrink * right;
      }
    }
    if (!accepted) break;
    if (!std::isfinite(new_loss)) throw Error(ErrorCode::NonFinite, "boosting loss diverged");
    score.swap(trial);
    loss = new_loss;
    model.stumps.push_back(best);
    model.training_loss.push_back(loss);
  }
  return model;
}

ClassifierKind FittedClassifier::kind() const noexcept {
  switch (model_.index()) {
    case 0: return ClassifierKind::ConstantPrior;
    case 1: return ClassifierKind::LogisticRegression;
    case 2: return ClassifierKind::GradientBoostedStumps;
    default: return ClassifierKind::KNearest;
  }
}

namespace {

struct RawPredictor {
  std::span<const double> x;

  double operator()(const ConstantModel& m) const { return m.prior; }

  double operator()(const LogisticModel& m) const {
    double z = m.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += m.weights[static_cast<Eigen::Index>(j)] * x[j];
    return sigmoid(z);
  }

  double operator()(const StumpEnsemble& m) const {
    double z = m.base_score;
    for (const auto& s : m.stumps) z += x[s.feature] <= s.threshold ? s.left : s.right;
    return sigmoid(z);
  }

  double operator()(const KnnModel& m) const {
    const auto n = static_cast<std::size_t>(m.points.rows());
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const auto row = m.points.row(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = row[static_cast<Eigen::Index>(j)] - x[j];
        acc += diff * diff;
      }
      dist[i] = {acc, i};
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(m.k), n);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double num = 0.0, den = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = dist[r].second;
      num += m.weights[i] * m.labels[i];
      den += m.weights[i];
    }
    return num / den;
  }
};

}  // namespace

double FittedClassifier::finish(double p) const noexcept {
  if (logit_offset_ != 0.0 && p > 0.0 && p < 1.0) {
    p = sigmoid(std::log(p / (1.0 - p)) + logit_offset_);
  }
  return clip_probability(p);
}

double FittedClassifier::predict_proba(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw Error(ErrorCode::SchemaMismatch, "predict_proba: expected " +
                                               std::to_string(n_features_) + " features, got " +
                                               std::to_string(x.size()));
  }
  return finish(std::visit(RawPredictor{x}, model_));
}

std::vector<double> FittedClassifier::predict_proba(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != n_features_) {
    throw Error(ErrorCode::SchemaMismatch, "predict_proba: feature count differs from training");
  }
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  if (const auto* lr = std::get_if<LogisticModel>(&model_)) {
    const Eigen::VectorXd z = (x * lr->weights).array() + lr->bias;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      out[static_cast<std::size_t>(i)] = finish(sigmoid(z[i]));
    }
    return out;
  }
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    out[static_cast<std::size_t>(i)] =
        finish(std::visit(RawPredictor{std::span<const double>(row.data(), row.size())}, model_));
  }
  return out;
}

FittedClassifier fit(const ClassifierSpec& spec, const Matrix& x, std::span<const int> labels,
                     std::span<const double> sample_weights) {
  spec.validate();
  check_training_input(x, labels, sample_weights);
  const auto d = static_cast<std::size_t>(x.cols());
  const double prior = estimate_class_prior(labels);
  const double wprior = weighted_prior(labels, sample_weights);
  const double offset =
      std::log(prior / (1.0 - prior)) - std::log(wprior / (1.0 - wprior));
  switch (spec.kind) {
    case ClassifierKind::ConstantPrior:
      return {ConstantModel{prior}, d};
    case ClassifierKind::LogisticRegression:
      return {fit_logistic(x, labels, sample_weights, spec.logistic), d, offset};
    case ClassifierKind::GradientBoostedStumps:
      return {fit_boosted_stumps(x, labels, sample_weights, spec.boost), d, offset};
    case ClassifierKind::KNearest:
      return {KnnModel{x, std::vector<int>(labels.begin(), labels.end()),
                       std::vector<double>(sample_weights.begin(), sample_weights.end()),
                       spec.knn.k},
              d, offset};
  }
  throw Error(ErrorCode::InvalidConfig, "unknown classifier kind");
}

namespace {

std::vector<double> weights_for(const ClassifierSpec& spec, std::span<const int> labels) {
  if (spec.weighting == ClassWeighting::Balanced) return balanced_weights(labels);
  return std::vector<double>(labels.size(), 1.0);
}

}  // namespace

FittedClassifier fit(const ClassifierSpec& spec, const LabeledDataset& d) {
  const auto w = weights_for(spec, d.labels());
  return fit(spec, d.rows(), d.labels(), w);
}

std::vector<int> stratified_folds(const LabeledDataset& d, int folds, std::uint64_t seed) {
  const std::size_t n0 = d.count(0);
  const std::size_t n1 = d.count(1);
  if (folds < 2 || static_cast<std::size_t>(folds) > std::min(n0, n1)) {
    throw Error(ErrorCode::TooFewSamples,
                std::to_string(folds) + " stratified folds need at least that many samples per "
                "class (have " + std::to_string(n0) + " and " + std::to_string(n1) + ")");
  }
  const std::uint64_t fold_seed = derive_seed(seed, Stream::Folds);
  std::vector<int> fold_of(d.size(), 0);
  for (int label : {0, 1}) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.labels()[i] == label) {
        keyed.emplace_back(splitmix64(fold_seed ^ hash_string(d.ids()[i])), i);
      }
    }
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return d.ids()[a.second] < d.ids()[b.second];
    });
    // Class 1 continues where class 0 stopped so fold sizes stay balanced.
    const std::size_t offset = label == 0 ? 0 : n0;
    for (std::size_t r = 0; r < keyed.size(); ++r) {
      fold_of[keyed[r].second] = static_cast<int>((offset + r) % static_cast<std::size_t>(folds));
    }
  }
  return fold_of;
}

CrossFitResult cross_fit(const ClassifierSpec& spec, const LabeledDataset& d, std::uint64_t seed) {
  spec.validate();
  CrossFitResult out;
  out.fold_of = stratified_folds(d, spec.folds, seed);
  out.predictions.assign(d.size(), 0.0);

  // Training rows are ordered by fold key so a fit never depends on the
  // position of a sample in the dataset.
  const std::uint64_t fold_seed = derive_seed(seed, Stream::Folds);
  std::vector<std::size_t> by_key(d.size());
  std::iota(by_key.begin(), by_key.end(), std::size_t{0});
  std::vector<std::uint64_t> keys(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) keys[i] = splitmix64(fold_seed ^ hash_string(d.ids()[i]));
  std::sort(by_key.begin(), by_key.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return d.ids()[a] < d.ids()[b];
  });

  const Matrix& rows = d.rows();
  for (int f = 0; f < spec.folds; ++f) {
    std::vector<std::size_t> train, held;
    for (std::size_t i : by_key) {
      if (out.fold_of[i] != f) train.push_back(i);
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (out.fold_of[i] == f) held.push_back(i);
    }
    Matrix x_train(static_cast<Eigen::Index>(train.size()), rows.cols());
    std::vector<int> y_train(train.size());
    for (std::size_t k = 0; k < train.size(); ++k) {
      x_train.row(static_cast<Eigen::Index>(k)) = rows.row(static_cast<Eigen::Index>(train[k]));
      y_train[k] = d.labels()[train[k]];
    }
    const auto w = weights_for(spec, y_train);
    FittedClassifier model = fit(spec, x_train, y_train, w);

    Matrix x_held(static_cast<Eigen::Index>(held.size()), rows.cols());
    for (std::size_t k = 0; k < held.size(); ++k) {
      x_held.row(static_cast<Eigen::Index>(k)) = rows.row(static_cast<Eigen::Index>(held[k]));
    }
    const auto p = model.predict_proba(x_held);
    for (std::size_t k = 0; k < held.size(); ++k) out.predictions[held[k]] = p[k];

    out.models.push_back(std::move(model));
    out.training_rows.push_back(std::move(train));
  }
  return out;
}

std::vector<double> cross_fit_predictions(const ClassifierSpec& spec, const LabeledDataset& d,
                                          std::uint64_t seed) {
  return cross_fit(spec, d, seed).predictions;
}

}  // namespace hect
