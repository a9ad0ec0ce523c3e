#include "hect/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hect/parallel.hpp"
#include "hect/rng.hpp"

namespace hect {

std::vector<FeatureSignificance> DiagnosticsReport::significant_features() const {
  std::vector<FeatureSignificance> out;
  std::copy_if(features.begin(), features.end(), std::back_inserter(out),
               [](const auto& f) { return f.flagged; });
  return out;
}

std::vector<double> local_discrepancy(const LabeledDataset& d, std::span<const double> r_hats) {
  if (r_hats.size() != d.size()) {
    throw Error(ErrorCode::LengthMismatch, "local_discrepancy: r_hats and dataset differ in length");
  }
  const double prior = estimate_class_prior(d);
  std::vector<double> out(r_hats.size());
  for (std::size_t i = 0; i < r_hats.size(); ++i) out[i] = r_hats[i] - prior;
  return out;
}

namespace {

// (1/N) sum (r_i - prior)(y_i - prior). Same expectation as the test
// statistic for a calibrated classifier, but unlike the statistic it depends
// on which sample received which prediction, so a column shuffle moves it.
double aligned_statistic(std::span<const double> r_hats, std::span<const int> labels) {
  const double prior = estimate_class_prior(labels);
  double acc = 0.0;
  for (std::size_t i = 0; i < r_hats.size(); ++i) {
    acc += (r_hats[i] - prior) * (static_cast<double>(labels[i]) - prior);
  }
  return acc / static_cast<double>(r_hats.size());
}

}  // namespace

std::vector<double> feature_importance(const CrossFitResult& fitted, const LabeledDataset& d,
                                       int n_shuffles, std::uint64_t seed) {
  if (n_shuffles < 1) throw Error(ErrorCode::InvalidConfig, "n_shuffles must be >= 1");
  if (fitted.predictions.size() != d.size()) {
    throw Error(ErrorCode::LengthMismatch, "cross-fit result does not match dataset");
  }
  const double base = aligned_statistic(fitted.predictions, d.labels());
  const std::size_t n = d.size();
  const std::size_t p = d.feature_count();
  const auto folds = fitted.models.size();

  std::vector<std::vector<std::size_t>> held(folds);
  for (std::size_t i = 0; i < n; ++i) held[static_cast<std::size_t>(fitted.fold_of[i])].push_back(i);

  std::vector<double> importance(p, 0.0);
  std::vector<double> shuffled_pred(n);
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < p; ++j) {
    double drop = 0.0;
    for (int s = 0; s < n_shuffles; ++s) {
      Engine engine(derive_seed(derive_seed(seed, Stream::Importance, j), Stream::Importance,
                                static_cast<std::uint64_t>(s)));
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), engine);
      for (std::size_t f = 0; f < folds; ++f) {
        Matrix x(static_cast<Eigen::Index>(held[f].size()), d.rows().cols());
        for (std::size_t k = 0; k < held[f].size(); ++k) {
          const std::size_t i = held[f][k];
          x.row(static_cast<Eigen::Index>(k)) = d.rows().row(static_cast<Eigen::Index>(i));
          x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
              d.rows()(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(j));
        }
        const auto pred = fitted.models[f].predict_proba(x);
        for (std::size_t k = 0; k < held[f].size(); ++k) shuffled_pred[held[f][k]] = pred[k];
      }
      drop += base - aligned_statistic(shuffled_pred, d.labels());
    }
    importance[j] = std::max(0.0, drop / n_shuffles);
  }
  return importance;
}

std::vector<double> feature_importance(const ClassifierSpec& spec, const LabeledDataset& d,
                                       int n_shuffles, std::uint64_t seed) {
  if (n_shuffles < 1) throw Error(ErrorCode::InvalidConfig, "n_shuffles must be >= 1");
  return feature_importance(cross_fit(spec, d, seed), d, n_shuffles, seed);
}

std::vector<FeatureSignificance> significant_features(std::span<const double> importances,
                                                      const Matrix& null_importances,
                                                      double alpha, const Names& names) {
  if (static_cast<std::size_t>(null_importances.cols()) != importances.size() ||
      null_importances.rows() == 0 || (!names.empty() && names.size() != importances.size())) {
    throw Error(ErrorCode::ShapeMismatch, "null importances must be replicates x features");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be in (0,1)");
  const auto reps = static_cast<std::size_t>(null_importances.rows());
  // Smallest count of strictly-lower null values that puts the importance
  // above the (1 - alpha) order statistic.
  const auto needed = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(reps) - 1e-9));

  std::vector<FeatureSignificance> out;
  for (std::size_t j = 0; j < importances.size(); ++j) {
    std::size_t below = 0;
    for (std::size_t e = 0; e < reps; ++e) {
      below += null_importances(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(j)) <
               importances[j];
    }
    FeatureSignificance f;
    f.index = j;
    f.name = names.empty() ? "f" + std::to_string(j) : names[j];
    f.importance = importances[j];
    f.quantile = static_cast<double>(below) / static_cast<double>(reps);
    f.flagged = below >= std::max<std::size_t>(needed, 1);
    out.push_back(std::move(f));
  }
  return out;
}

GofDiagnostics gof_diagnose(const Ensemble& trusted, const Ensemble& test,
                            const ClassifierSpec& spec, const GofConfig& cfg, int n_shuffles) {
  cfg.validate();
  if (n_shuffles < 1) throw Error(ErrorCode::InvalidConfig, "n_shuffles must be >= 1");
  const ClassifierSpec resolved = spec.resolved(ClassWeighting::Unweighted);
  resolved.validate();
  require_same_schema(trusted.variable_names(), test.variable_names(), "gof_diagnose");
  const std::size_t m_e = resolve_m_e(trusted, test, resolved, cfg);
  const std::size_t p = trusted.feature_count();

  GofDiagnostics out;
  TestReport& report = out.test;
  report.method = TestMethod::GoodnessOfFit;
  report.alpha = cfg.alpha;
  report.seed = cfg.seed;
  report.classifier = resolved;
  report.n_trusted = trusted.size();
  report.n_test = test.size();
  report.replicates = static_cast<std::size_t>(cfg.E);
  report.m_e = m_e;

  const LabeledDataset observed = gof_observed_dataset(trusted, test, m_e, cfg.seed);
  const CrossFitResult fitted = cross_fit(resolved, observed, cfg.seed);
  report.class_prior_hat = estimate_class_prior(observed);
  report.statistic_observed = test_statistic(fitted.predictions, observed.labels());
  const auto importances = feature_importance(fitted, observed, n_shuffles, cfg.seed);

  report.null_statistics.assign(static_cast<std::size_t>(cfg.E), 0.0);
  out.null_importances = Matrix::Zero(cfg.E, static_cast<Eigen::Index>(p));
  parallel_for(report.null_statistics.size(), cfg.jobs, [&](std::size_t e) {
    const LabeledDataset rep = gof_replicate_dataset(trusted, m_e, cfg.seed, e);
    const CrossFitResult rep_fit = cross_fit(resolved, rep, cfg.seed);
    report.null_statistics[e] = test_statistic(rep_fit.predictions, rep.labels());
    const auto imp = feature_importance(rep_fit, rep, n_shuffles, cfg.seed);
    for (std::size_t j = 0; j < p; ++j) {
      out.null_importances(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(j)) = imp[j];
    }
  });
  report.p_value = p_value(report.statistic_observed, report.null_statistics);
  report.decision = report.p_value <= cfg.alpha ? Decision::Fail : Decision::Pass;
  if (trusted.size() < 2 * m_e) {
    report.warnings.push_back("fewer than 2*m_e trusted runs; null replicates overlap heavily");
  }

  DiagnosticsReport& diag = out.diagnostics;
  diag.sample_ids = observed.ids();
  diag.labels = observed.labels();
  diag.local_discrepancies = local_discrepancy(observed, fitted.predictions);
  diag.variable_names = observed.variable_names();
  diag.feature_importances = importances;
  diag.alpha = cfg.alpha;
  diag.features = significant_features(importances, out.null_importances, cfg.alpha,
                                       observed.variable_names());
  return out;
}

}  // namespace hect
