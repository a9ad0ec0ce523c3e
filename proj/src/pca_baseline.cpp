#include "hect/pca_baseline.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "hect/preprocess.hpp"

namespace hect {

PcaModel fit_pca(const Ensemble& trusted, std::size_t n_pc) {
  if (trusted.size() < 2) throw Error(ErrorCode::DegenerateEnsemble, "fit_pca needs >= 2 runs");
  if (n_pc < 1) throw Error(ErrorCode::InvalidConfig, "n_pc must be >= 1");
  const StandardizationParams params = fit_standardize(trusted);
  const Ensemble z = apply_standardize(trusted, params);

  const Eigen::MatrixXd data = z.data();
  const auto m = static_cast<double>(data.rows());
  const Eigen::MatrixXd cov = (data.transpose() * data) / (m - 1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateEnsemble, "eigendecomposition did not converge");
  }
  const auto d = static_cast<std::size_t>(cov.rows());
  const std::size_t keep = std::min({n_pc, d, trusted.size() - 1});

  PcaModel model;
  model.variable_names = trusted.variable_names();
  model.means = params.means;
  model.sds = params.sds;
  model.n_pc = keep;
  model.components.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(keep));
  model.explained_variance.resize(static_cast<Eigen::Index>(keep));
  // Eigen returns ascending eigenvalues.
  for (std::size_t k = 0; k < keep; ++k) {
    const auto src = static_cast<Eigen::Index>(d - 1 - k);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    model.components.col(static_cast<Eigen::Index>(k)) = v;
    model.explained_variance[static_cast<Eigen::Index>(k)] = std::max(0.0, solver.eigenvalues()[src]);
  }
  return model;
}

namespace {

Eigen::VectorXd standardized(const PcaModel& model, std::span<const double> x) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) {
    z[static_cast<Eigen::Index>(j)] = (x[j] - model.means[j]) / model.sds[j];
  }
  return z;
}

}  // namespace

Eigen::VectorXd project(const PcaModel& model, const Run& run) {
  require_same_schema(model.variable_names, run.variable_names(), "project");
  return model.components.transpose() * standardized(model, run.features());
}

Eigen::MatrixXd project(const PcaModel& model, const Ensemble& e) {
  require_same_schema(model.variable_names, e.variable_names(), "project");
  Eigen::MatrixXd scores(e.data().rows(), static_cast<Eigen::Index>(model.n_pc));
  for (Eigen::Index i = 0; i < e.data().rows(); ++i) {
    const auto row = e.data().row(i);
    scores.row(i) = (model.components.transpose() *
                     standardized(model, std::span<const double>(row.data(), row.size())))
                        .transpose();
  }
  return scores;
}

TestReport pca_ect(const PcaModel& model, const Eigen::MatrixXd& trusted_scores,
                   const Ensemble& test, const PcaEctConfig& cfg) {
  if (static_cast<std::size_t>(trusted_scores.cols()) != model.n_pc || trusted_scores.rows() < 2) {
    throw Error(ErrorCode::ShapeMismatch, "trusted scores must be runs x n_pc with >= 2 runs");
  }
  if (!(cfg.z_threshold > 0.0) || cfg.fail_count < 1) {
    throw Error(ErrorCode::InvalidConfig, "z_threshold must be > 0 and fail_count >= 1");
  }
  const Eigen::MatrixXd scores = project(model, test);

  const auto m = static_cast<double>(trusted_scores.rows());
  Eigen::VectorXd sd(trusted_scores.cols());
  for (Eigen::Index k = 0; k < trusted_scores.cols(); ++k) {
    const auto col = trusted_scores.col(k);
    const double mu = col.mean();
    sd[k] = std::sqrt((col.array() - mu).square().sum() / (m - 1.0));
  }
  const double sd_floor = 1e-12 * std::max(1.0, sd.size() ? sd.maxCoeff() : 0.0);

  TestReport report;
  report.method = TestMethod::PcaBaseline;
  report.alpha = cfg.alpha;
  report.n_trusted = static_cast<std::size_t>(trusted_scores.rows());
  report.n_test = test.size();
  BaselineDetails details;
  details.n_pc = model.n_pc;
  details.z_threshold = cfg.z_threshold;
  details.fail_count = cfg.fail_count;
  if (cfg.fail_count > model.n_pc) {
    report.warnings.push_back("InvalidConfig: fail_count exceeds n_pc; no run can fail");
  }

  std::size_t failing = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    std::size_t extreme = 0;
    for (Eigen::Index k = 0; k < scores.cols(); ++k) {
      if (sd[k] > sd_floor && std::abs(scores(i, k)) > cfg.z_threshold * sd[k]) ++extreme;
    }
    const bool failed = extreme >= cfg.fail_count;
    failing += failed;
    details.extreme_scores.push_back(extreme);
    details.run_failed.push_back(failed);
  }
  report.statistic_observed = static_cast<double>(failing) / static_cast<double>(test.size());
  report.decision = 2 * failing > test.size() ? Decision::Fail : Decision::Pass;
  report.p_value = report.decision == Decision::Fail ? cfg.alpha : 1.0;
  report.baseline = std::move(details);
  return report;
}

}  // namespace hect
