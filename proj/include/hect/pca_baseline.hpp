#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "hect/core.hpp"
#include "hect/testing.hpp"

namespace hect {

/// Principal axes of the standardized trusted ensemble. Components are
/// columns, ordered by decreasing explained variance, each signed so its
/// largest-magnitude coordinate is positive.
struct PcaModel {
  Names variable_names;
  std::vector<double> means;
  std::vector<double> sds;
  Eigen::MatrixXd components;  // features x n_pc
  Eigen::VectorXd explained_variance;
  std::size_t n_pc = 0;
};

/// n_pc is clamped to min(n_pc, features, runs - 1).
PcaModel fit_pca(const Ensemble& trusted, std::size_t n_pc = 50);

Eigen::VectorXd project(const PcaModel& model, const Run& run);
// One row of scores per run.
Eigen::MatrixXd project(const PcaModel& model, const Ensemble& e);

struct PcaEctConfig {
  double z_threshold = 2.0;
  std::size_t fail_count = 3;
  // Reported as the p-value of a failing ensemble; the rule itself is not
  // calibrated.
  double alpha = 0.05;
};

/// A test run fails when at least fail_count of its scores exceed
/// z_threshold trusted standard deviations; the ensemble fails when a strict
/// majority of its runs fail.
TestReport pca_ect(const PcaModel& model, const Eigen::MatrixXd& trusted_scores,
                   const Ensemble& test, const PcaEctConfig& cfg = {});

}  // namespace hect
