#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hect/error.hpp"

namespace hect {

// Samples are rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Names = std::vector<std::string>;

enum class Role { Trusted, Test };

std::string_view to_string(Role role);

/// One simulation output reduced to a flat feature vector.
class Run {
 public:
  Run(std::string id, std::vector<double> features, Names variable_names);

  const std::string& id() const noexcept { return id_; }
  const std::vector<double>& features() const noexcept { return features_; }
  const Names& variable_names() const noexcept { return names_; }
  std::size_t size() const noexcept { return features_.size(); }

 private:
  std::string id_;
  std::vector<double> features_;
  Names names_;
};

/// A nonempty set of runs sharing one feature schema. Stored as a dense
/// runs x features matrix; runs are materialized on request.
class Ensemble {
 public:
  Ensemble(const std::vector<Run>& runs, Role role);
  Ensemble(Matrix data, Names variable_names, std::vector<std::string> ids, Role role);

  Role role() const noexcept { return role_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t feature_count() const noexcept { return names_->size(); }
  const Names& variable_names() const noexcept { return *names_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Matrix& data() const noexcept { return data_; }

  Run run(std::size_t i) const;
  std::vector<Run> runs() const;

  // Runs at the given positions, in that order, with the same role.
  Ensemble select(std::span<const std::size_t> rows) const;
  Ensemble with_role(Role role) const;

 private:
  Matrix data_;
  std::shared_ptr<const Names> names_;
  std::vector<std::string> ids_;
  Role role_;
};

/// Pooled runs with labels 0 (trusted) and 1 (test).
class LabeledDataset {
 public:
  LabeledDataset(Matrix rows, std::vector<int> labels, Names variable_names,
                 std::vector<std::string> ids);

  const Matrix& rows() const noexcept { return rows_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const Names& variable_names() const noexcept { return *names_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t feature_count() const noexcept { return names_->size(); }
  std::size_t count(int label) const noexcept;

  // Same rows and ids, new labels (validated).
  LabeledDataset relabeled(std::vector<int> labels) const;

 private:
  Matrix rows_;
  std::vector<int> labels_;
  std::shared_ptr<const Names> names_;
  std::vector<std::string> ids_;
};

void require_same_schema(const Names& a, const Names& b, std::string_view context);

/// Trusted runs labeled 0 followed by test runs labeled 1.
LabeledDataset pool_and_label(const Ensemble& trusted, const Ensemble& test);

/// Fraction of label-1 rows.
double estimate_class_prior(const LabeledDataset& d);
double estimate_class_prior(std::span<const int> labels);

}  // namespace hect
