#include "hect/core.hpp"

#include <cmath>
#include <unordered_set>

namespace hect {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::DegenerateEnsemble: return "DegenerateEnsemble";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyNull: return "EmptyNull";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InsufficientTrusted: return "InsufficientTrusted";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Role role) {
  return role == Role::Trusted ? "trusted" : "test";
}

namespace {

void require_finite(const Matrix& m, std::string_view context) {
  if (!m.allFinite()) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (!std::isfinite(m(i, j))) {
          throw Error(ErrorCode::NonFinite, std::string(context) + ": non-finite value at row " +
                                                std::to_string(i) + ", column " +
                                                std::to_string(j));
        }
      }
    }
  }
}

void require_unique(const std::vector<std::string>& ids) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateId, "run id '" + id + "'");
  }
}

}  // namespace

void require_same_schema(const Names& a, const Names& b, std::string_view context) {
  if (a != b) {
    throw Error(ErrorCode::SchemaMismatch,
                std::string(context) + ": variable names differ (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + " features)");
  }
}

Run::Run(std::string id, std::vector<double> features, Names variable_names)
    : id_(std::move(id)), features_(std::move(features)), names_(std::move(variable_names)) {
  if (features_.size() != names_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "run '" + id_ + "': " +
                                               std::to_string(features_.size()) + " values for " +
                                               std::to_string(names_.size()) + " names");
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "run '" + id_ + "'");
  }
}

Ensemble::Ensemble(const std::vector<Run>& runs, Role role) : role_(role) {
  if (runs.empty()) throw Error(ErrorCode::EmptyEnsemble, "no runs");
  names_ = std::make_shared<const Names>(runs.front().variable_names());
  data_.resize(static_cast<Eigen::Index>(runs.size()),
               static_cast<Eigen::Index>(names_->size()));
  ids_.reserve(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    require_same_schema(*names_, runs[i].variable_names(), "ensemble run '" + runs[i].id() + "'");
    for (std::size_t j = 0; j < names_->size(); ++j) {
      data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = runs[i].features()[j];
    }
    ids_.push_back(runs[i].id());
  }
  require_unique(ids_);
}

Ensemble::Ensemble(Matrix data, Names variable_names, std::vector<std::string> ids, Role role)
    : data_(std::move(data)),
      names_(std::make_shared<const Names>(std::move(variable_names))),
      ids_(std::move(ids)),
      role_(role) {
  if (data_.rows() == 0) throw Error(ErrorCode::EmptyEnsemble, "no runs");
  if (static_cast<std::size_t>(data_.cols()) != names_->size()) {
    throw Error(ErrorCode::SchemaMismatch, "column count differs from variable name count");
  }
  if (static_cast<std::size_t>(data_.rows()) != ids_.size()) {
    throw Error(ErrorCode::LengthMismatch, "run id count differs from row count");
  }
  require_finite(data_, "ensemble");
  require_unique(ids_);
}

Run Ensemble::run(std::size_t i) const {
  const auto row = data_.row(static_cast<Eigen::Index>(i));
  return Run(ids_.at(i), std::vector<double>(row.begin(), row.end()), *names_);
}

std::vector<Run> Ensemble::runs() const {
  std::vector<Run> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(run(i));
  return out;
}

Ensemble Ensemble::select(std::span<const std::size_t> rows) const {
  Matrix sub(static_cast<Eigen::Index>(rows.size()), data_.cols());
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    sub.row(static_cast<Eigen::Index>(k)) = data_.row(static_cast<Eigen::Index>(rows[k]));
    ids.push_back(ids_.at(rows[k]));
  }
  return Ensemble(std::move(sub), *names_, std::move(ids), role_);
}

Ensemble Ensemble::with_role(Role role) const {
  Ensemble copy = *this;
  copy.role_ = role;
  return copy;
}

LabeledDataset::LabeledDataset(Matrix rows, std::vector<int> labels, Names variable_names,
                               std::vector<std::string> ids)
    : rows_(std::move(rows)),
      labels_(std::move(labels)),
      names_(std::make_shared<const Names>(std::move(variable_names))),
      ids_(std::move(ids)) {
  if (static_cast<std::size_t>(rows_.rows()) != labels_.size() || ids_.size() != labels_.size()) {
    throw Error(ErrorCode::LengthMismatch, "rows, labels and ids must have equal length");
  }
  if (static_cast<std::size_t>(rows_.cols()) != names_->size()) {
    throw Error(ErrorCode::SchemaMismatch, "column count differs from variable name count");
  }
  std::size_t ones = 0;
  for (int y : labels_) {
    if (y != 0 && y != 1) throw Error(ErrorCode::InvalidConfig, "labels must be 0 or 1");
    ones += static_cast<std::size_t>(y);
  }
  if (ones == 0 || ones == labels_.size()) {
    throw Error(ErrorCode::SingleClass, "dataset needs both labels");
  }
  require_finite(rows_, "dataset");
  require_unique(ids_);
}

std::size_t LabeledDataset::count(int label) const noexcept {
  std::size_t c = 0;
  for (int y : labels_) c += (y == label);
  return c;
}

LabeledDataset LabeledDataset::relabeled(std::vector<int> labels) const {
  if (labels.size() != labels_.size()) {
    throw Error(ErrorCode::LengthMismatch, "relabel with a different number of labels");
  }
  LabeledDataset copy = *this;
  std::size_t ones = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::InvalidConfig, "labels must be 0 or 1");
    ones += static_cast<std::size_t>(y);
  }
  if (ones == 0 || ones == labels.size()) {
    throw Error(ErrorCode::SingleClass, "dataset needs both labels");
  }
  copy.labels_ = std::move(labels);
  return copy;
}

LabeledDataset pool_and_label(const Ensemble& trusted, const Ensemble& test) {
  if (trusted.role() != Role::Trusted || test.role() != Role::Test) {
    throw Error(ErrorCode::InvalidConfig, "pool_and_label expects (trusted, test) roles");
  }
  require_same_schema(trusted.variable_names(), test.variable_names(), "pool_and_label");
  const auto m = trusted.data().rows();
  const auto n = test.data().rows();
  Matrix rows(m + n, trusted.data().cols());
  rows.topRows(m) = trusted.data();
  rows.bottomRows(n) = test.data();
  std::vector<int> labels(static_cast<std::size_t>(m), 0);
  labels.resize(static_cast<std::size_t>(m + n), 1);
  std::vector<std::string> ids = trusted.ids();
  ids.insert(ids.end(), test.ids().begin(), test.ids().end());
  return LabeledDataset(std::move(rows), std::move(labels), trusted.variable_names(),
                        std::move(ids));
}

double estimate_class_prior(std::span<const int> labels) {
  std::size_t ones = 0;
  for (int y : labels) ones += (y == 1);
  return static_cast<double>(ones) / static_cast<double>(labels.size());
}

double estimate_class_prior(const LabeledDataset& d) { return estimate_class_prior(d.labels()); }

}  // namespace hect
