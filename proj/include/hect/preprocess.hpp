#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hect/core.hpp"

namespace hect {

struct RawDims {
  std::size_t n_var = 1;
  std::size_t n_time = 1;
  std::size_t n_level = 1;
  std::size_t n_cell = 1;

  std::size_t total() const noexcept { return n_var * n_time * n_level * n_cell; }
  bool operator==(const RawDims&) const = default;
};

/// Gridded output of one run, indexed (variable, time, level, cell) in
/// row-major order.
class RawRun {
 public:
  RawRun(std::string id, Names variable_names, RawDims dims, std::vector<double> values,
         std::optional<std::vector<double>> cell_weights = std::nullopt);

  const std::string& id() const noexcept { return id_; }
  const Names& variable_names() const noexcept { return names_; }
  const RawDims& dims() const noexcept { return dims_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::optional<std::vector<double>>& cell_weights() const noexcept { return weights_; }

  double at(std::size_t var, std::size_t time, std::size_t level, std::size_t cell) const {
    return values_[((var * dims_.n_time + time) * dims_.n_level + level) * dims_.n_cell + cell];
  }

 private:
  std::string id_;
  Names names_;
  RawDims dims_;
  std::vector<double> values_;
  std::optional<std::vector<double>> weights_;
};

/// Weighted global mean per variable (and per time step unless
/// last_time_only). Features are variable-major; names become "var@t" when
/// more than one time step is kept.
Run spatial_average(const RawRun& raw, bool last_time_only);

enum class DropReason { ZeroVariance, Redundant, LowTemporalVariability };

std::string_view to_string(DropReason reason);

struct FilterMask {
  Names variable_names;  // schema the mask was fit on
  std::vector<bool> kept;
  std::vector<std::optional<DropReason>> reasons;  // set iff !kept[j]

  std::size_t kept_count() const noexcept;
};

struct FilterOptions {
  double corr_threshold = 0.98;
  double cv_threshold = 0.0;
  double zero_variance_tol = 1e-12;
};

/// Order of evaluation: zero variance, then greedy pairwise redundancy among
/// surviving features (later index dropped), then low temporal variability
/// of the surviving "var@t" groups. Fitting on the filtered ensemble again
/// drops nothing.
FilterMask fit_filter(const Ensemble& trusted, const FilterOptions& options = {});
Ensemble apply_filter(const Ensemble& e, const FilterMask& mask);

// Splits "name@t" into ("name", t); names without a valid suffix map to
// (name, nullopt).
std::pair<std::string, std::optional<std::size_t>> split_time_suffix(const std::string& name);

struct StandardizationParams {
  Names variable_names;
  std::vector<double> means;
  std::vector<double> sds;
  std::string fitted_on;
};

StandardizationParams fit_standardize(const Ensemble& trusted, double min_sd = 1e-12);
Ensemble apply_standardize(const Ensemble& e, const StandardizationParams& params);

// Sample statistics in a fixed summation order.
double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);
double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace hect
