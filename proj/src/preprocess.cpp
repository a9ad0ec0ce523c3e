#include "hect/preprocess.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <limits>
#include <map>

#include "hect/rng.hpp"

namespace hect {

RawRun::RawRun(std::string id, Names variable_names, RawDims dims, std::vector<double> values,
               std::optional<std::vector<double>> cell_weights)
    : id_(std::move(id)),
      names_(std::move(variable_names)),
      dims_(dims),
      values_(std::move(values)),
      weights_(std::move(cell_weights)) {
  if (dims_.n_var == 0 || dims_.n_time == 0 || dims_.n_level == 0 || dims_.n_cell == 0) {
    throw Error(ErrorCode::InvalidConfig, "raw run '" + id_ + "': all dimensions must be >= 1");
  }
  if (names_.size() != dims_.n_var) {
    throw Error(ErrorCode::SchemaMismatch, "raw run '" + id_ + "': name count != n_var");
  }
  if (values_.size() != dims_.total()) {
    throw Error(ErrorCode::ShapeMismatch, "raw run '" + id_ + "': value count != product of dims");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "raw run '" + id_ + "'");
  }
  if (weights_) {
    if (weights_->size() != dims_.n_cell) {
      throw Error(ErrorCode::ShapeMismatch, "raw run '" + id_ + "': weight count != n_cell");
    }
    for (double w : *weights_) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::InvalidConfig, "raw run '" + id_ + "': weights must be positive");
      }
    }
  }
}

Run spatial_average(const RawRun& raw, bool last_time_only) {
  const auto& dims = raw.dims();
  const std::size_t t_begin = last_time_only ? dims.n_time - 1 : 0;
  const bool tag_time = !last_time_only && dims.n_time > 1;

  double weight_total = 0.0;
  if (raw.cell_weights()) {
    for (double w : *raw.cell_weights()) weight_total += w;
  } else {
    weight_total = static_cast<double>(dims.n_cell);
  }
  const double denom = weight_total * static_cast<double>(dims.n_level);

  std::vector<double> features;
  Names names;
  for (std::size_t v = 0; v < dims.n_var; ++v) {
    for (std::size_t t = t_begin; t < dims.n_time; ++t) {
      double acc = 0.0;
      for (std::size_t l = 0; l < dims.n_level; ++l) {
        for (std::size_t c = 0; c < dims.n_cell; ++c) {
          const double w = raw.cell_weights() ? (*raw.cell_weights())[c] : 1.0;
          acc += w * raw.at(v, t, l, c);
        }
      }
      features.push_back(acc / denom);
      names.push_back(tag_time ? raw.variable_names()[v] + "@" + std::to_string(t)
                               : raw.variable_names()[v]);
    }
  }
  return Run(raw.id(), std::move(features), std::move(names));
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::ZeroVariance: return "ZeroVariance";
    case DropReason::Redundant: return "Redundant";
    case DropReason::LowTemporalVariability: return "LowTemporalVariability";
  }
  return "Unknown";
}

std::size_t FilterMask::kept_count() const noexcept {
  std::size_t c = 0;
  for (bool k : kept) c += k;
  return c;
}

double sample_mean(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mu = sample_mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(x.size() - 1);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::pair<std::string, std::optional<std::size_t>> split_time_suffix(const std::string& name) {
  const auto at = name.rfind('@');
  if (at == std::string::npos || at + 1 >= name.size()) return {name, std::nullopt};
  std::size_t t = 0;
  const char* first = name.data() + at + 1;
  const char* last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, t);
  if (ec != std::errc() || ptr != last) return {name, std::nullopt};
  return {name.substr(0, at), t};
}

namespace {

std::vector<std::vector<double>> columns(const Ensemble& e) {
  std::vector<std::vector<double>> cols(e.feature_count());
  const Matrix& data = e.data();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto col = data.col(static_cast<Eigen::Index>(j));
    cols[j].assign(col.begin(), col.end());
  }
  return cols;
}

std::string fingerprint(const Ensemble& e) {
  std::uint64_t h = 0;
  for (const auto& id : e.ids()) h = splitmix64(h ^ hash_string(id));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(to_string(e.role())) + ":" + std::to_string(e.size()) + ":" + buf;
}

}  // namespace

FilterMask fit_filter(const Ensemble& trusted, const FilterOptions& options) {
  if (trusted.size() < 2) {
    throw Error(ErrorCode::DegenerateEnsemble, "fit_filter needs at least 2 trusted runs");
  }
  if (!(options.corr_threshold > 0.0 && options.corr_threshold < 1.0) ||
      !(options.cv_threshold >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "corr_threshold must be in (0,1), cv_threshold >= 0");
  }
  const std::size_t d = trusted.feature_count();
  FilterMask mask{trusted.variable_names(), std::vector<bool>(d, true),
                  std::vector<std::optional<DropReason>>(d)};
  auto drop = [&](std::size_t j, DropReason r) {
    mask.kept[j] = false;
    mask.reasons[j] = r;
  };

  const auto cols = columns(trusted);
  for (std::size_t j = 0; j < d; ++j) {
    if (sample_variance(cols[j]) < options.zero_variance_tol) drop(j, DropReason::ZeroVariance);
  }

  for (std::size_t i = 0; i < d; ++i) {
    if (!mask.kept[i]) continue;
    for (std::size_t j = i + 1; j < d; ++j) {
      if (!mask.kept[j]) continue;
      if (std::abs(pearson_correlation(cols[i], cols[j])) > options.corr_threshold) {
        drop(j, DropReason::Redundant);
      }
    }
  }

  // Surviving per-time-step features grouped by variable, in time order.
  std::map<std::string, std::map<std::size_t, std::size_t>> groups;
  for (std::size_t j = 0; j < d; ++j) {
    if (!mask.kept[j]) continue;
    auto [var, t] = split_time_suffix(mask.variable_names[j]);
    if (t) groups[var][*t] = j;
  }
  for (const auto& [var, steps] : groups) {
    if (steps.size() < 2) continue;
    std::vector<double> trajectory;
    for (const auto& [t, j] : steps) trajectory.push_back(sample_mean(cols[j]));
    const double mu = sample_mean(trajectory);
    const double sd = std::sqrt(sample_variance(trajectory));
    const double cv = std::abs(mu) > 0.0 ? sd / std::abs(mu)
                                         : std::numeric_limits<double>::infinity();
    if (cv < options.cv_threshold) {
      for (const auto& [t, j] : steps) drop(j, DropReason::LowTemporalVariability);
    }
  }
  return mask;
}

Ensemble apply_filter(const Ensemble& e, const FilterMask& mask) {
  require_same_schema(mask.variable_names, e.variable_names(), "apply_filter");
  std::vector<Eigen::Index> keep;
  Names names;
  for (std::size_t j = 0; j < mask.kept.size(); ++j) {
    if (mask.kept[j]) {
      keep.push_back(static_cast<Eigen::Index>(j));
      names.push_back(mask.variable_names[j]);
    }
  }
  Matrix out(e.data().rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = e.data().col(keep[k]);
  }
  return Ensemble(std::move(out), std::move(names), e.ids(), e.role());
}

StandardizationParams fit_standardize(const Ensemble& trusted, double min_sd) {
  if (trusted.size() < 2) {
    throw Error(ErrorCode::DegenerateEnsemble, "fit_standardize needs at least 2 runs");
  }
  StandardizationParams p{trusted.variable_names(), {}, {}, fingerprint(trusted)};
  const auto cols = columns(trusted);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const double sd = std::sqrt(sample_variance(cols[j]));
    if (sd < min_sd) {
      throw Error(ErrorCode::DegenerateVariance,
                  "feature '" + p.variable_names[j] + "' has sd " + std::to_string(sd));
    }
    p.means.push_back(sample_mean(cols[j]));
    p.sds.push_back(sd);
  }
  return p;
}

Ensemble apply_standardize(const Ensemble& e, const StandardizationParams& params) {
  require_same_schema(params.variable_names, e.variable_names(), "apply_standardize");
  Matrix out = e.data();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      const auto k = static_cast<std::size_t>(j);
      out(i, j) = (out(i, j) - params.means[k]) / params.sds[k];
    }
  }
  return Ensemble(std::move(out), e.variable_names(), e.ids(), e.role());
}

}  // namespace hect
