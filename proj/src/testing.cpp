#include "hect/testing.hpp"

#include <algorithm>
#include <numeric>

#include "hect/parallel.hpp"
#include "hect/rng.hpp"

namespace hect {

std::string_view to_string(TestMethod method) {
  switch (method) {
    case TestMethod::TwoSamplePermutation: return "TwoSamplePermutation";
    case TestMethod::GoodnessOfFit: return "GoodnessOfFit";
    case TestMethod::PcaBaseline: return "PcaBaseline";
  }
  return "Unknown";
}

std::string_view to_string(Decision decision) {
  return decision == Decision::Pass ? "Pass" : "Fail";
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be in (0,1)");
}

Decision decide(double p, double alpha) { return p <= alpha ? Decision::Fail : Decision::Pass; }

}  // namespace

void PermConfig::validate() const {
  if (B < 19) throw Error(ErrorCode::InvalidConfig, "B must be >= 19");
  check_alpha(alpha);
}

void GofConfig::validate() const {
  if (E < 19) throw Error(ErrorCode::InvalidConfig, "E must be >= 19");
  check_alpha(alpha);
}

double test_statistic(std::span<const double> r_hats, std::span<const int> labels) {
  if (r_hats.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "r_hats and labels differ in length");
  }
  std::size_t ones = 0;
  for (int y : labels) ones += (y == 1);
  if (ones == 0 || ones == labels.size()) throw Error(ErrorCode::SingleClass, "test_statistic");
  const double prior = static_cast<double>(ones) / static_cast<double>(labels.size());
  double acc = 0.0;
  for (double r : r_hats) acc += (r - prior) * (r - prior);
  return acc / static_cast<double>(r_hats.size());
}

double p_value(double observed, std::span<const double> nulls) {
  if (nulls.empty()) throw Error(ErrorCode::EmptyNull, "p_value needs at least one null statistic");
  std::size_t at_least = 0;
  for (double t : nulls) at_least += (t >= observed);
  return static_cast<double>(1 + at_least) / static_cast<double>(nulls.size() + 1);
}

double cross_fit_statistic(const ClassifierSpec& spec, const LabeledDataset& d,
                           std::uint64_t seed) {
  return test_statistic(cross_fit_predictions(spec, d, seed), d.labels());
}

TestReport two_sample_test(const Ensemble& trusted, const Ensemble& test,
                           const ClassifierSpec& spec, const PermConfig& cfg) {
  cfg.validate();
  const ClassifierSpec resolved = spec.resolved(ClassWeighting::Balanced);
  resolved.validate();
  const LabeledDataset pooled = pool_and_label(trusted, test);

  TestReport report;
  report.method = TestMethod::TwoSamplePermutation;
  report.alpha = cfg.alpha;
  report.seed = cfg.seed;
  report.classifier = resolved;
  report.n_trusted = trusted.size();
  report.n_test = test.size();
  report.replicates = static_cast<std::size_t>(cfg.B);
  report.class_prior_hat = estimate_class_prior(pooled);
  report.statistic_observed = cross_fit_statistic(resolved, pooled, cfg.seed);

  report.null_statistics.assign(static_cast<std::size_t>(cfg.B), 0.0);
  parallel_for(report.null_statistics.size(), cfg.jobs, [&](std::size_t b) {
    std::vector<int> labels = pooled.labels();
    Engine engine = make_engine(cfg.seed, Stream::Permutation, b);
    std::shuffle(labels.begin(), labels.end(), engine);
    report.null_statistics[b] =
        cross_fit_statistic(resolved, pooled.relabeled(std::move(labels)), cfg.seed);
  });

  report.p_value = p_value(report.statistic_observed, report.null_statistics);
  report.decision = decide(report.p_value, cfg.alpha);
  return report;
}

std::size_t resolve_m_e(const Ensemble& trusted, const Ensemble& test, const ClassifierSpec& spec,
                        const GofConfig& cfg) {
  const std::size_t m_e = cfg.m_e.value_or(test.size());
  const std::size_t m = trusted.size();
  if (m_e < 1 || m_e > m || m - m_e < static_cast<std::size_t>(spec.folds)) {
    throw Error(ErrorCode::InsufficientTrusted,
                "m_e=" + std::to_string(m_e) + " with " + std::to_string(m) +
                    " trusted runs and " + std::to_string(spec.folds) + " folds");
  }
  return m_e;
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, Engine engine) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), engine);
  return idx;
}

}  // namespace

LabeledDataset gof_observed_dataset(const Ensemble& trusted, const Ensemble& test,
                                    std::size_t m_e, std::uint64_t seed) {
  auto idx = shuffled_indices(trusted.size(), make_engine(seed, Stream::GofObserved));
  std::vector<std::size_t> keep(idx.begin() + static_cast<std::ptrdiff_t>(m_e), idx.end());
  std::sort(keep.begin(), keep.end());
  return pool_and_label(trusted.select(keep).with_role(Role::Trusted), test);
}

LabeledDataset gof_replicate_dataset(const Ensemble& trusted, std::size_t m_e,
                                     std::uint64_t seed, std::size_t replicate) {
  auto idx = shuffled_indices(trusted.size(), make_engine(seed, Stream::GofReplicate, replicate));
  std::vector<std::size_t> pseudo(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m_e));
  std::vector<std::size_t> rest(idx.begin() + static_cast<std::ptrdiff_t>(m_e), idx.end());
  std::sort(pseudo.begin(), pseudo.end());
  std::sort(rest.begin(), rest.end());
  return pool_and_label(trusted.select(rest).with_role(Role::Trusted),
                        trusted.select(pseudo).with_role(Role::Test));
}

TestReport gof_test(const Ensemble& trusted, const Ensemble& test, const ClassifierSpec& spec,
                    const GofConfig& cfg) {
  cfg.validate();
  const ClassifierSpec resolved = spec.resolved(ClassWeighting::Unweighted);
  resolved.validate();
  require_same_schema(trusted.variable_names(), test.variable_names(), "gof_test");
  const std::size_t m_e = resolve_m_e(trusted, test, resolved, cfg);

  const LabeledDataset observed = gof_observed_dataset(trusted, test, m_e, cfg.seed);

  TestReport report;
  report.method = TestMethod::GoodnessOfFit;
  report.alpha = cfg.alpha;
  report.seed = cfg.seed;
  report.classifier = resolved;
  report.n_trusted = trusted.size();
  report.n_test = test.size();
  report.replicates = static_cast<std::size_t>(cfg.E);
  report.m_e = m_e;
  report.class_prior_hat = estimate_class_prior(observed);
  report.statistic_observed = cross_fit_statistic(resolved, observed, cfg.seed);

  report.null_statistics.assign(static_cast<std::size_t>(cfg.E), 0.0);
  parallel_for(report.null_statistics.size(), cfg.jobs, [&](std::size_t e) {
    report.null_statistics[e] =
        cross_fit_statistic(resolved, gof_replicate_dataset(trusted, m_e, cfg.seed, e), cfg.seed);
  });

  report.p_value = p_value(report.statistic_observed, report.null_statistics);
  report.decision = decide(report.p_value, cfg.alpha);
  if (trusted.size() < 2 * m_e) {
    report.warnings.push_back("fewer than 2*m_e trusted runs; null replicates overlap heavily");
  }
  return report;
}

}  // namespace hect
