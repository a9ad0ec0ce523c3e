#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hect/classifier.hpp"
#include "hect/core.hpp"

namespace hect {

enum class TestMethod { TwoSamplePermutation, GoodnessOfFit, PcaBaseline };
enum class Decision { Pass, Fail };

std::string_view to_string(TestMethod method);
std::string_view to_string(Decision decision);

// Per-run outcome of the PCA baseline.
struct BaselineDetails {
  std::size_t n_pc = 0;
  double z_threshold = 2.0;
  std::size_t fail_count = 3;
  std::vector<std::size_t> extreme_scores;  // per test run
  std::vector<bool> run_failed;
};

struct TestReport {
  TestMethod method = TestMethod::GoodnessOfFit;
  double statistic_observed = 0.0;
  std::vector<double> null_statistics;
  double p_value = 1.0;
  double alpha = 0.05;
  Decision decision = Decision::Pass;
  double class_prior_hat = 0.0;
  std::uint64_t seed = 0;
  ClassifierSpec classifier;
  std::size_t n_trusted = 0;
  std::size_t n_test = 0;
  std::size_t replicates = 0;  // B or E
  std::size_t m_e = 0;         // GoF only
  std::vector<std::string> warnings;
  std::optional<BaselineDetails> baseline;
};

struct PermConfig {
  int B = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  unsigned jobs = 1;  // output does not depend on this

  void validate() const;
};

struct GofConfig {
  int E = 200;
  std::optional<std::size_t> m_e;  // defaults to the test ensemble size
  double alpha = 0.05;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  void validate() const;
};

/// Mean squared deviation of the class-posterior estimates from the label-1
/// fraction, summed left to right.
double test_statistic(std::span<const double> r_hats, std::span<const int> labels);

/// Add-one Monte Carlo p-value; ties count as at least as extreme.
double p_value(double observed, std::span<const double> nulls);

/// Cross-fits `spec` on d and evaluates the statistic on the out-of-fold
/// predictions.
double cross_fit_statistic(const ClassifierSpec& spec, const LabeledDataset& d,
                           std::uint64_t seed);

TestReport two_sample_test(const Ensemble& trusted, const Ensemble& test,
                           const ClassifierSpec& spec, const PermConfig& cfg);

// Datasets used by the goodness-of-fit test. The observed dataset leaves out
// m_e randomly chosen trusted runs so observed and null datasets have equal
// class counts.
std::size_t resolve_m_e(const Ensemble& trusted, const Ensemble& test, const ClassifierSpec& spec,
                        const GofConfig& cfg);
LabeledDataset gof_observed_dataset(const Ensemble& trusted, const Ensemble& test,
                                    std::size_t m_e, std::uint64_t seed);
/// m_e trusted runs drawn without replacement and labeled 1; the rest 0.
LabeledDataset gof_replicate_dataset(const Ensemble& trusted, std::size_t m_e,
                                     std::uint64_t seed, std::size_t replicate);

TestReport gof_test(const Ensemble& trusted, const Ensemble& test, const ClassifierSpec& spec,
                    const GofConfig& cfg);

}  // namespace hect
