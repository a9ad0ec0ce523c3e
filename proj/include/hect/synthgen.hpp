#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hect/classifier.hpp"
#include "hect/core.hpp"
#include "hect/pca_baseline.hpp"
#include "hect/testing.hpp"

namespace hect {

enum class CorrelationKind { Independent, AR1, Blocks };

struct Correlation {
  CorrelationKind kind = CorrelationKind::Independent;
  double rho = 0.0;
  std::size_t block_size = 1;
};

/// Gaussian ensemble emulator with unit marginal variances.
struct SynthConfig {
  std::size_t d = 20;
  Correlation correlation;
  std::size_t m = 100;  // trusted runs
  std::size_t n = 20;   // test runs
  std::uint64_t seed = 0;

  void validate() const;
};

enum class ShiftKind { None, MeanShift, VarianceScale, CorrelationBreak };

struct ShiftSpec {
  ShiftKind kind = ShiftKind::None;
  double delta = 0.0;   // MeanShift
  double factor = 1.0;  // VarianceScale
  std::vector<std::size_t> features;  // 0-based

  static ShiftSpec none() { return {}; }
  static ShiftSpec mean_shift(double delta, std::vector<std::size_t> features);
  static ShiftSpec variance_scale(double factor, std::vector<std::size_t> features);
  static ShiftSpec correlation_break(std::vector<std::size_t> features);

  // Value reported in study tables: delta, factor, 1 for a break, 0 for none.
  double magnitude() const noexcept;
  void validate(std::size_t d) const;
};

std::string_view to_string(CorrelationKind kind);
std::string_view to_string(ShiftKind kind);
CorrelationKind parse_correlation_kind(std::string_view name);
ShiftKind parse_shift_kind(std::string_view name);

/// Draws cfg.m (Trusted) or cfg.n (Test) runs. Run i of each role uses its own
/// seeded stream, so the trusted draw never depends on n or on the shift.
Ensemble generate(const SynthConfig& cfg, const ShiftSpec& shift, Role role);

enum class StudyType { TypeI, Power };

std::string_view to_string(StudyType type);
StudyType parse_study_type(std::string_view name);

struct StudyConfig {
  StudyType type = StudyType::TypeI;
  std::size_t trials = 100;
  TestMethod method = TestMethod::GoodnessOfFit;
  std::vector<ClassifierSpec> classifiers{ClassifierSpec{}};
  SynthConfig synth;
  std::vector<ShiftSpec> shifts;  // ignored for TypeI
  PermConfig perm;
  GofConfig gof;
  PcaEctConfig pca;
  std::size_t n_pc = 50;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct StudyRow {
  double shift = 0.0;
  std::string classifier;
  std::string method;
  std::size_t trials = 0;
  std::size_t rejections = 0;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
  double mean_p = 0.0;
};

struct StudyTable {
  std::vector<StudyRow> rows;
};

/// Runs one test per (shift, classifier, trial). Trial t draws its trusted
/// and test ensembles from streams derived from (seed, t), so every shift and
/// classifier sees the same underlying noise.
StudyTable run_study(const StudyConfig& cfg);

/// One trial of a study; exposed for the acceptance harness.
TestReport run_trial(const StudyConfig& cfg, const ClassifierSpec& spec, const ShiftSpec& shift,
                     std::size_t trial);

// Columns: shift,classifier,method,trials,rejections,rejection_rate,mc_se,mean_p
std::string to_csv(const StudyTable& table);

}  // namespace hect
