#include <gtest/gtest.h>

#include <cmath>

#include "hect/preprocess.hpp"
#include "hect/synthgen.hpp"

using namespace hect;

namespace {

std::vector<double> column(const Ensemble& e, std::size_t j) {
  const auto c = e.data().col(static_cast<Eigen::Index>(j));
  return {c.begin(), c.end()};
}

}  // namespace

TEST(Generate, ShapesIdsAndNames) {
  SynthConfig cfg{.d = 3, .m = 4, .n = 2, .seed = 1};
  auto t = generate(cfg, ShiftSpec::none(), Role::Trusted);
  auto x = generate(cfg, ShiftSpec::none(), Role::Test);
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(x.size(), 2u);
  EXPECT_EQ(t.variable_names(), (Names{"f0", "f1", "f2"}));
  EXPECT_EQ(t.ids()[3], "trusted-00003");
  EXPECT_EQ(x.ids()[1], "test-00001");
  EXPECT_EQ(x.role(), Role::Test);
}

TEST(Generate, DeterministicAndSeedSensitive) {
  SynthConfig cfg{.d = 5, .m = 10, .n = 3, .seed = 42};
  EXPECT_TRUE(generate(cfg, {}, Role::Trusted).data() == generate(cfg, {}, Role::Trusted).data());
  auto other = cfg;
  other.seed = 43;
  EXPECT_FALSE(generate(cfg, {}, Role::Trusted).data() == generate(other, {}, Role::Trusted).data());
}

TEST(Generate, TrustedDrawIgnoresTestSizeAndShift) {
  SynthConfig a{.d = 4, .correlation = {CorrelationKind::AR1, 0.5, 1}, .m = 20, .n = 3, .seed = 9};
  SynthConfig b = a;
  b.n = 50;
  auto base = generate(a, ShiftSpec::none(), Role::Trusted);
  EXPECT_TRUE(base.data() == generate(b, ShiftSpec::none(), Role::Trusted).data());
  EXPECT_TRUE(base.data() == generate(a, ShiftSpec::mean_shift(3, {0, 1}), Role::Trusted).data());
  EXPECT_TRUE(base.data() == generate(a, ShiftSpec::variance_scale(2, {2}), Role::Trusted).data());
  // A larger test ensemble extends the smaller one.
  auto small = generate(a, ShiftSpec::none(), Role::Test);
  auto large = generate(b, ShiftSpec::none(), Role::Test);
  EXPECT_TRUE(small.data() == large.data().topRows(3));
}

TEST(Generate, NoShiftHasTheTrustedLaw) {
  SynthConfig cfg{.d = 3, .m = 4000, .n = 4000, .seed = 5};
  auto t = generate(cfg, ShiftSpec::none(), Role::Trusted);
  auto x = generate(cfg, ShiftSpec::none(), Role::Test);
  for (std::size_t j = 0; j < 3; ++j) {
    const double se = std::sqrt(2.0 / 4000.0);
    EXPECT_NEAR(sample_mean(column(t, j)), sample_mean(column(x, j)), 4 * se);
    EXPECT_NEAR(sample_variance(column(x, j)), 1.0, 0.1);
  }
}

TEST(Generate, MeanShiftMovesOnlyTheChosenFeatures) {
  SynthConfig cfg{.d = 8, .m = 10, .n = 400, .seed = 3};
  auto x = generate(cfg, ShiftSpec::mean_shift(2.0, {1, 2, 3, 4, 5}), Role::Test);
  const double bound = 3.0 / std::sqrt(400.0);
  for (std::size_t j = 0; j < 8; ++j) {
    const double target = (j >= 1 && j <= 5) ? 2.0 : 0.0;
    EXPECT_NEAR(sample_mean(column(x, j)), target, bound) << j;
  }
}

TEST(Generate, Ar1CorrelationOverTenThousandDraws) {
  SynthConfig cfg{.d = 2, .correlation = {CorrelationKind::AR1, 0.9, 1}, .m = 10000, .seed = 11};
  auto t = generate(cfg, ShiftSpec::none(), Role::Trusted);
  EXPECT_NEAR(pearson_correlation(column(t, 0), column(t, 1)), 0.9, 0.02);
  SynthConfig four = cfg;
  four.d = 4;
  auto t4 = generate(four, ShiftSpec::none(), Role::Trusted);
  EXPECT_NEAR(pearson_correlation(column(t4, 0), column(t4, 2)), 0.81, 0.02);
  EXPECT_NEAR(sample_variance(column(t4, 3)), 1.0, 0.05);
}

TEST(Generate, BlockCorrelation) {
  SynthConfig cfg{.d = 6, .correlation = {CorrelationKind::Blocks, 0.6, 3}, .m = 10000, .seed = 2};
  auto t = generate(cfg, ShiftSpec::none(), Role::Trusted);
  EXPECT_NEAR(pearson_correlation(column(t, 0), column(t, 2)), 0.6, 0.03);
  EXPECT_NEAR(pearson_correlation(column(t, 3), column(t, 4)), 0.6, 0.03);
  EXPECT_NEAR(pearson_correlation(column(t, 2), column(t, 3)), 0.0, 0.03);
}

TEST(Generate, VarianceScaleAndCorrelationBreak) {
  SynthConfig cfg{.d = 3, .correlation = {CorrelationKind::AR1, 0.9, 1}, .m = 10, .n = 10000,
                  .seed = 4};
  auto scaled = generate(cfg, ShiftSpec::variance_scale(3.0, {0}), Role::Test);
  // The factor multiplies the value, so the variance grows by its square.
  EXPECT_NEAR(sample_variance(column(scaled, 0)), 9.0, 0.4);
  EXPECT_NEAR(sample_variance(column(scaled, 1)), 1.0, 0.05);
  auto broken = generate(cfg, ShiftSpec::correlation_break({1}), Role::Test);
  EXPECT_NEAR(pearson_correlation(column(broken, 0), column(broken, 1)), 0.0, 0.03);
  EXPECT_NEAR(sample_variance(column(broken, 1)), 1.0, 0.05);
  EXPECT_NEAR(pearson_correlation(column(broken, 0), column(broken, 2)), 0.81, 0.03);
}

TEST(Config, Validation) {
  EXPECT_THROW((SynthConfig{.d = 0}.validate()), Error);
  EXPECT_THROW((SynthConfig{.m = 0}.validate()), Error);
  EXPECT_THROW((SynthConfig{.correlation = {CorrelationKind::AR1, 1.0, 1}}.validate()), Error);
  EXPECT_THROW(ShiftSpec::mean_shift(1.0, {20}).validate(20), Error);
  EXPECT_THROW(ShiftSpec::variance_scale(0.0, {1}).validate(20), Error);
  EXPECT_NO_THROW(ShiftSpec::mean_shift(1.0, {19}).validate(20));
  EXPECT_EQ(ShiftSpec::mean_shift(2.5, {0}).magnitude(), 2.5);
  EXPECT_EQ(ShiftSpec::none().magnitude(), 0.0);
  EXPECT_EQ(parse_shift_kind("mean"), ShiftKind::MeanShift);
  EXPECT_EQ(parse_correlation_kind("ar1"), CorrelationKind::AR1);
  EXPECT_EQ(parse_study_type("power"), StudyType::Power);
  EXPECT_THROW(parse_shift_kind("tilt"), Error);
}

TEST(Study, DeterministicAcrossJobCounts) {
  StudyConfig cfg;
  cfg.type = StudyType::Power;
  cfg.trials = 6;
  cfg.method = TestMethod::GoodnessOfFit;
  cfg.synth = {.d = 4, .m = 40, .n = 5};
  cfg.shifts = {ShiftSpec::mean_shift(0.0, {0}), ShiftSpec::mean_shift(3.0, {0, 1})};
  cfg.gof = {.E = 19};
  ClassifierSpec constant;
  constant.kind = ClassifierKind::ConstantPrior;
  cfg.classifiers = {constant, ClassifierSpec{}};
  cfg.seed = 17;
  cfg.jobs = 1;
  auto a = run_study(cfg);
  cfg.jobs = 3;
  auto b = run_study(cfg);
  EXPECT_EQ(to_csv(a), to_csv(b));
  ASSERT_EQ(a.rows.size(), 4u);
  for (const auto& row : a.rows) {
    EXPECT_EQ(row.trials, 6u);
    EXPECT_DOUBLE_EQ(row.rejection_rate, row.rejections / 6.0);
    EXPECT_NEAR(row.mc_se, std::sqrt(row.rejection_rate * (1 - row.rejection_rate) / 6.0), 1e-15);
  }
  EXPECT_EQ(to_csv(a).substr(0, to_csv(a).find('\n')),
            "shift,classifier,method,trials,rejections,rejection_rate,mc_se,mean_p");
}

TEST(Study, ConstantPriorNeverRejectsAndLogisticSeesLargeShifts) {
  StudyConfig cfg;
  cfg.type = StudyType::Power;
  cfg.trials = 5;
  cfg.method = TestMethod::TwoSamplePermutation;
  cfg.synth = {.d = 4, .m = 40, .n = 10};
  cfg.shifts = {ShiftSpec::mean_shift(4.0, {0, 1, 2, 3})};
  cfg.perm = {.B = 19};
  ClassifierSpec constant;
  constant.kind = ClassifierKind::ConstantPrior;
  cfg.classifiers = {constant, ClassifierSpec{}};
  cfg.seed = 3;
  auto t = run_study(cfg);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].rejections, 0u);
  EXPECT_EQ(t.rows[1].rejections, 5u);
}

TEST(Study, TypeIUsesTheNullShift) {
  StudyConfig cfg;
  cfg.type = StudyType::TypeI;
  cfg.trials = 3;
  cfg.method = TestMethod::PcaBaseline;
  cfg.synth = {.d = 5, .m = 30, .n = 5};
  cfg.shifts = {ShiftSpec::mean_shift(9.0, {0})};
  cfg.n_pc = 3;
  cfg.seed = 1;
  auto t = run_study(cfg);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].shift, 0.0);
  EXPECT_EQ(t.rows[0].method, "PcaBaseline");
}
