#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "hect/synthgen.hpp"
#include "hect/testing.hpp"

using namespace hect;

namespace {

std::pair<Ensemble, Ensemble> synth(std::size_t d, std::size_t m, std::size_t n, double delta,
                                    std::uint64_t seed) {
  SynthConfig cfg{.d = d, .m = m, .n = n, .seed = seed};
  std::vector<std::size_t> all(d);
  for (std::size_t j = 0; j < d; ++j) all[j] = j;
  auto shift = delta == 0.0 ? ShiftSpec::none() : ShiftSpec::mean_shift(delta, all);
  return {generate(cfg, shift, Role::Trusted), generate(cfg, shift, Role::Test)};
}

ClassifierSpec kind(ClassifierKind k, int folds = 5) {
  ClassifierSpec s;
  s.kind = k;
  s.folds = folds;
  return s;
}

}  // namespace

TEST(Statistic, Examples) {
  std::vector<int> y{1, 0, 0, 1};
  EXPECT_EQ(test_statistic(std::vector<double>(4, 0.5), y), 0.0);
  EXPECT_EQ(test_statistic(std::vector<double>{1, 0, 0, 1}, y), 0.25);
  EXPECT_NEAR(test_statistic(std::vector<double>{0.8, 0.3, 0.2, 0.9}, y),
              (0.09 + 0.04 + 0.09 + 0.16) / 4, 1e-15);
  EXPECT_NEAR(test_statistic(std::vector<double>{0.8, 0.3, 0.2, 0.9}, y), 0.095, 1e-15);
}

TEST(Statistic, Errors) {
  try {
    test_statistic(std::vector<double>{0.5}, std::vector<int>{0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  try {
    test_statistic(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
}

TEST(Statistic, BoundsZeroCaseAndPermutationInvariance) {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + g() % 40;
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(g() % 2);
    y[0] = 0;
    y[1] = 1;
    std::vector<double> r(n);
    for (auto& v : r) v = u(g);
    const double prior = estimate_class_prior(y);
    const double t = test_statistic(r, y);
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, std::pow(std::max(prior, 1 - prior), 2) + 1e-15);
    EXPECT_GT(t, 0.0);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<double> pr(n);
    std::vector<int> py(n);
    for (std::size_t k = 0; k < n; ++k) pr[k] = r[perm[k]], py[k] = y[perm[k]];
    EXPECT_NEAR(test_statistic(pr, py), t, 1e-15);

    std::vector<double> flat(n, prior);
    EXPECT_EQ(test_statistic(flat, y), 0.0);
  }
}

TEST(PValue, Examples) {
  std::vector<double> nulls(99);
  std::iota(nulls.begin(), nulls.end(), 1.0);
  EXPECT_DOUBLE_EQ(p_value(1000.0, nulls), 0.01);
  EXPECT_DOUBLE_EQ(p_value(-1.0, nulls), 1.0);
  std::vector<double> nine{1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_DOUBLE_EQ(p_value(9.0, nine), 0.2);
  try {
    p_value(0.0, std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyNull);
  }
}

TEST(PValue, LiesOnTheAddOneGrid) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> nulls(1 + g() % 50);
    for (auto& v : nulls) v = u(g);
    const double p = p_value(u(g), nulls);
    const double k = p * static_cast<double>(nulls.size() + 1);
    EXPECT_NEAR(k, std::round(k), 1e-9);
    EXPECT_GE(p, 1.0 / static_cast<double>(nulls.size() + 1));
    EXPECT_LE(p, 1.0);
  }
}

TEST(Config, ValidatesReplicatesAndAlpha) {
  EXPECT_THROW((PermConfig{.B = 5}.validate()), Error);
  EXPECT_THROW((PermConfig{.alpha = 1.5}.validate()), Error);
  EXPECT_THROW((GofConfig{.E = 0}.validate()), Error);
  EXPECT_NO_THROW(GofConfig{}.validate());
  EXPECT_EQ(PermConfig{}.B, 1000);
  EXPECT_EQ(GofConfig{}.E, 200);
}

TEST(TwoSample, LargeShiftRejectsAtTheSmallestPValue) {
  auto [t, x] = synth(5, 40, 10, 5.0, 3);
  auto r = two_sample_test(t, x, kind(ClassifierKind::LogisticRegression), {.B = 39, .seed = 4});
  EXPECT_EQ(r.method, TestMethod::TwoSamplePermutation);
  EXPECT_EQ(r.null_statistics.size(), 39u);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 40.0);
  EXPECT_EQ(r.decision, Decision::Fail);
  EXPECT_EQ(r.classifier.weighting, ClassWeighting::Balanced);
  EXPECT_DOUBLE_EQ(r.class_prior_hat, 10.0 / 50.0);
  EXPECT_EQ(r.n_trusted, 40u);
  EXPECT_EQ(r.n_test, 10u);
}

TEST(TwoSample, ConstantPriorNeverRejects) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto [t, x] = synth(4, 30, 10, 3.0, seed);
    auto r = two_sample_test(t, x, kind(ClassifierKind::ConstantPrior), {.B = 19, .seed = seed});
    EXPECT_LT(r.statistic_observed, 1e-3);
    EXPECT_EQ(r.decision, Decision::Pass);
  }
}

TEST(TwoSample, IndependentOfJobCount) {
  auto [t, x] = synth(4, 30, 10, 0.5, 8);
  auto spec = kind(ClassifierKind::GradientBoostedStumps);
  auto a = two_sample_test(t, x, spec, {.B = 19, .seed = 2, .jobs = 1});
  auto b = two_sample_test(t, x, spec, {.B = 19, .seed = 2, .jobs = 3});
  EXPECT_EQ(a.null_statistics, b.null_statistics);
  EXPECT_EQ(a.statistic_observed, b.statistic_observed);
}

TEST(Gof, ReplicateDatasetsUseOnlyTrustedRuns) {
  auto [t, x] = synth(3, 50, 4, 0.0, 1);
  std::set<std::string> trusted_ids(t.ids().begin(), t.ids().end());
  for (std::size_t e = 0; e < 10; ++e) {
    auto d = gof_replicate_dataset(t, 4, 77, e);
    EXPECT_EQ(d.count(0), 46u);
    EXPECT_EQ(d.count(1), 4u);
    std::set<std::string> ids(d.ids().begin(), d.ids().end());
    EXPECT_EQ(ids, trusted_ids);
  }
  EXPECT_NE(gof_replicate_dataset(t, 4, 77, 0).ids(), gof_replicate_dataset(t, 4, 77, 1).ids());
  auto obs = gof_observed_dataset(t, x, 4, 77);
  EXPECT_EQ(obs.count(0), 46u);
  EXPECT_EQ(obs.count(1), 4u);
}

TEST(Gof, ClimateSizedEnsemble) {
  auto [t, x] = synth(4, 350, 3, 0.0, 12);
  auto r = gof_test(t, x, kind(ClassifierKind::LogisticRegression, 3), {.E = 200, .seed = 5});
  EXPECT_EQ(r.null_statistics.size(), 200u);
  EXPECT_EQ(r.m_e, 3u);
  EXPECT_EQ(r.classifier.weighting, ClassWeighting::Unweighted);
  auto d = gof_replicate_dataset(t, 3, 5, 0);
  EXPECT_EQ(d.count(0), 347u);
  EXPECT_EQ(d.count(1), 3u);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Gof, InsufficientTrusted) {
  auto [t, x] = synth(3, 8, 6, 0.0, 1);
  auto code = [&](GofConfig cfg, int folds) {
    try {
      gof_test(t, x, kind(ClassifierKind::LogisticRegression, folds), cfg);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code({.E = 19, .m_e = 9}, 2), ErrorCode::InsufficientTrusted);
  EXPECT_EQ(code({.E = 19, .m_e = 0}, 2), ErrorCode::InsufficientTrusted);
  EXPECT_EQ(code({.E = 19, .m_e = 4}, 5), ErrorCode::InsufficientTrusted);
}

TEST(Gof, WarnsWhenTrustedIsSmallRelativeToMe) {
  auto [t, x] = synth(3, 9, 5, 0.0, 1);
  auto r = gof_test(t, x, kind(ClassifierKind::ConstantPrior, 2), {.E = 19, .seed = 1});
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Gof, LargeShiftFailsAndNullUsuallyPasses) {
  auto [t, x] = synth(6, 100, 8, 4.0, 21);
  auto spec = kind(ClassifierKind::LogisticRegression);
  auto fail = gof_test(t, x, spec, {.E = 39, .seed = 3});
  EXPECT_EQ(fail.decision, Decision::Fail);
  EXPECT_DOUBLE_EQ(fail.p_value, 1.0 / 40.0);

  int passes = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto [t0, x0] = synth(6, 100, 8, 0.0, 100 + s);
    passes += gof_test(t0, x0, spec, {.E = 39, .seed = s}).decision == Decision::Pass;
  }
  EXPECT_GE(passes, 7);
}

TEST(Gof, IndependentOfJobCount) {
  auto [t, x] = synth(4, 60, 6, 1.0, 8);
  auto spec = kind(ClassifierKind::KNearest);
  auto a = gof_test(t, x, spec, {.E = 19, .seed = 6, .jobs = 1});
  auto b = gof_test(t, x, spec, {.E = 19, .seed = 6, .jobs = 4});
  EXPECT_EQ(a.null_statistics, b.null_statistics);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(Gof, SchemaMismatch) {
  auto [t, x] = synth(4, 30, 6, 0.0, 1);
  auto [t2, x2] = synth(5, 30, 6, 0.0, 1);
  try {
    gof_test(t, x2, ClassifierSpec{}, {.E = 19});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  }
}
