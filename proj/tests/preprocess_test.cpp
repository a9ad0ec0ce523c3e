#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "hect/preprocess.hpp"

using namespace hect;

namespace {

Ensemble from_columns(const std::vector<std::vector<double>>& cols, Names names) {
  const std::size_t m = cols.front().size();
  Matrix x(m, cols.size());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) x(i, j) = cols[j][i];
    ids.push_back("r" + std::to_string(i));
  }
  return Ensemble(std::move(x), std::move(names), std::move(ids), Role::Trusted);
}

Ensemble random_ensemble(std::size_t m, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  Matrix x(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = n(g);
  Names names;
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < m; ++i) ids.push_back("r" + std::to_string(i));
  return Ensemble(std::move(x), names, ids, Role::Trusted);
}

// Textbook Pearson r, written independently of the library.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST(SpatialAverage, ConstantCellsGiveTheConstant) {
  RawDims dims{2, 1, 3, 4};
  std::vector<double> v(dims.total());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = k < 12 ? 7.5 : -2.0;
  auto run = spatial_average(RawRun("a", {"T", "Q"}, dims, v), true);
  EXPECT_EQ(run.features(), (std::vector<double>{7.5, -2.0}));
  EXPECT_EQ(run.variable_names(), (Names{"T", "Q"}));
}

TEST(SpatialAverage, UnweightedAndWeightedMeans) {
  RawDims dims{1, 1, 1, 2};
  auto plain = spatial_average(RawRun("a", {"T"}, dims, {1, 3}, std::vector<double>{1, 1}), true);
  EXPECT_DOUBLE_EQ(plain.features()[0], 2.0);
  auto weighted =
      spatial_average(RawRun("a", {"T"}, dims, {1, 3}, std::vector<double>{3, 1}), true);
  EXPECT_DOUBLE_EQ(weighted.features()[0], (3.0 * 1 + 1.0 * 3) / 4.0);
  EXPECT_DOUBLE_EQ(weighted.features()[0], 1.5);
}

TEST(SpatialAverage, OneFeaturePerVariableAndTimeStep) {
  RawDims dims{2, 3, 2, 2};
  std::vector<double> v(dims.total());
  std::iota(v.begin(), v.end(), 0.0);
  RawRun raw("a", {"T", "Q"}, dims, v);
  auto all = spatial_average(raw, false);
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(all.variable_names(), (Names{"T@0", "T@1", "T@2", "Q@0", "Q@1", "Q@2"}));
  // Uniform weights: the mean of the 4 consecutive values of each (var, time).
  for (std::size_t k = 0; k < 6; ++k) EXPECT_DOUBLE_EQ(all.features()[k], 4.0 * k + 1.5);
  auto last = spatial_average(raw, true);
  EXPECT_EQ(last.variable_names(), (Names{"T", "Q"}));
  EXPECT_DOUBLE_EQ(last.features()[0], 9.5);
  EXPECT_DOUBLE_EQ(last.features()[1], 21.5);
}

TEST(SpatialAverage, InvariantToCellPermutation) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  RawDims dims{3, 2, 2, 7};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(dims.total()), w(dims.n_cell);
    for (auto& x : v) x = u(g);
    for (auto& x : w) x = u(g);
    std::vector<std::size_t> perm(dims.n_cell);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<double> pv(v.size()), pw(w.size());
    for (std::size_t c = 0; c < dims.n_cell; ++c) pw[c] = w[perm[c]];
    for (std::size_t blk = 0; blk < v.size() / dims.n_cell; ++blk)
      for (std::size_t c = 0; c < dims.n_cell; ++c)
        pv[blk * dims.n_cell + c] = v[blk * dims.n_cell + perm[c]];
    auto a = spatial_average(RawRun("a", {"x", "y", "z"}, dims, v, w), false);
    auto b = spatial_average(RawRun("a", {"x", "y", "z"}, dims, pv, pw), false);
    for (std::size_t k = 0; k < a.size(); ++k)
      EXPECT_NEAR(a.features()[k], b.features()[k], 1e-12);
  }
}

TEST(RawRun, RejectsBadShapes) {
  EXPECT_THROW(RawRun("a", {"T"}, RawDims{1, 1, 1, 2}, {1.0}), Error);
  EXPECT_THROW(RawRun("a", {"T"}, RawDims{1, 1, 1, 2}, {1.0, 2.0}, std::vector<double>{1.0}),
               Error);
}

TEST(Filter, ConstantFeatureIsZeroVariance) {
  auto e = from_columns({{1, 2, 3, 5}, {4, 4, 4, 4}, {0, 1, 0, 2}}, {"a", "b", "c"});
  auto mask = fit_filter(e);
  EXPECT_FALSE(mask.kept[1]);
  EXPECT_EQ(mask.reasons[1], DropReason::ZeroVariance);
  EXPECT_TRUE(mask.kept[0]);
  EXPECT_TRUE(mask.kept[2]);
}

TEST(Filter, DuplicateDropsTheLaterIndex) {
  auto e = from_columns({{1, 2, 3, 5}, {0, 1, 0, 2}, {1, 2, 3, 5}}, {"a", "b", "c"});
  auto mask = fit_filter(e, FilterOptions{.corr_threshold = 0.98});
  EXPECT_TRUE(mask.kept[0]);
  EXPECT_FALSE(mask.kept[2]);
  EXPECT_EQ(mask.reasons[2], DropReason::Redundant);
}

TEST(Filter, ModerateCorrelationKeepsBoth) {
  // Built so that r = 0.5 exactly: y = xc + sqrt(3) * e with e orthogonal to 1 and xc.
  const double s3 = std::sqrt(3.0);
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{-2 - s3, -1 + 2 * s3, 0, 1 - 2 * s3, 2 + s3};
  const double r = pearson_oracle(x, y);
  EXPECT_NEAR(r, 0.5, 1e-12);
  EXPECT_NEAR(pearson_correlation(x, y), r, 1e-12);
  auto mask = fit_filter(from_columns({x, y}, {"x", "y"}), FilterOptions{.corr_threshold = 0.98});
  EXPECT_EQ(mask.kept_count(), 2u);
}

TEST(Filter, FlatTrajectoryIsLowTemporalVariability) {
  // a@t has an ensemble mean near 10 at every step; b@t grows.
  auto e = from_columns({{10, 11, 9, 10.2},
                         {10.1, 9, 11, 10.1},
                         {1, 0.5, 2, 1.4},
                         {5, 7, 6, 4}},
                        {"a@0", "a@1", "b@0", "b@1"});
  auto mask = fit_filter(e, FilterOptions{.corr_threshold = 0.99, .cv_threshold = 0.05});
  EXPECT_EQ(mask.reasons[0], DropReason::LowTemporalVariability);
  EXPECT_EQ(mask.reasons[1], DropReason::LowTemporalVariability);
  EXPECT_TRUE(mask.kept[2]);
  EXPECT_TRUE(mask.kept[3]);
  auto none = fit_filter(e, FilterOptions{.corr_threshold = 0.99, .cv_threshold = 0.0});
  EXPECT_TRUE(none.kept[0]);
}

TEST(Filter, NeedsTwoRuns) {
  auto e = from_columns({{1.0}}, {"a"});
  try {
    fit_filter(e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::DegenerateEnsemble);
  }
}

TEST(Filter, ApplyKeepsOrderAndIds) {
  auto e = from_columns({{1, 2, 3}, {5, 5, 5}, {0, 3, 1}}, {"f1", "f2", "f3"});
  auto mask = fit_filter(e);
  auto out = apply_filter(e, mask);
  EXPECT_EQ(out.variable_names(), (Names{"f1", "f3"}));
  EXPECT_EQ(out.ids(), e.ids());
  EXPECT_EQ(out.data()(2, 1), 1.0);

  FilterMask keep_all{e.variable_names(), {true, true, true}, {{}, {}, {}}};
  EXPECT_TRUE(apply_filter(e, keep_all).data() == e.data());
}

TEST(Filter, ApplyRejectsOtherSchema) {
  auto e = from_columns({{1, 2, 3}, {0, 3, 1}}, {"f1", "f2"});
  auto other = from_columns({{1, 2, 3}, {0, 3, 1}}, {"g1", "g2"});
  try {
    apply_filter(other, fit_filter(e));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SchemaMismatch);
  }
}

TEST(Filter, RefitOnFilteredEnsembleDropsNothing) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto base = random_ensemble(12, 6, 100 + trial);
    Matrix x(12, 9);
    x.leftCols(6) = base.data();
    x.col(6) = base.data().col(1) * 2.0 + 0.001 * base.data().col(2);  // near duplicate
    x.col(7).setConstant(3.0);
    x.col(8) = base.data().col(0).array() + 10.0;
    Names names{"a@0", "a@1", "a@2", "b@0", "b@1", "c", "d", "e", "a@3"};
    std::vector<std::string> ids(base.ids());
    Ensemble e(x, names, ids, Role::Trusted);
    FilterOptions opt{.corr_threshold = 0.9, .cv_threshold = 0.3};
    auto once = apply_filter(e, fit_filter(e, opt));
    auto again = fit_filter(once, opt);
    EXPECT_EQ(again.kept_count(), once.feature_count()) << "trial " << trial;
  }
}

TEST(SplitTimeSuffix, Parses) {
  EXPECT_EQ(split_time_suffix("T@12").first, "T");
  EXPECT_EQ(split_time_suffix("T@12").second, 12u);
  EXPECT_FALSE(split_time_suffix("T").second.has_value());
  EXPECT_FALSE(split_time_suffix("T@x").second.has_value());
}

TEST(Standardize, HandExample) {
  // mean 5, sample sd 2
  auto e = from_columns({{3, 5, 7}}, {"a"});
  auto p = fit_standardize(e);
  EXPECT_DOUBLE_EQ(p.means[0], 5.0);
  EXPECT_DOUBLE_EQ(p.sds[0], 2.0);
  auto one = apply_standardize(from_columns({{7}}, {"a"}), p);
  EXPECT_DOUBLE_EQ(one.data()(0, 0), 1.0);
}

TEST(Standardize, FittingEnsembleHasUnitMoments) {
  for (int trial = 0; trial < 10; ++trial) {
    auto raw = random_ensemble(40, 7, trial);
    Matrix x = raw.data();
    for (Eigen::Index j = 0; j < x.cols(); ++j) x.col(j) = x.col(j).array() * (j + 1.5) + 1e3 * j;
    Ensemble e(x, raw.variable_names(), raw.ids(), Role::Trusted);
    auto z = apply_standardize(e, fit_standardize(e));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      std::vector<double> col(z.data().col(j).begin(), z.data().col(j).end());
      EXPECT_LT(std::abs(sample_mean(col)), 1e-10);
      EXPECT_LT(std::abs(std::sqrt(sample_variance(col)) - 1.0), 1e-10);
    }
  }
}

TEST(Standardize, ConstantFeatureIsDegenerate) {
  auto e = from_columns({{1, 2, 3}, {4, 4, 4}}, {"a", "b"});
  try {
    fit_standardize(e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::DegenerateVariance);
  }
}

TEST(Standardize, UsesTrustedStatisticsOnly) {
  auto t = from_columns({{0, 2}}, {"a"});
  auto p = fit_standardize(t);
  auto test = from_columns({{100, 200}}, {"a"});
  auto z = apply_standardize(test, p);
  EXPECT_DOUBLE_EQ(z.data()(0, 0), (100 - 1.0) / std::sqrt(2.0));
}

TEST(Standardize, RejectsOtherSchema) {
  auto p = fit_standardize(from_columns({{0, 2}}, {"a"}));
  EXPECT_THROW(apply_standardize(from_columns({{0, 2}}, {"b"}), p), Error);
}
