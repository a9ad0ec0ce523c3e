#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "hect/io.hpp"

using namespace hect;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hect_io_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(g) * std::pow(10.0, static_cast<int>(g() % 40) - 20);
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_EQ(io::format_double(2.0), "2");
}

TEST(Csv, ParsesHeaderAndRows) {
  auto e = io::parse_csv("a, b,c\n1,2,3\n 4 ,5.5,-6e-1\n\n", Role::Test);
  EXPECT_EQ(e.variable_names(), (Names{"a", "b", "c"}));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e.data()(1, 2), -0.6);
  EXPECT_EQ(e.ids(), (std::vector<std::string>{"test-00000", "test-00001"}));
  EXPECT_EQ(e.role(), Role::Test);
}

TEST(Csv, MalformedRowReportsItsLine) {
  try {
    io::parse_csv("a,b\n1,2\n3\n", Role::Trusted);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
  try {
    io::parse_csv("a,b\n1,2\n3,4\n5,abc\n", Role::Trusted);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(io::parse_csv("a,b\n1,nan\n", Role::Trusted), ParseError);
  EXPECT_THROW(io::parse_csv("", Role::Trusted), Error);
  EXPECT_THROW(io::parse_csv("a,b\n", Role::Trusted), Error);
}

TEST(Csv, WriteReadRoundTripIsExact) {
  std::mt19937_64 g(8);
  std::normal_distribution<double> n;
  Matrix x(6, 4);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = n(g) * 1e3;
  std::vector<std::string> ids;
  for (int i = 0; i < 6; ++i) ids.push_back("trusted-0000" + std::to_string(i));
  Ensemble e(x, Names{"p", "q", "r", "s"}, ids, Role::Trusted);
  auto dir = scratch_dir("csv");
  io::write_csv(dir / "e.csv", e);
  auto back = io::read_csv(dir / "e.csv", Role::Trusted);
  EXPECT_TRUE(back.data() == e.data());
  EXPECT_EQ(back.variable_names(), e.variable_names());
  EXPECT_EQ(io::to_csv(back), io::to_csv(e));
}

TEST(Rawf64, RoundTripWithNamesSidecar) {
  Matrix x(3, 2);
  x << 1.25, -2, 3, 4e-300, 5, std::numeric_limits<double>::max();
  Ensemble e(x, Names{"u", "v"}, {"a", "b", "c"}, Role::Test);
  auto dir = scratch_dir("rawf64");
  auto data = dir / "e.bin";
  io::write_rawf64(data, io::default_names_path(data), e);
  EXPECT_EQ(io::default_names_path(data), dir / "e.bin.names.csv");
  auto back = io::read_rawf64(data, io::default_names_path(data), Role::Test);
  EXPECT_TRUE(back.data() == x);
  EXPECT_EQ(back.variable_names(), (Names{"u", "v"}));
  EXPECT_EQ(fs::file_size(data), 4 + 4 + 8 + 8 + 6 * 8u);
}

TEST(Rawf64, TruncatedOrWrongMagicFails) {
  auto dir = scratch_dir("rawf64_bad");
  io::write_text(dir / "bad.bin", "NOPE");
  io::write_names(dir / "n.csv", {"u"});
  EXPECT_THROW(io::read_rawf64(dir / "bad.bin", dir / "n.csv", Role::Trusted), Error);
  Matrix x(2, 1);
  x << 1, 2;
  io::write_rawf64(dir / "ok.bin", dir / "n.csv", Ensemble(x, Names{"u"}, {"a", "b"}, Role::Trusted));
  auto bytes = io::read_text(dir / "ok.bin");
  io::write_text(dir / "cut.bin", bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(io::read_rawf64(dir / "cut.bin", dir / "n.csv", Role::Trusted), Error);
  io::write_names(dir / "n2.csv", {"u", "v"});
  EXPECT_THROW(io::read_rawf64(dir / "ok.bin", dir / "n2.csv", Role::Trusted), Error);
}

TEST(Raw4d, RoundTripWithWeights) {
  RawDims dims{2, 2, 1, 3};
  std::vector<RawRun> runs;
  for (int r = 0; r < 3; ++r) {
    std::vector<double> v(dims.total());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = r * 100.0 + k;
    runs.emplace_back("x" + std::to_string(r), Names{"T", "Q"}, dims, v,
                      std::vector<double>{1, 2, 3});
  }
  auto dir = scratch_dir("raw4d");
  io::write_raw4d(dir / "r.bin", dir / "r.names.csv", runs);
  auto back = io::read_raw4d(dir / "r.bin", dir / "r.names.csv", Role::Trusted);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[2].values(), runs[2].values());
  EXPECT_EQ(back[1].dims(), dims);
  ASSERT_TRUE(back[0].cell_weights().has_value());
  EXPECT_EQ(*back[0].cell_weights(), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(back[0].id(), "trusted-00000");
}

TEST(Names, ReadWrite) {
  auto dir = scratch_dir("names");
  io::write_names(dir / "n.csv", {"a", "b@1"});
  EXPECT_EQ(io::read_names(dir / "n.csv"), (Names{"a", "b@1"}));
  EXPECT_THROW(io::read_names(dir / "missing.csv"), Error);
}
