#include "hect/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hect::io {

namespace {

std::string run_id(Role role, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", role == Role::Trusted ? "trusted" : "test", i);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, "not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value '" + std::string(field) + "'");
  return v;
}

Names parse_header(std::string_view line) {
  Names names;
  for (auto f : split_fields(line)) {
    if (f.empty()) throw ParseError(1, "empty variable name in header");
    names.emplace_back(f);
  }
  return names;
}

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream& in, std::string_view what) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw ParseError(0, "truncated file while reading " + std::string(what));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

void check_magic(std::istream& in, std::string_view magic) {
  char buf[4] = {};
  if (!in.read(buf, 4) || std::string_view(buf, 4) != magic) {
    throw ParseError(0, "bad magic, expected '" + std::string(magic) + "'");
  }
  const auto version = get<std::uint32_t>(in, "version");
  if (version != 1) throw ParseError(0, "unsupported version " + std::to_string(version));
}

double finite_or_throw(double v, std::string_view what) {
  if (!std::isfinite(v)) throw ParseError(0, "non-finite value in " + std::string(what));
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

Ensemble parse_csv(std::string_view text, Role role) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty() || trim(lines[0]).empty()) throw ParseError(1, "missing header row");
  Names names = parse_header(lines[0]);

  std::vector<double> values;
  std::vector<std::string> ids;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    const auto fields = split_fields(lines[k]);
    if (fields.size() != names.size()) {
      throw ParseError(k + 1, "expected " + std::to_string(names.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    for (auto f : fields) values.push_back(parse_number(f, k + 1));
    ids.push_back(run_id(role, ids.size()));
  }
  if (ids.empty()) throw Error(ErrorCode::EmptyEnsemble, "CSV has no data rows");
  Matrix data = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(ids.size()),
                                   static_cast<Eigen::Index>(names.size()));
  return Ensemble(std::move(data), std::move(names), std::move(ids), role);
}

Ensemble read_csv(const std::filesystem::path& path, Role role) {
  return parse_csv(read_text(path), role);
}

std::string to_csv(const Ensemble& e) {
  std::string out;
  const auto& names = e.variable_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out += ',';
    out += names[j];
  }
  out += '\n';
  for (Eigen::Index i = 0; i < e.data().rows(); ++i) {
    for (Eigen::Index j = 0; j < e.data().cols(); ++j) {
      if (j) out += ',';
      out += format_double(e.data()(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Ensemble& e) { write_text(path, to_csv(e)); }

Names read_names(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto nl = text.find('\n');
  const std::string_view first(text.data(), nl == std::string::npos ? text.size() : nl);
  if (trim(first).empty()) throw ParseError(1, "names file '" + path.string() + "' is empty");
  return parse_header(first);
}

void write_names(const std::filesystem::path& path, const Names& names) {
  std::string out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out += ',';
    out += names[j];
  }
  out += '\n';
  write_text(path, out);
}

std::filesystem::path default_names_path(const std::filesystem::path& data) {
  return std::filesystem::path(data.string() + ".names.csv");
}

Ensemble read_rawf64(const std::filesystem::path& data, const std::filesystem::path& names_path,
                     Role role) {
  Names names = read_names(names_path);
  auto in = open_in(data);
  check_magic(in, "HECT");
  const auto n_runs = get<std::uint64_t>(in, "n_runs");
  const auto n_features = get<std::uint64_t>(in, "n_features");
  if (n_features != names.size()) {
    throw Error(ErrorCode::SchemaMismatch, "RAWF64 has " + std::to_string(n_features) +
                                               " features but the sidecar names " +
                                               std::to_string(names.size()));
  }
  if (n_runs == 0) throw Error(ErrorCode::EmptyEnsemble, "RAWF64 has no runs");
  Matrix m(static_cast<Eigen::Index>(n_runs), static_cast<Eigen::Index>(n_features));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = finite_or_throw(get<double>(in, "values"), "RAWF64");
  }
  std::vector<std::string> ids;
  for (std::uint64_t i = 0; i < n_runs; ++i) ids.push_back(run_id(role, i));
  return Ensemble(std::move(m), std::move(names), std::move(ids), role);
}

void write_rawf64(const std::filesystem::path& data, const std::filesystem::path& names,
                  const Ensemble& e) {
  write_names(names, e.variable_names());
  auto out = open_out(data);
  out.write("HECT", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, e.size());
  put<std::uint64_t>(out, e.feature_count());
  for (Eigen::Index i = 0; i < e.data().rows(); ++i) {
    for (Eigen::Index j = 0; j < e.data().cols(); ++j) put<double>(out, e.data()(i, j));
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + data.string() + "'");
}

std::vector<RawRun> read_raw4d(const std::filesystem::path& data,
                               const std::filesystem::path& names_path, Role role) {
  Names names = read_names(names_path);
  auto in = open_in(data);
  check_magic(in, "HECR");
  const auto n_runs = get<std::uint64_t>(in, "n_runs");
  RawDims dims;
  dims.n_var = get<std::uint64_t>(in, "n_var");
  dims.n_time = get<std::uint64_t>(in, "n_time");
  dims.n_level = get<std::uint64_t>(in, "n_level");
  dims.n_cell = get<std::uint64_t>(in, "n_cell");
  if (dims.n_var != names.size()) {
    throw Error(ErrorCode::SchemaMismatch, "RAW4D variable count differs from sidecar names");
  }
  if (n_runs == 0) throw Error(ErrorCode::EmptyEnsemble, "RAW4D has no runs");
  std::optional<std::vector<double>> weights;
  if (get<std::uint8_t>(in, "has_weights")) {
    weights.emplace(dims.n_cell);
    for (double& w : *weights) w = finite_or_throw(get<double>(in, "weights"), "RAW4D weights");
  }
  std::vector<RawRun> runs;
  for (std::uint64_t r = 0; r < n_runs; ++r) {
    std::vector<double> values(dims.total());
    for (double& v : values) v = finite_or_throw(get<double>(in, "values"), "RAW4D");
    runs.emplace_back(run_id(role, r), names, dims, std::move(values), weights);
  }
  return runs;
}

void write_raw4d(const std::filesystem::path& data, const std::filesystem::path& names,
                 std::span<const RawRun> runs) {
  if (runs.empty()) throw Error(ErrorCode::EmptyEnsemble, "no raw runs to write");
  const RawRun& first = runs.front();
  for (const auto& r : runs) {
    if (!(r.dims() == first.dims()) || r.variable_names() != first.variable_names() ||
        r.cell_weights() != first.cell_weights()) {
      throw Error(ErrorCode::SchemaMismatch, "raw runs must share dims, names and weights");
    }
  }
  write_names(names, first.variable_names());
  auto out = open_out(data);
  out.write("HECR", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, runs.size());
  put<std::uint64_t>(out, first.dims().n_var);
  put<std::uint64_t>(out, first.dims().n_time);
  put<std::uint64_t>(out, first.dims().n_level);
  put<std::uint64_t>(out, first.dims().n_cell);
  put<std::uint8_t>(out, first.cell_weights() ? 1 : 0);
  if (first.cell_weights()) {
    for (double w : *first.cell_weights()) put<double>(out, w);
  }
  for (const auto& r : runs) {
    for (double v : r.values()) put<double>(out, v);
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + data.string() + "'");
}

}  // namespace hect::io
