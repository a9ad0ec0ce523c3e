#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hect/core.hpp"
#include "hect/preprocess.hpp"

namespace hect::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// CSV: a header row of variable names, then one row of numbers per run.
// Fields are comma separated and unquoted; surrounding blanks are ignored.
// Run ids are "<role>-<row>" with rows counted from 0.
Ensemble parse_csv(std::string_view text, Role role);
Ensemble read_csv(const std::filesystem::path& path, Role role);
std::string to_csv(const Ensemble& e);
void write_csv(const std::filesystem::path& path, const Ensemble& e);

// Header-only CSV holding variable names (the sidecar of the binary formats).
Names read_names(const std::filesystem::path& path);
void write_names(const std::filesystem::path& path, const Names& names);

/// Sidecar path used when none is given: "<data>.names.csv".
std::filesystem::path default_names_path(const std::filesystem::path& data);

// RAWF64: "HECT", u32 version = 1, u64 n_runs, u64 n_features, then
// row-major little-endian IEEE-754 doubles.
Ensemble read_rawf64(const std::filesystem::path& data, const std::filesystem::path& names,
                     Role role);
void write_rawf64(const std::filesystem::path& data, const std::filesystem::path& names,
                  const Ensemble& e);

// RAW4D: "HECR", u32 version = 1, u64 n_runs, u64 n_var, u64 n_time,
// u64 n_level, u64 n_cell, u8 has_weights, [n_cell f64 weights], then each
// run's values indexed (variable, time, level, cell), all little-endian.
std::vector<RawRun> read_raw4d(const std::filesystem::path& data,
                               const std::filesystem::path& names, Role role);
void write_raw4d(const std::filesystem::path& data, const std::filesystem::path& names,
                 std::span<const RawRun> runs);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace hect::io
