#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hect {

using Engine = std::mt19937_64;

// Stream tags keep the draws of different pipeline stages disjoint.
enum class Stream : std::uint64_t {
  Folds = 1,
  Permutation = 2,
  GofReplicate = 3,
  GofObserved = 4,
  Importance = 5,
  TrustedRuns = 6,
  TestRuns = 7,
  StudyTrial = 8,
  StudyTest = 9,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for replicate `index` of `stream` under `master`. Pure function of its
/// arguments, so parallel jobs never depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(stream)) ^
                    splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return Engine(derive_seed(master, stream, index));
}

// FNV-1a, used to key folds on run ids.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace hect
