// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace vhp {

// Deterministic 64-bit generator (splitmix64 state advance). All randomness
// in the toolkit flows through this so runs reproduce across platforms and
// standard-library versions.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift; bias is negligible for the
  // index ranges used here (n far below 2^32).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Derive an independent child stream. `tag` selects the stream; the
  // derivation is pure so the parent state is not advanced. This is the
  // stream-splitting rule: every component that needs randomness gets
  // child(tag) of the single user-visible seed (tags in vhp::stream).
  Prng child(std::uint64_t tag) const {
    std::uint64_t z = state_ ^ (0xD6E8FEB86659FD93ULL * (tag + 0x632BE59BD9B4E019ULL));
    z = (z ^ (z >> 32)) * 0xFF51AFD7ED558CCDULL;
    z = (z ^ (z >> 32)) * 0xC4CEB9FE1A85EC53ULL;
    return Prng(z ^ (z >> 32));
  }

  // Fisher-Yates using below(); iteration order is part of the contract.
  template <typename RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Stream tags. Stable values: they are part of the reproducibility contract
// recorded in run manifests.
namespace stream {
inline constexpr std::uint64_t kSplit = 1;        // train/test + fold assignment
inline constexpr std::uint64_t kFoldBase = 16;    // fold f uses kFoldBase + f
inline constexpr std::uint64_t kInit = 2;         // parameter init within a fold
inline constexpr std::uint64_t kShuffle = 3;      // epoch shuffling within a fold
inline constexpr std::uint64_t kDropout = 4;      // dropout masks within a fold
inline constexpr std::uint64_t kDiagnostics = 5;  // pair sampling
}  // namespace stream

}  // namespace vhp
