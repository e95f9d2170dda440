// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace vhp {

// Sliding-window k-mer counts over A/C/G/T (stride 1); windows containing N
// are skipped. Index = base-4 with A=0, C=1, G=2, T=3.
struct KmerProfile {
  std::vector<std::int64_t> counts;  // length 4^k
  std::int64_t total = 0;
  int k = 0;
};

KmerProfile kmer_profile(std::string_view seq, int k = 4);

// 100 * cosine similarity of the relative-frequency vectors. Both profiles
// need at least one counted window.
double kmer_similarity(const KmerProfile& p, const KmerProfile& q);

}  // namespace vhp
