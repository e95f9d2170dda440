// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/kmer.hpp"

#include <cmath>

#include "vhp/preprocess.hpp"
#include "vhp/records.hpp"

namespace vhp {

KmerProfile kmer_profile(std::string_view seq, int k) {
  if (k < 1 || k > 15) throw ConfigError("kmer_profile: k must lie in [1, 15]");
  if (seq.size() < static_cast<std::size_t>(k))
    throw ConfigError("kmer_profile: sequence shorter than k");

  KmerProfile p;
  p.k = k;
  p.counts.assign(std::size_t{1} << (2 * k), 0);
  const std::uint64_t mask = (std::uint64_t{1} << (2 * k)) - 1;

  std::uint64_t code = 0;
  int valid = 0;  // length of the current run of A/C/G/T ending here
  for (char c : seq) {
    const int ch = base_channel(c);
    if (ch < 0 || ch == 4) {  // N or anything unexpected breaks the window
      valid = 0;
      code = 0;
      continue;
    }
    code = ((code << 2) | static_cast<std::uint64_t>(ch)) & mask;
    if (++valid >= k) {
      ++p.counts[code];
      ++p.total;
    }
  }
  return p;
}

double kmer_similarity(const KmerProfile& p, const KmerProfile& q) {
  if (p.counts.size() != q.counts.size())
    throw ConfigError("kmer_similarity: profiles have different k");
  if (p.total <= 0 || q.total <= 0)
    throw ConfigError("kmer_similarity: profile with no counted windows");

  double dot = 0, np = 0, nq = 0;
  for (std::size_t i = 0; i < p.counts.size(); ++i) {
    const double x = static_cast<double>(p.counts[i]) / static_cast<double>(p.total);
    const double y = static_cast<double>(q.counts[i]) / static_cast<double>(q.total);
    dot += x * y;
    np += x * x;
    nq += y * y;
  }
  return 100.0 * dot / (std::sqrt(np) * std::sqrt(nq));
}

}  // namespace vhp
