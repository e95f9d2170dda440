// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/alignment.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "vhp/records.hpp"

namespace vhp {

namespace {
void require_nonempty(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty())
    throw ConfigError("alignment: sequences must be non-empty");
}
}  // namespace

double needleman_wunsch(std::string_view a, std::string_view b, const AlignScoring& scoring) {
  require_nonempty(a, b);
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = scoring.gap * static_cast<double>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = scoring.gap * static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const double diag = prev[j - 1] + (a[i - 1] == b[j - 1] ? scoring.match : scoring.mismatch);
      const double up = prev[j] + scoring.gap;
      const double left = cur[j - 1] + scoring.gap;
      cur[j] = std::max({diag, up, left});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double normalized_alignment_percent(std::string_view a, std::string_view b,
                                    const AlignScoring& scoring) {
  require_nonempty(a, b);
  const double best = scoring.match * static_cast<double>(std::max(a.size(), b.size()));
  return 100.0 * needleman_wunsch(a, b, scoring) / best;
}

double sequence_identity(std::string_view a, std::string_view b, const AlignScoring& scoring) {
  require_nonempty(a, b);
  const std::size_t n = a.size(), m = b.size();
  // Full matrix plus a traceback byte per cell; guard against runaway memory
  // on whole-genome pairs (subsample instead).
  constexpr std::size_t kMaxCells = std::size_t{1} << 29;  // ~512M cells
  if ((n + 1) * (m + 1) > kMaxCells)
    throw ConfigError("sequence_identity: sequences too long for full traceback");

  enum : std::uint8_t { kDiag = 0, kUp = 1, kLeft = 2 };
  std::vector<std::uint8_t> dir((n + 1) * (m + 1));
  std::vector<double> prev(m + 1), cur(m + 1);
  auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };

  for (std::size_t j = 1; j <= m; ++j) {
    prev[j] = scoring.gap * static_cast<double>(j);
    dir[at(0, j)] = kLeft;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = scoring.gap * static_cast<double>(i);
    dir[at(i, 0)] = kUp;
    for (std::size_t j = 1; j <= m; ++j) {
      const double diag = prev[j - 1] + (a[i - 1] == b[j - 1] ? scoring.match : scoring.mismatch);
      const double up = prev[j] + scoring.gap;
      const double left = cur[j - 1] + scoring.gap;
      // deterministic tie-break: diagonal, then up, then left
      double best = diag;
      std::uint8_t d = kDiag;
      if (up > best) { best = up; d = kUp; }
      if (left > best) { best = left; d = kLeft; }
      cur[j] = best;
      dir[at(i, j)] = d;
    }
    std::swap(prev, cur);
  }

  std::size_t i = n, j = m, matches = 0, columns = 0;
  while (i > 0 || j > 0) {
    ++columns;
    switch (dir[at(i, j)]) {
      case kDiag:
        if (a[i - 1] == b[j - 1]) ++matches;
        --i; --j;
        break;
      case kUp: --i; break;
      default: --j; break;
    }
  }
  return 100.0 * static_cast<double>(matches) / static_cast<double>(columns);
}

}  // namespace vhp
