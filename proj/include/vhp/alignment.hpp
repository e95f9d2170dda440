// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace vhp {

struct AlignScoring {
  double match = 1.0;
  double mismatch = -1.0;
  double gap = -1.0;
};

// Optimal global alignment score (linear gap penalty). Score-only, two-row
// dynamic program.
double needleman_wunsch(std::string_view a, std::string_view b,
                        const AlignScoring& scoring = {});

// 100 * score / (match * max(|a|, |b|)): score as a fraction of the best
// achievable for the longer sequence. Can be negative.
double normalized_alignment_percent(std::string_view a, std::string_view b,
                                    const AlignScoring& scoring = {});

// 100 * matches / alignment length (gaps included) along one optimal global
// alignment; traceback ties prefer diagonal, then up, then left.
double sequence_identity(std::string_view a, std::string_view b,
                         const AlignScoring& scoring = {});

}  // namespace vhp
