// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vhp/alignment.hpp"
#include "vhp/chi2.hpp"
#include "vhp/preprocess.hpp"

namespace vhp {

enum class DiagMode { raw, preprocessed };

inline const char* diag_mode_name(DiagMode m) {
  return m == DiagMode::raw ? "before_preprocessing" : "after_preprocessing";
}

// Mean pairwise statistics over sampled (train, test) pairs.
struct SimilarityStats {
  double alignment_percent = 0.0;
  double kmer_percent = 0.0;
  double identity_percent = 0.0;
  std::int64_t pairs = 0;
  std::int64_t kmer_pairs = 0;  // pairs with a usable k-mer profile on both sides
};

struct DiagnosticsReport {
  DiagMode mode = DiagMode::raw;
  SimilarityStats similarity;
  Chi2Result chi2;                     // test composition vs train proportions
  std::array<double, 5> train_counts{};  // A,C,G,T,N
  std::array<double, 5> test_counts{};
  std::int64_t requested_pairs = 0;
  std::uint64_t seed = 0;
};

// Total A/C/G/T/N character counts across a dataset (post-normalization).
std::array<double, 5> nucleotide_counts(const std::vector<CleanSequence>& dataset);

// Mean alignment / k-mer / identity statistics over `pairs` uniformly
// sampled (train, test) pairs; deterministic for a fixed seed. Pairs whose
// k-mer profile is empty on either side (all windows touch N) are skipped
// for the k-mer mean only.
SimilarityStats dataset_similarity(const std::vector<CleanSequence>& train,
                                   const std::vector<CleanSequence>& test,
                                   std::int64_t pairs, std::uint64_t seed,
                                   const AlignScoring& scoring = {}, int k = 4);

// Full Table-4/Table-5 style diagnostics for one mode. `seq_len` applies in
// preprocessed mode only.
DiagnosticsReport run_diagnostics(const std::vector<SequenceRecord>& train,
                                  const std::vector<SequenceRecord>& test, DiagMode mode,
                                  std::int64_t pairs, std::uint64_t seed,
                                  std::size_t seq_len = kDefaultSeqLen);

std::string similarity_csv(const std::vector<DiagnosticsReport>& reports);
std::string chi2_csv(const std::vector<DiagnosticsReport>& reports);

}  // namespace vhp
