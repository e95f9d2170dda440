// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/diagnostics.hpp"

#include <cstdio>
#include <sstream>

#include "vhp/kmer.hpp"
#include "vhp/prng.hpp"

namespace vhp {

std::array<double, 5> nucleotide_counts(const std::vector<CleanSequence>& dataset) {
  if (dataset.empty()) throw ConfigError("nucleotide_counts: empty dataset");
  std::array<double, 5> counts{};
  for (const auto& s : dataset)
    for (char c : s.bases) {
      const int ch = base_channel(c);
      if (ch < 0) throw ParseError("nucleotide_counts: unnormalized character");
      counts[static_cast<std::size_t>(ch)] += 1.0;
    }
  return counts;
}

SimilarityStats dataset_similarity(const std::vector<CleanSequence>& train,
                                   const std::vector<CleanSequence>& test,
                                   std::int64_t pairs, std::uint64_t seed,
                                   const AlignScoring& scoring, int k) {
  if (train.empty() || test.empty())
    throw ConfigError("dataset_similarity: both datasets must be non-empty");
  if (pairs < 1) throw ConfigError("dataset_similarity: pairs must be >= 1");

  Prng rng = Prng(seed).child(stream::kDiagnostics);
  SimilarityStats stats;
  double align_sum = 0, kmer_sum = 0, ident_sum = 0;
  for (std::int64_t p = 0; p < pairs; ++p) {
    const auto& a = train[rng.below(train.size())];
    const auto& b = test[rng.below(test.size())];
    align_sum += normalized_alignment_percent(a.bases, b.bases, scoring);
    ident_sum += sequence_identity(a.bases, b.bases, scoring);
    if (a.length() >= static_cast<std::size_t>(k) && b.length() >= static_cast<std::size_t>(k)) {
      const auto pa = kmer_profile(a.bases, k);
      const auto pb = kmer_profile(b.bases, k);
      if (pa.total > 0 && pb.total > 0) {
        kmer_sum += kmer_similarity(pa, pb);
        ++stats.kmer_pairs;
      }
    }
  }
  stats.pairs = pairs;
  stats.alignment_percent = align_sum / static_cast<double>(pairs);
  stats.identity_percent = ident_sum / static_cast<double>(pairs);
  stats.kmer_percent = stats.kmer_pairs > 0 ? kmer_sum / static_cast<double>(stats.kmer_pairs) : 0.0;
  return stats;
}

DiagnosticsReport run_diagnostics(const std::vector<SequenceRecord>& train,
                                  const std::vector<SequenceRecord>& test, DiagMode mode,
                                  std::int64_t pairs, std::uint64_t seed, std::size_t seq_len) {
  auto prepare = [&](const std::vector<SequenceRecord>& recs) {
    std::vector<CleanSequence> out;
    out.reserve(recs.size());
    for (const auto& r : recs) {
      CleanSequence clean = normalize_alphabet(r.sequence);
      out.push_back(mode == DiagMode::preprocessed ? resize(clean, seq_len) : std::move(clean));
    }
    return out;
  };
  const auto train_clean = prepare(train);
  const auto test_clean = prepare(test);

  DiagnosticsReport rep;
  rep.mode = mode;
  rep.requested_pairs = pairs;
  rep.seed = seed;
  rep.similarity = dataset_similarity(train_clean, test_clean, pairs, seed);
  rep.train_counts = nucleotide_counts(train_clean);
  rep.test_counts = nucleotide_counts(test_clean);

  // Expected distribution = training proportions applied to the test total.
  const double train_total =
      rep.train_counts[0] + rep.train_counts[1] + rep.train_counts[2] + rep.train_counts[3] +
      rep.train_counts[4];
  std::vector<double> expected(5), observed(5);
  for (std::size_t i = 0; i < 5; ++i) {
    expected[i] = rep.train_counts[i] / train_total;
    observed[i] = rep.test_counts[i];
  }
  rep.chi2 = chi_squared_gof(observed, expected);
  return rep;
}

std::string similarity_csv(const std::vector<DiagnosticsReport>& reports) {
  std::ostringstream out;
  out << "comparison_step,sequence_alignment_percent,kmer_frequency_percent,"
         "sequence_identity_percent,pairs,seed\n";
  char buf[64];
  for (const auto& r : reports) {
    out << diag_mode_name(r.mode);
    std::snprintf(buf, sizeof(buf), ",%.2f", r.similarity.alignment_percent);
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.2f", r.similarity.kmer_percent);
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.2f", r.similarity.identity_percent);
    out << buf;
    out << ',' << r.similarity.pairs << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string chi2_csv(const std::vector<DiagnosticsReport>& reports) {
  std::ostringstream out;
  out << "comparison_step,chi_squared_statistic,degrees_of_freedom,p_value\n";
  char buf[64];
  for (const auto& r : reports) {
    out << diag_mode_name(r.mode);
    std::snprintf(buf, sizeof(buf), ",%.2f,%d,%.6e", r.chi2.statistic, r.chi2.df, r.chi2.p_value);
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace vhp
