// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/preprocess.hpp"

#include <cctype>
#include <numeric>

namespace vhp {

CleanSequence normalize_alphabet(std::string_view raw) {
  if (raw.empty()) throw ParseError("normalize_alphabet: empty sequence");
  CleanSequence out;
  out.bases.reserve(raw.size());
  for (char c : raw) {
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out.bases.push_back(base_channel(u) >= 0 ? u : 'N');
  }
  return out;
}

CleanSequence resize(const CleanSequence& seq, std::size_t target_len) {
  if (seq.bases.empty()) throw ParseError("resize: empty sequence");
  if (target_len < 1) throw ConfigError("resize: target_len must be at least 1");
  CleanSequence out;
  if (seq.length() >= target_len) {
    out.bases = seq.bases.substr(0, target_len);
    return out;
  }
  out.bases.reserve(target_len);
  while (out.bases.size() < target_len) {
    const std::size_t take = std::min(seq.length(), target_len - out.bases.size());
    out.bases.append(seq.bases, 0, take);
  }
  return out;
}

Eigen::MatrixXd one_hot(const CleanSequence& seq) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(seq.length()), kAlphabetSize);
  for (std::size_t i = 0; i < seq.length(); ++i) {
    const int c = base_channel(seq.bases[i]);
    if (c < 0)
      throw ParseError(std::string("one_hot: character '") + seq.bases[i] +
                       "' outside normalized alphabet");
    m(static_cast<Eigen::Index>(i), c) = 1.0;
  }
  return m;
}

std::vector<double> class_weights(const std::vector<std::size_t>& counts) {
  if (counts.empty()) throw ConfigError("class_weights: no classes");
  const auto total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<double> w(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0)
      throw ConfigError("class_weights: class " + std::to_string(j) + " has zero samples");
    w[j] = static_cast<double>(total) /
           (static_cast<double>(counts.size()) * static_cast<double>(counts[j]));
  }
  return w;
}

void encode_into(const CleanSequence& resized, int row, int batch, Eigen::MatrixXf& inputs) {
  for (std::size_t t = 0; t < resized.length(); ++t) {
    const int c = base_channel(resized.bases[t]);
    if (c < 0)
      throw ParseError(std::string("encode_into: character '") + resized.bases[t] +
                       "' outside normalized alphabet");
    inputs(static_cast<Eigen::Index>(t) * batch + row, c) = 1.0f;
  }
}

EncodedBatch encode_batch(const std::vector<SequenceRecord>& records,
                          const LabelMap& labels, std::size_t target_len) {
  EncodedBatch batch;
  batch.batch = static_cast<int>(records.size());
  batch.len = static_cast<int>(target_len);
  batch.inputs = Eigen::MatrixXf::Zero(
      static_cast<Eigen::Index>(records.size()) * static_cast<Eigen::Index>(target_len),
      kAlphabetSize);
  batch.labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!labels.contains(records[i].host))
      throw ConfigError("encode_batch: host '" + records[i].host + "' not in label map");
    batch.labels.push_back(labels.index_of(records[i].host));
    const CleanSequence clean = resize(normalize_alphabet(records[i].sequence), target_len);
    encode_into(clean, static_cast<int>(i), batch.batch, batch.inputs);
  }
  return batch;
}

}  // namespace vhp
