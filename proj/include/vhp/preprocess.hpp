// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vhp/records.hpp"

namespace vhp {

inline constexpr int kAlphabetSize = 5;  // channels A, C, G, T, N in this order
inline constexpr std::size_t kDefaultSeqLen = 400;

// Sequence over exactly {A, C, G, T, N}.
struct CleanSequence {
  std::string bases;
  std::size_t length() const { return bases.size(); }
};

// Channel index for a normalized base; -1 for anything else.
inline int base_channel(char c) {
  switch (c) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    case 'N': return 4;
    default: return -1;
  }
}

// Uppercase and replace every character outside {A,C,G,T,N} with N.
// Empty input is an error.
CleanSequence normalize_alphabet(std::string_view raw);

// Fix the length: truncate to the first target_len bases, or repeat the
// sequence cyclically until it reaches target_len.
CleanSequence resize(const CleanSequence& seq, std::size_t target_len = kDefaultSeqLen);

// L x 5 one-hot matrix, row i encodes base i. Throws on characters outside
// the normalized alphabet.
Eigen::MatrixXd one_hot(const CleanSequence& seq);

// Per-class loss weights: w_j = total / (num_classes * count_j).
// Every count must be >= 1.
std::vector<double> class_weights(const std::vector<std::size_t>& counts);

// Batch of one-hot inputs in the layout the network consumes: inputs has
// B*L rows and 5 columns, where row t*B + i holds timestep t of batch
// element i. at(b, t, c) gives the logical B x L x 5 view.
struct EncodedBatch {
  Eigen::MatrixXf inputs;
  std::vector<int> labels;
  int batch = 0;
  int len = 0;

  float at(int b, int t, int c) const { return inputs(static_cast<Eigen::Index>(t) * batch + b, c); }
};

// Write one normalized+resized sequence into rows {t*batch + row : t} of a
// preallocated (batch*len) x 5 matrix that has been zeroed.
void encode_into(const CleanSequence& resized, int row, int batch, Eigen::MatrixXf& inputs);

// normalize -> resize -> one-hot for every record; labels from the map.
// Unknown hosts raise ConfigError naming the host.
EncodedBatch encode_batch(const std::vector<SequenceRecord>& records,
                          const LabelMap& labels,
                          std::size_t target_len = kDefaultSeqLen);

}  // namespace vhp
