// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vhp/records.hpp"

namespace vhp::net {

// Network shape: BiLSTM(hidden per direction) -> Dropout -> BatchNorm ->
// Dense(dense_units, ReLU) -> Dense(num_classes, softmax).
struct ModelConfig {
  int seq_len = 400;
  int input_dim = 5;
  int hidden = 128;  // per direction
  int dense_units = 64;
  int num_classes = 0;
  double dropout_rate = 0.2;

  int bn_width() const { return 2 * hidden; }

  void validate() const {
    if (seq_len < 1 || input_dim < 1 || hidden < 1 || dense_units < 1 || num_classes < 2)
      throw ConfigError("ModelConfig: all dimensions must be positive and num_classes >= 2");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
      throw ConfigError("ModelConfig: dropout_rate must lie in [0, 1)");
  }
};

struct ParamCount {
  long long total = 0;
  long long trainable = 0;
  long long non_trainable = 0;
};

// Exact parameter bookkeeping. Per direction the LSTM holds 4*(D+H+1)*H
// weights; batch norm has 2*2H trainable plus 2*2H running stats; the two
// dense layers contribute (2H+1)*dense and (dense+1)*classes.
inline ParamCount count_params(const ModelConfig& c) {
  const long long D = c.input_dim, H = c.hidden, U = c.dense_units, C = c.num_classes;
  const long long W = 2 * H;
  ParamCount n;
  n.trainable = 2 * (4 * (D + H + 1) * H) + 2 * W + (W * U + U) + (U * C + C);
  n.non_trainable = 2 * W;
  n.total = n.trainable + n.non_trainable;
  return n;
}

}  // namespace vhp::net
