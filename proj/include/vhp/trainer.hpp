// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vhp/checkpoint.hpp"
#include "vhp/metrics.hpp"
#include "vhp/net_config.hpp"
#include "vhp/preprocess.hpp"
#include "vhp/split.hpp"

namespace vhp {

struct TrainConfig {
  int batch_size = 128;
  int epochs = 200;
  int folds = 5;
  bool use_class_weights = false;
  std::uint64_t seed = 1;
  net::ModelConfig model;

  // Optional stopping rules, both off in the reference protocol.
  double stop_at_val_acc = 0.0;  // stop once validation accuracy reaches this
  int early_stop_patience = 0;   // stop after this many epochs without improvement

  bool verbose = false;

  void validate() const {
    if (batch_size < 2) throw ConfigError("TrainConfig: batch_size must be >= 2");
    if (epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
    if (folds < 2) throw ConfigError("TrainConfig: folds must be >= 2");
    model.validate();
  }
};

struct EpochPoint {
  double train_loss = 0, train_acc = 0, val_loss = 0, val_acc = 0;
};

struct FoldResult {
  int fold_index = 0;
  std::vector<EpochPoint> curve;  // one entry per epoch run
  double best_val_acc = 0.0;
  int best_epoch = -1;
  std::string checkpoint_path;
};

// Records after normalize + resize, ready to one-hot per batch.
struct PreparedDataset {
  std::vector<CleanSequence> seqs;
  std::vector<int> labels;
  LabelMap label_map;
  std::size_t size() const { return seqs.size(); }
};

PreparedDataset prepare_dataset(const std::vector<SequenceRecord>& records,
                                const LabelMap& labels, std::size_t seq_len);

// Train on data[train_idx], validate on data[val_idx] each epoch, checkpoint
// to `checkpoint_path` whenever validation accuracy strictly improves.
// Class weights (Eq. 1 over the training subset) apply when enabled.
FoldResult train_fold(const PreparedDataset& data, const std::vector<int>& train_idx,
                      const std::vector<int>& val_idx, const TrainConfig& cfg,
                      int fold_index, const std::string& checkpoint_path);

struct CvResult {
  std::vector<FoldResult> folds;
  int selected_fold = -1;        // highest validation accuracy across folds
  std::string selected_path;     // copy of the winning checkpoint
};

// One model per fold; fold f validates on fold_val_indices[f] and trains on
// the rest. Writes per-fold curve CSVs and checkpoints under out_dir.
// threads > 1 trains folds concurrently (outputs are identical either way).
CvResult run_cv(const PreparedDataset& data,
                const std::vector<std::vector<int>>& fold_val_indices,
                const TrainConfig& cfg, const std::string& out_dir, int threads = 1);

// Inference-mode probabilities, one row per sequence. Sequences must already
// have length cfg.seq_len.
Eigen::MatrixXf predict(const net::ModelParams& params, const net::ModelConfig& cfg,
                        const std::vector<CleanSequence>& seqs, int batch_size = 128);

std::vector<int> argmax_rows(const Eigen::MatrixXf& probs);

// predict -> confusion -> P/R/F1 -> micro AUC on a test corpus.
MetricsReport evaluate(const net::Checkpoint& ckpt, const std::vector<SequenceRecord>& test,
                       int batch_size = 128);

std::string curves_csv(const FoldResult& fold);

// Map SplitPlan id lists onto indices of `records` (train order preserved).
std::vector<std::vector<int>> fold_indices_from_plan(const std::vector<SequenceRecord>& records,
                                                     const SplitPlan& plan);

}  // namespace vhp
