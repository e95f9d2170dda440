// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vhp::cli {

// Shared input options: format is fasta | csv | auto (sniffed from the
// extension, then the first byte); the column names apply to CSV inputs.
struct InputFormat {
  std::string format = "auto";
  std::string seq_column = "sequence";
  std::string host_column = "host";
  std::string id_column = "id";
};

struct PrepareOptions {
  std::vector<std::string> inputs;
  InputFormat in;
  int min_host_count = 100;
  double test_fraction = 0.20;
  int folds = 5;
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct TrainOptions {
  std::string prepared_dir;
  int batch_size = 128;
  int epochs = 200;
  bool class_weights = false;
  int seq_len = 400;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir;  // default: <prepared_dir>/run-<timestamp>-seed<seed>
  double stop_at_val_acc = 0.0;
  int early_stop_patience = 0;
  bool verbose = false;
};

struct EvaluateOptions {
  std::string model_path;
  std::string data_path;      // explicit test corpus ...
  std::string prepared_dir;   // ... or a prepared dir (uses its test split)
  InputFormat in;
  int batch_size = 128;
  std::string out_dir;
};

struct PredictOptions {
  std::string model_path;
  std::string input_path;
  InputFormat in;
  std::string out_path;  // empty = stdout
  int batch_size = 128;
};

struct DiagnoseOptions {
  std::string train_path, test_path;  // explicit corpora ...
  std::string prepared_dir;           // ... or a prepared dir's split
  InputFormat in;
  std::int64_t pairs = 1000;
  std::uint64_t seed = 1;
  std::string mode = "both";  // raw | preprocessed | both
  int seq_len = 400;
  std::string out_dir;
};

// Each command returns 0 on success and throws on failure; partially written
// outputs are removed before the exception propagates.
int cmd_prepare(const PrepareOptions& opt);
int cmd_train(const TrainOptions& opt);
int cmd_evaluate(const EvaluateOptions& opt);
int cmd_predict(const PredictOptions& opt);
int cmd_diagnose(const DiagnoseOptions& opt);

}  // namespace vhp::cli
