// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "vhp/adam.hpp"
#include "vhp/network.hpp"
#include "vhp/prng.hpp"

namespace vhp {

namespace {

// One-hot a list of dataset rows into the (B*L) x 5 network layout.
Eigen::MatrixXf encode_rows(const PreparedDataset& data, const std::vector<int>& rows,
                            int seq_len) {
  const int B = static_cast<int>(rows.size());
  Eigen::MatrixXf x = Eigen::MatrixXf::Zero(
      static_cast<Eigen::Index>(B) * seq_len, kAlphabetSize);
  for (int i = 0; i < B; ++i) {
    const auto& seq = data.seqs[static_cast<std::size_t>(rows[i])];
    if (seq.length() != static_cast<std::size_t>(seq_len))
      throw ConfigError("trainer: sequence length " + std::to_string(seq.length()) +
                        " does not match configured length " + std::to_string(seq_len));
    encode_into(seq, i, B, x);
  }
  return x;
}

// Batch boundaries; a trailing remainder of 1 is rebalanced to (size-1, 2)
// so batch norm always sees at least two rows.
std::vector<std::pair<int, int>> batch_ranges(int n, int batch_size) {
  std::vector<std::pair<int, int>> ranges;
  for (int start = 0; start < n; start += batch_size)
    ranges.emplace_back(start, std::min(batch_size, n - start));
  if (ranges.size() >= 2 && ranges.back().second == 1) {
    ranges[ranges.size() - 2].second -= 1;
    ranges.back().first -= 1;
    ranges.back().second = 2;
  }
  return ranges;
}

struct EvalResult {
  double loss = 0, acc = 0;
};

EvalResult evaluate_rows(const net::Network<float>& net, const net::ModelParams& params,
                         const PreparedDataset& data, const std::vector<int>& rows,
                         int batch_size) {
  const int n = static_cast<int>(rows.size());
  double loss_sum = 0;
  long long correct = 0;
  for (const auto& [start, len] : batch_ranges(n, batch_size)) {
    const std::vector<int> chunk(rows.begin() + start, rows.begin() + start + len);
    const Eigen::MatrixXf x = encode_rows(data, chunk, net.config().seq_len);
    const Eigen::MatrixXf probs = net.forward_infer(params, x, len);
    for (int i = 0; i < len; ++i) {
      const int label = data.labels[static_cast<std::size_t>(chunk[i])];
      Eigen::Index pred;
      probs.row(i).maxCoeff(&pred);
      if (static_cast<int>(pred) == label) ++correct;
      const float pr = std::max(probs(i, label), static_cast<float>(net::kProbClamp));
      loss_sum -= std::log(static_cast<double>(pr));
    }
  }
  return {loss_sum / n, static_cast<double>(correct) / n};
}

std::vector<double> subset_class_weights(const PreparedDataset& data,
                                         const std::vector<int>& train_idx) {
  std::vector<std::size_t> counts(data.label_map.size(), 0);
  for (int i : train_idx) ++counts[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])];
  return class_weights(counts);
}

}  // namespace

PreparedDataset prepare_dataset(const std::vector<SequenceRecord>& records,
                                const LabelMap& labels, std::size_t seq_len) {
  PreparedDataset out;
  out.label_map = labels;
  out.seqs.reserve(records.size());
  out.labels.reserve(records.size());
  for (const auto& r : records) {
    if (!labels.contains(r.host))
      throw ConfigError("prepare_dataset: host '" + r.host + "' not in label map");
    out.seqs.push_back(resize(normalize_alphabet(r.sequence), seq_len));
    out.labels.push_back(labels.index_of(r.host));
  }
  return out;
}

FoldResult train_fold(const PreparedDataset& data, const std::vector<int>& train_idx,
                      const std::vector<int>& val_idx, const TrainConfig& cfg,
                      int fold_index, const std::string& checkpoint_path) {
  cfg.validate();
  if (train_idx.empty()) throw ConfigError("train_fold: empty training set");
  if (val_idx.empty()) throw ConfigError("train_fold: empty validation set");
  if (static_cast<int>(data.label_map.size()) != cfg.model.num_classes)
    throw ConfigError("train_fold: label map size does not match num_classes");

  const net::Network<float> net(cfg.model);

  // Per-fold seed fan-out: fold master stream -> init / shuffle / dropout.
  const std::uint64_t fold_seed =
      Prng(cfg.seed).child(stream::kFoldBase + static_cast<std::uint64_t>(fold_index)).next();
  net::ModelParams params = net::init_params<float>(cfg.model, fold_seed);
  Prng shuffle_rng = Prng(fold_seed).child(stream::kShuffle);
  Prng dropout_rng = Prng(fold_seed).child(stream::kDropout);

  std::vector<float> weight_of_class(data.label_map.size(), 1.0f);
  if (cfg.use_class_weights) {
    const auto w = subset_class_weights(data, train_idx);
    for (std::size_t j = 0; j < w.size(); ++j) weight_of_class[j] = static_cast<float>(w[j]);
  }

  net::AdamState<float> adam = net::init_adam<float>(cfg.model);
  net::ForwardCache<float> cache;
  net::ModelParams grads = net::zeros_like_params<float>(cfg.model);

  FoldResult result;
  result.fold_index = fold_index;
  result.checkpoint_path = checkpoint_path;
  result.best_val_acc = -1.0;

  std::vector<int> order = train_idx;
  const int n_train = static_cast<int>(order.size());
  int epochs_since_best = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());

    double loss_sum = 0;
    long long correct = 0;
    for (const auto& [start, len] : batch_ranges(n_train, cfg.batch_size)) {
      const std::vector<int> chunk(order.begin() + start, order.begin() + start + len);
      const Eigen::MatrixXf x = encode_rows(data, chunk, cfg.model.seq_len);

      std::vector<int> labels(static_cast<std::size_t>(len));
      std::vector<float> sample_w(static_cast<std::size_t>(len));
      for (int i = 0; i < len; ++i) {
        labels[static_cast<std::size_t>(i)] = data.labels[static_cast<std::size_t>(chunk[i])];
        sample_w[static_cast<std::size_t>(i)] =
            weight_of_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }

      const Eigen::MatrixXf& probs = net.forward_train(params, x, len, dropout_rng, cache);
      const float batch_loss = net.loss(probs, labels, sample_w);
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train_fold: non-finite loss at fold " +
                                 std::to_string(fold_index) + " epoch " + std::to_string(epoch));
      loss_sum += static_cast<double>(batch_loss) * len;
      for (int i = 0; i < len; ++i) {
        Eigen::Index pred;
        probs.row(i).maxCoeff(&pred);
        if (static_cast<int>(pred) == labels[static_cast<std::size_t>(i)]) ++correct;
      }

      net::visit_trainable(grads, [](net::TensorRef<float> r) {
        std::fill(r.data, r.data + r.size, 0.0f);
      });
      net.backward(params, x, cache, labels, sample_w, grads);
      net::adam_step(params, grads, adam);
      net.update_running_stats(params, cache);
    }

    const EvalResult val = evaluate_rows(net, params, data, val_idx, cfg.batch_size);
    EpochPoint pt;
    pt.train_loss = loss_sum / n_train;
    pt.train_acc = static_cast<double>(correct) / n_train;
    pt.val_loss = val.loss;
    pt.val_acc = val.acc;
    result.curve.push_back(pt);

    if (val.acc > result.best_val_acc) {
      result.best_val_acc = val.acc;
      result.best_epoch = epoch;
      epochs_since_best = 0;
      nlohmann::json meta{{"fold", fold_index},
                          {"epoch", epoch},
                          {"val_acc", val.acc},
                          {"seed", cfg.seed},
                          {"fold_seed", fold_seed},
                          {"class_weights", cfg.use_class_weights}};
      save_checkpoint(checkpoint_path, cfg.model, data.label_map, params, meta);
    } else {
      ++epochs_since_best;
    }

    if (cfg.verbose) {
      std::fprintf(stderr, "fold %d epoch %d/%d  train_loss %.4f acc %.4f  val_loss %.4f acc %.4f\n",
                   fold_index, epoch + 1, cfg.epochs, pt.train_loss, pt.train_acc, pt.val_loss,
                   pt.val_acc);
    }
    if (cfg.stop_at_val_acc > 0.0 && result.best_val_acc >= cfg.stop_at_val_acc) break;
    if (cfg.early_stop_patience > 0 && epochs_since_best >= cfg.early_stop_patience) break;
  }
  return result;
}

CvResult run_cv(const PreparedDataset& data,
                const std::vector<std::vector<int>>& fold_val_indices, const TrainConfig& cfg,
                const std::string& out_dir, int threads) {
  cfg.validate();
  if (static_cast<int>(fold_val_indices.size()) != cfg.folds)
    throw ConfigError("run_cv: fold count does not match config");
  std::filesystem::create_directories(out_dir);

  CvResult cv;
  cv.folds.resize(fold_val_indices.size());
  std::vector<std::string> errors(fold_val_indices.size());

  auto run_one = [&](int f) {
    try {
      std::vector<bool> in_val(data.size(), false);
      for (int i : fold_val_indices[static_cast<std::size_t>(f)])
        in_val[static_cast<std::size_t>(i)] = true;
      std::vector<int> train_idx;
      for (const auto& fold : fold_val_indices)
        for (int i : fold)
          if (!in_val[static_cast<std::size_t>(i)]) train_idx.push_back(i);

      const std::string ckpt =
          (std::filesystem::path(out_dir) / ("fold" + std::to_string(f) + "_best.vhpc")).string();
      cv.folds[static_cast<std::size_t>(f)] = train_fold(
          data, train_idx, fold_val_indices[static_cast<std::size_t>(f)], cfg, f, ckpt);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(f)] = "fold " + std::to_string(f) + ": " + e.what();
    }
  };

  if (threads <= 1) {
    for (int f = 0; f < cfg.folds; ++f) run_one(f);
  } else {
    std::vector<std::thread> pool;
    std::mutex next_mutex;
    int next = 0;
    const int workers = std::min(threads, cfg.folds);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        while (true) {
          int f;
          {
            std::lock_guard<std::mutex> lock(next_mutex);
            if (next >= cfg.folds) return;
            f = next++;
          }
          run_one(f);
        }
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error("run_cv: " + err);

  for (int f = 0; f < cfg.folds; ++f) {
    const auto& fold = cv.folds[static_cast<std::size_t>(f)];
    std::ofstream curves(
        (std::filesystem::path(out_dir) / ("fold" + std::to_string(f) + "_curves.csv")).string());
    curves << curves_csv(fold);
    if (cv.selected_fold < 0 ||
        fold.best_val_acc > cv.folds[static_cast<std::size_t>(cv.selected_fold)].best_val_acc)
      cv.selected_fold = f;
  }

  cv.selected_path = (std::filesystem::path(out_dir) / "model_best.vhpc").string();
  std::filesystem::copy_file(cv.folds[static_cast<std::size_t>(cv.selected_fold)].checkpoint_path,
                             cv.selected_path, std::filesystem::copy_options::overwrite_existing);
  return cv;
}

Eigen::MatrixXf predict(const net::ModelParams& params, const net::ModelConfig& cfg,
                        const std::vector<CleanSequence>& seqs, int batch_size) {
  if (seqs.empty()) throw ConfigError("predict: no sequences");
  const net::Network<float> net(cfg);
  Eigen::MatrixXf probs(static_cast<Eigen::Index>(seqs.size()), cfg.num_classes);
  const int n = static_cast<int>(seqs.size());
  for (const auto& [start, len] : batch_ranges(n, batch_size)) {
    Eigen::MatrixXf x =
        Eigen::MatrixXf::Zero(static_cast<Eigen::Index>(len) * cfg.seq_len, kAlphabetSize);
    for (int i = 0; i < len; ++i) {
      const auto& s = seqs[static_cast<std::size_t>(start + i)];
      if (s.length() != static_cast<std::size_t>(cfg.seq_len))
        throw ConfigError("predict: sequence length " + std::to_string(s.length()) +
                          " does not match model length " + std::to_string(cfg.seq_len));
      encode_into(s, i, len, x);
    }
    probs.middleRows(start, len) = net.forward_infer(params, x, len);
  }
  return probs;
}

std::vector<int> argmax_rows(const Eigen::MatrixXf& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index pred;
    probs.row(i).maxCoeff(&pred);
    out[static_cast<std::size_t>(i)] = static_cast<int>(pred);
  }
  return out;
}

MetricsReport evaluate(const net::Checkpoint& ckpt, const std::vector<SequenceRecord>& test,
                       int batch_size) {
  if (test.empty()) throw ConfigError("evaluate: empty test set");
  const PreparedDataset data = prepare_dataset(test, ckpt.labels,
                                               static_cast<std::size_t>(ckpt.config.seq_len));
  const Eigen::MatrixXf probs = predict(ckpt.params, ckpt.config, data.seqs, batch_size);
  return compute_report(data.labels, argmax_rows(probs), probs.cast<double>(),
                        ckpt.labels.labels());
}

std::string curves_csv(const FoldResult& fold) {
  std::ostringstream out;
  out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  char buf[128];
  for (std::size_t e = 0; e < fold.curve.size(); ++e) {
    const auto& p = fold.curve[e];
    std::snprintf(buf, sizeof(buf), "%zu,%.8f,%.6f,%.8f,%.6f\n", e + 1, p.train_loss,
                  p.train_acc, p.val_loss, p.val_acc);
    out << buf;
  }
  return out.str();
}

std::vector<std::vector<int>> fold_indices_from_plan(const std::vector<SequenceRecord>& records,
                                                     const SplitPlan& plan) {
  std::map<std::string, int> index_of;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!index_of.emplace(records[i].id, static_cast<int>(i)).second)
      throw ConfigError("fold_indices_from_plan: duplicate record id '" + records[i].id + "'");
  }
  std::vector<std::vector<int>> folds;
  for (const auto& fold : plan.folds) {
    std::vector<int> idx;
    idx.reserve(fold.size());
    for (const auto& id : fold) {
      const auto it = index_of.find(id);
      if (it == index_of.end())
        throw ConfigError("fold_indices_from_plan: id '" + id + "' not found in records");
      idx.push_back(it->second);
    }
    folds.push_back(std::move(idx));
  }
  return folds;
}

}  // namespace vhp
