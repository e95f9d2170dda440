// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "vhp/csv.hpp"
#include "vhp/diagnostics.hpp"
#include "vhp/digest.hpp"
#include "vhp/fasta.hpp"
#include "vhp/trainer.hpp"
#include "vhp/version.hpp"

namespace fs = std::filesystem;

namespace vhp::cli {

namespace {

// Removes everything written by a failed command so a nonzero exit never
// leaves partial outputs behind.
class OutputGuard {
 public:
  ~OutputGuard() {
    if (armed_) {
      for (auto it = files_.rbegin(); it != files_.rend(); ++it) {
        std::error_code ec;
        fs::remove(*it, ec);
      }
    }
  }
  void track(const std::string& path) { files_.push_back(path); }
  void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
    track(path);
  }
  void commit() { armed_ = false; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::vector<std::string> files_;
  bool armed_ = true;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Inputs may live under VHP_DATA_DIR when not found relative to the cwd.
std::string resolve_input(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* base = std::getenv("VHP_DATA_DIR")) {
    const fs::path alt = fs::path(base) / path;
    if (fs::exists(alt)) return alt.string();
  }
  throw ConfigError("input path '" + path + "' not found");
}

std::string sniff_format(const std::string& path, const std::string& requested) {
  if (requested != "auto") {
    if (requested != "fasta" && requested != "csv")
      throw ConfigError("unknown input format '" + requested + "'");
    return requested;
  }
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".fa" || ext == ".fasta" || ext == ".fna") return "fasta";
  if (ext == ".csv" || ext == ".tsv") return "csv";
  std::ifstream probe(path);
  char c = 0;
  probe.get(c);
  return c == '>' ? "fasta" : "csv";
}

std::vector<SequenceRecord> load_records(const std::string& raw_path, const InputFormat& in,
                                         bool require_host = true) {
  const std::string path = resolve_input(raw_path);
  const std::string format = sniff_format(path, in.format);
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw ConfigError("cannot open '" + path + "'");
  try {
    if (format == "fasta") return parse_fasta(stream, require_host);
    if (require_host) return parse_csv(stream, in.seq_column, in.host_column, in.id_column);
    // Prediction inputs may have no host column; synthesize empty hosts.
    std::stringstream buffered;
    buffered << stream.rdbuf();
    std::istringstream first_pass(buffered.str());
    const auto rows = read_csv_rows(first_pass);
    if (!rows.empty() &&
        std::find(rows[0].begin(), rows[0].end(), in.host_column) == rows[0].end()) {
      std::vector<SequenceRecord> recs;
      std::istringstream again(buffered.str());
      const auto all = read_csv_rows(again);
      const auto& header = all[0];
      const auto seq_it = std::find(header.begin(), header.end(), in.seq_column);
      const auto id_it = std::find(header.begin(), header.end(), in.id_column);
      if (seq_it == header.end() || id_it == header.end())
        throw ConfigError("CSV header lacks required column '" +
                          (seq_it == header.end() ? in.seq_column : in.id_column) + "'");
      for (std::size_t r = 1; r < all.size(); ++r) {
        if (all[r].size() != header.size())
          throw ParseError("CSV row " + std::to_string(r + 1) + ": wrong field count");
        SequenceRecord rec;
        rec.id = all[r][static_cast<std::size_t>(id_it - header.begin())];
        for (char c : all[r][static_cast<std::size_t>(seq_it - header.begin())])
          if (!std::isspace(static_cast<unsigned char>(c)))
            rec.sequence.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        recs.push_back(std::move(rec));
      }
      return recs;
    }
    std::istringstream replay(buffered.str());
    return parse_csv(replay, in.seq_column, in.host_column, in.id_column);
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string records_csv(const std::vector<SequenceRecord>& records) {
  std::ostringstream out;
  out << "id,sequence,host\n";
  for (const auto& r : records)
    out << csv_escape(r.id) << ',' << csv_escape(r.sequence) << ',' << csv_escape(r.host) << '\n';
  return out.str();
}

std::string labels_json(const LabelMap& labels) {
  nlohmann::json j;
  j["labels"] = labels.labels();
  return j.dump(2) + "\n";
}

// Run manifests are append-only: a fresh file per run.
std::string next_manifest_path(const std::string& dir) {
  fs::path base = fs::path(dir) / "manifest.json";
  if (!fs::exists(base)) return base.string();
  for (int k = 2;; ++k) {
    fs::path alt = fs::path(dir) / ("manifest." + std::to_string(k) + ".json");
    if (!fs::exists(alt)) return alt.string();
  }
}

void write_manifest(OutputGuard& guard, const std::string& out_dir, const std::string& subcommand,
                    const nlohmann::json& config, const std::vector<std::string>& input_paths,
                    double seconds) {
  nlohmann::json j;
  j["toolkit_version"] = kVersion;
  j["subcommand"] = subcommand;
  j["config"] = config;
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& p : input_paths)
    inputs.push_back({{"path", p}, {"sha256", sha256_file_hex(p)}});
  j["inputs"] = inputs;
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : guard.files()) outputs.push_back(p);
  j["outputs"] = outputs;
  j["wall_seconds"] = seconds;
  guard.write_text(next_manifest_path(out_dir), j.dump(2) + "\n");
}

struct PreparedInputs {
  std::vector<SequenceRecord> records;
  SplitPlan plan;
  LabelMap labels;
};

PreparedInputs load_prepared(const std::string& dir) {
  const fs::path base(dir);
  std::ifstream rec_in(base / "records.csv", std::ios::binary);
  if (!rec_in) throw ConfigError("prepared dir '" + dir + "' is missing records.csv");
  PreparedInputs p;
  p.records = parse_csv(rec_in, "sequence", "host", "id");

  std::ifstream split_in(base / "split.json");
  if (!split_in) throw ConfigError("prepared dir '" + dir + "' is missing split.json");
  std::stringstream split_text;
  split_text << split_in.rdbuf();
  p.plan = split_plan_from_json(split_text.str());

  std::ifstream labels_in(base / "labels.json");
  if (!labels_in) throw ConfigError("prepared dir '" + dir + "' is missing labels.json");
  nlohmann::json lj;
  labels_in >> lj;
  p.labels = LabelMap::from_labels(lj.at("labels").get<std::vector<std::string>>());
  return p;
}

std::vector<SequenceRecord> select_by_ids(const std::vector<SequenceRecord>& records,
                                          const std::vector<std::string>& ids) {
  std::map<std::string, const SequenceRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::vector<SequenceRecord> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ConfigError("split references unknown id '" + id + "'");
    out.push_back(*it->second);
  }
  return out;
}

std::string timestamp_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

nlohmann::json input_format_json(const InputFormat& in) {
  return {{"format", in.format},
          {"seq_column", in.seq_column},
          {"host_column", in.host_column},
          {"id_column", in.id_column}};
}

}  // namespace

int cmd_prepare(const PrepareOptions& opt) {
  Stopwatch watch;
  if (opt.inputs.empty()) throw ConfigError("prepare: at least one --input is required");
  if (opt.out_dir.empty()) throw ConfigError("prepare: --out is required");

  std::vector<SequenceRecord> records;
  std::vector<std::string> resolved;
  for (const auto& path : opt.inputs) {
    auto part = load_records(path, opt.in);
    resolved.push_back(resolve_input(path));
    records.insert(records.end(), part.begin(), part.end());
  }

  const auto kept = filter_hosts(records, static_cast<std::size_t>(opt.min_host_count));
  if (kept.empty())
    throw ConfigError("prepare: no hosts with at least " + std::to_string(opt.min_host_count) +
                      " sequences");
  const auto labels = LabelMap::from_records(kept);
  const auto plan = make_split(kept, opt.test_fraction, opt.folds, opt.seed);

  std::map<std::string, int> counts;
  for (const auto& r : kept) ++counts[r.host];
  std::printf("%-40s %8s\n", "host", "count");
  for (const auto& [host, n] : counts) std::printf("%-40s %8d\n", host.c_str(), n);
  std::printf("%zu records kept (%zu dropped), %zu classes, %zu train / %zu test\n",
              kept.size(), records.size() - kept.size(), labels.size(), plan.train_ids.size(),
              plan.test_ids.size());

  fs::create_directories(opt.out_dir);
  OutputGuard guard;
  const fs::path base(opt.out_dir);
  guard.write_text((base / "records.csv").string(), records_csv(kept));
  guard.write_text((base / "split.json").string(), split_plan_to_json(plan));
  guard.write_text((base / "labels.json").string(), labels_json(labels));

  nlohmann::json config{{"inputs", opt.inputs},
                        {"input_format", input_format_json(opt.in)},
                        {"min_host_count", opt.min_host_count},
                        {"test_fraction", opt.test_fraction},
                        {"folds", opt.folds},
                        {"seed", opt.seed},
                        {"out_dir", opt.out_dir}};
  write_manifest(guard, opt.out_dir, "prepare", config, resolved, watch.seconds());
  guard.commit();
  return 0;
}

int cmd_train(const TrainOptions& opt) {
  Stopwatch watch;
  if (opt.prepared_dir.empty()) throw ConfigError("train: --prepared is required");
  const auto prepared = load_prepared(opt.prepared_dir);

  TrainConfig cfg;
  cfg.batch_size = opt.batch_size;
  cfg.epochs = opt.epochs;
  cfg.folds = static_cast<int>(prepared.plan.folds.size());
  cfg.use_class_weights = opt.class_weights;
  cfg.seed = opt.seed;
  cfg.model.seq_len = opt.seq_len;
  cfg.model.num_classes = static_cast<int>(prepared.labels.size());
  cfg.stop_at_val_acc = opt.stop_at_val_acc;
  cfg.early_stop_patience = opt.early_stop_patience;
  cfg.verbose = opt.verbose;
  cfg.validate();

  const std::string out_dir =
      opt.out_dir.empty()
          ? (fs::path(opt.prepared_dir) / ("run-" + timestamp_now() + "-seed" +
                                           std::to_string(opt.seed))).string()
          : opt.out_dir;
  fs::create_directories(out_dir);

  const auto data = prepare_dataset(prepared.records, prepared.labels,
                                    static_cast<std::size_t>(opt.seq_len));
  const auto folds_idx = fold_indices_from_plan(prepared.records, prepared.plan);

  OutputGuard guard;
  const CvResult cv = run_cv(data, folds_idx, cfg, out_dir, opt.threads);
  for (const auto& fold : cv.folds) {
    guard.track(fold.checkpoint_path);
    guard.track((fs::path(out_dir) / ("fold" + std::to_string(fold.fold_index) + "_curves.csv"))
                    .string());
  }
  guard.track(cv.selected_path);

  std::ostringstream summary;
  summary << "fold,best_val_acc,best_epoch,epochs_run,selected\n";
  for (const auto& fold : cv.folds) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%d,%zu,%d\n", fold.fold_index, fold.best_val_acc,
                  fold.best_epoch, fold.curve.size(),
                  fold.fold_index == cv.selected_fold ? 1 : 0);
    summary << buf;
  }
  guard.write_text((fs::path(out_dir) / "cv_summary.csv").string(), summary.str());

  double mean = 0, sq = 0;
  for (const auto& fold : cv.folds) mean += fold.best_val_acc;
  mean /= static_cast<double>(cv.folds.size());
  for (const auto& fold : cv.folds)
    sq += (fold.best_val_acc - mean) * (fold.best_val_acc - mean);
  const double stdev = std::sqrt(sq / static_cast<double>(cv.folds.size()));
  std::printf("cross-validation accuracy %.4f +- %.4f; selected fold %d (%.4f)\n", mean, stdev,
              cv.selected_fold, cv.folds[static_cast<std::size_t>(cv.selected_fold)].best_val_acc);
  std::printf("best model: %s\n", cv.selected_path.c_str());

  nlohmann::json config{{"prepared_dir", opt.prepared_dir},
                        {"batch_size", opt.batch_size},
                        {"epochs", opt.epochs},
                        {"folds", cfg.folds},
                        {"class_weights", opt.class_weights},
                        {"seq_len", opt.seq_len},
                        {"seed", opt.seed},
                        {"threads", opt.threads},
                        {"stop_at_val_acc", opt.stop_at_val_acc},
                        {"early_stop_patience", opt.early_stop_patience},
                        {"optimizer", {{"name", "adam"}, {"lr", 1e-3}, {"beta1", 0.9},
                                       {"beta2", 0.999}, {"epsilon", 1e-7}}},
                        {"out_dir", out_dir}};
  const std::vector<std::string> inputs = {
      (fs::path(opt.prepared_dir) / "records.csv").string(),
      (fs::path(opt.prepared_dir) / "split.json").string(),
      (fs::path(opt.prepared_dir) / "labels.json").string()};
  write_manifest(guard, out_dir, "train", config, inputs, watch.seconds());
  guard.commit();
  return 0;
}

int cmd_evaluate(const EvaluateOptions& opt) {
  Stopwatch watch;
  if (opt.model_path.empty()) throw ConfigError("evaluate: --model is required");
  if (opt.out_dir.empty()) throw ConfigError("evaluate: --out is required");
  const auto ckpt = net::load_checkpoint(resolve_input(opt.model_path));

  std::vector<SequenceRecord> test;
  std::vector<std::string> inputs = {resolve_input(opt.model_path)};
  if (!opt.data_path.empty()) {
    test = load_records(opt.data_path, opt.in);
    inputs.push_back(resolve_input(opt.data_path));
  } else if (!opt.prepared_dir.empty()) {
    const auto prepared = load_prepared(opt.prepared_dir);
    if (prepared.labels.labels() != ckpt.labels.labels())
      throw ConfigError("evaluate: label map in '" + opt.prepared_dir +
                        "' does not match the checkpoint");
    test = select_by_ids(prepared.records, prepared.plan.test_ids);
    inputs.push_back((fs::path(opt.prepared_dir) / "records.csv").string());
  } else {
    throw ConfigError("evaluate: either --data or --prepared is required");
  }

  const MetricsReport report = evaluate(ckpt, test, opt.batch_size);
  std::printf("accuracy %.4f  micro-average AUC %.4f  (%zu sequences, %zu classes)\n",
              report.accuracy, report.micro_auc, test.size(), report.class_names.size());

  fs::create_directories(opt.out_dir);
  OutputGuard guard;
  const fs::path base(opt.out_dir);
  guard.write_text((base / "report.json").string(), metrics_report_to_json(report));
  guard.write_text((base / "confusion.csv").string(),
                   confusion_to_csv(report.confusion, report.class_names, false));
  guard.write_text((base / "confusion_normalized.csv").string(),
                   confusion_to_csv(report.confusion, report.class_names, true));

  nlohmann::json config{{"model", opt.model_path},
                        {"data", opt.data_path},
                        {"prepared_dir", opt.prepared_dir},
                        {"input_format", input_format_json(opt.in)},
                        {"batch_size", opt.batch_size},
                        {"out_dir", opt.out_dir}};
  write_manifest(guard, opt.out_dir, "evaluate", config, inputs, watch.seconds());
  guard.commit();
  return 0;
}

int cmd_predict(const PredictOptions& opt) {
  Stopwatch watch;
  if (opt.model_path.empty()) throw ConfigError("predict: --model is required");
  if (opt.input_path.empty()) throw ConfigError("predict: --input is required");
  const auto ckpt = net::load_checkpoint(resolve_input(opt.model_path));
  const auto records = load_records(opt.input_path, opt.in, /*require_host=*/false);
  if (records.empty()) throw ConfigError("predict: no input sequences");

  std::vector<CleanSequence> seqs;
  seqs.reserve(records.size());
  for (const auto& r : records)
    seqs.push_back(resize(normalize_alphabet(r.sequence),
                          static_cast<std::size_t>(ckpt.config.seq_len)));
  const Eigen::MatrixXf probs = predict(ckpt.params, ckpt.config, seqs, opt.batch_size);
  const auto preds = argmax_rows(probs);

  std::ostringstream out;
  out << "id,predicted_host";
  for (const auto& name : ckpt.labels.labels()) out << ',' << csv_escape("p_" + name);
  out << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << csv_escape(records[i].id) << ','
        << csv_escape(ckpt.labels.labels()[static_cast<std::size_t>(preds[i])]);
    char buf[32];
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), ",%.6f", static_cast<double>(probs(static_cast<Eigen::Index>(i), c)));
      out << buf;
    }
    out << '\n';
  }

  if (opt.out_path.empty()) {
    std::cout << out.str();
    return 0;
  }
  if (const fs::path parent = fs::path(opt.out_path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  OutputGuard guard;
  guard.write_text(opt.out_path, out.str());
  const std::string manifest_dir =
      fs::path(opt.out_path).parent_path().empty() ? "." : fs::path(opt.out_path).parent_path().string();
  nlohmann::json config{{"model", opt.model_path},
                        {"input", opt.input_path},
                        {"input_format", input_format_json(opt.in)},
                        {"batch_size", opt.batch_size},
                        {"out", opt.out_path}};
  write_manifest(guard, manifest_dir, "predict", config,
                 {resolve_input(opt.model_path), resolve_input(opt.input_path)}, watch.seconds());
  guard.commit();
  return 0;
}

int cmd_diagnose(const DiagnoseOptions& opt) {
  Stopwatch watch;
  if (opt.out_dir.empty()) throw ConfigError("diagnose: --out is required");
  if (opt.mode != "raw" && opt.mode != "preprocessed" && opt.mode != "both")
    throw ConfigError("diagnose: --mode must be raw, preprocessed or both");

  std::vector<SequenceRecord> train, test;
  std::vector<std::string> inputs;
  if (!opt.prepared_dir.empty()) {
    const auto prepared = load_prepared(opt.prepared_dir);
    train = select_by_ids(prepared.records, prepared.plan.train_ids);
    test = select_by_ids(prepared.records, prepared.plan.test_ids);
    inputs.push_back((fs::path(opt.prepared_dir) / "records.csv").string());
    inputs.push_back((fs::path(opt.prepared_dir) / "split.json").string());
  } else {
    if (opt.train_path.empty() || opt.test_path.empty())
      throw ConfigError("diagnose: need --train and --test, or --prepared");
    train = load_records(opt.train_path, opt.in);
    test = load_records(opt.test_path, opt.in);
    inputs.push_back(resolve_input(opt.train_path));
    inputs.push_back(resolve_input(opt.test_path));
  }

  std::vector<DiagnosticsReport> reports;
  if (opt.mode == "raw" || opt.mode == "both")
    reports.push_back(run_diagnostics(train, test, DiagMode::raw, opt.pairs, opt.seed,
                                      static_cast<std::size_t>(opt.seq_len)));
  if (opt.mode == "preprocessed" || opt.mode == "both")
    reports.push_back(run_diagnostics(train, test, DiagMode::preprocessed, opt.pairs, opt.seed,
                                      static_cast<std::size_t>(opt.seq_len)));

  std::fputs(similarity_csv(reports).c_str(), stdout);
  std::fputs(chi2_csv(reports).c_str(), stdout);

  fs::create_directories(opt.out_dir);
  OutputGuard guard;
  const fs::path base(opt.out_dir);
  guard.write_text((base / "similarity.csv").string(), similarity_csv(reports));
  guard.write_text((base / "chi2.csv").string(), chi2_csv(reports));

  nlohmann::json config{{"train", opt.train_path},     {"test", opt.test_path},
                        {"prepared_dir", opt.prepared_dir},
                        {"input_format", input_format_json(opt.in)},
                        {"pairs", opt.pairs},          {"seed", opt.seed},
                        {"mode", opt.mode},            {"seq_len", opt.seq_len},
                        {"out_dir", opt.out_dir}};
  write_manifest(guard, opt.out_dir, "diagnose", config, inputs, watch.seconds());
  guard.commit();
  return 0;
}

}  // namespace vhp::cli
