// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// vhp: viral host prediction from nucleotide sequences.
// Subcommands: prepare, train, evaluate, predict, diagnose.

#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "vhp/commands.hpp"
#include "vhp/version.hpp"

namespace {

void add_format_flags(CLI::App* app, vhp::cli::InputFormat& in) {
  app->add_option("--format", in.format, "Input format: fasta, csv or auto")
      ->check(CLI::IsMember({"fasta", "csv", "auto"}))
      ->capture_default_str();
  app->add_option("--seq-column", in.seq_column, "CSV column holding the sequence")
      ->capture_default_str();
  app->add_option("--host-column", in.host_column, "CSV column holding the host label")
      ->capture_default_str();
  app->add_option("--id-column", in.id_column, "CSV column holding the record id")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viral host prediction toolkit"};
  app.set_version_flag("--version", vhp::kVersion);
  app.require_subcommand(1);

  vhp::cli::PrepareOptions prep;
  auto* prepare = app.add_subcommand(
      "prepare", "Parse corpora, filter rare hosts, write split + label map");
  prepare->add_option("--input", prep.inputs, "Input file(s), FASTA or CSV")->required();
  add_format_flags(prepare, prep.in);
  prepare->add_option("--min-host-count", prep.min_host_count,
                      "Keep hosts with at least this many sequences")
      ->capture_default_str();
  prepare->add_option("--test-fraction", prep.test_fraction, "Held-out test share")
      ->capture_default_str();
  prepare->add_option("--folds", prep.folds, "Cross-validation folds")->capture_default_str();
  prepare->add_option("--seed", prep.seed, "Split seed")->capture_default_str();
  prepare->add_option("--out", prep.out_dir, "Output directory")->required();

  vhp::cli::TrainOptions tr;
  auto* train = app.add_subcommand("train", "Cross-validated training on a prepared dataset");
  train->add_option("--prepared", tr.prepared_dir, "Directory written by prepare")->required();
  train->add_option("--batch-size", tr.batch_size, "")->capture_default_str();
  train->add_option("--epochs", tr.epochs, "")->capture_default_str();
  train->add_flag("--class-weights,!--no-class-weights", tr.class_weights,
                  "Weight the loss by inverse class frequency");
  train->add_option("--seq-len", tr.seq_len, "Input length after resize")->capture_default_str();
  train->add_option("--seed", tr.seed, "Training seed")->capture_default_str();
  train->add_option("--threads", tr.threads, "Parallel fold workers")->capture_default_str();
  train->add_option("--out", tr.out_dir, "Run directory (default: timestamp + seed)");
  train->add_option("--stop-at-val-acc", tr.stop_at_val_acc,
                    "Stop a fold once validation accuracy reaches this (0 = off)")
      ->capture_default_str();
  train->add_option("--early-stop-patience", tr.early_stop_patience,
                    "Stop after this many epochs without improvement (0 = off)")
      ->capture_default_str();
  train->add_flag("--verbose", tr.verbose, "Per-epoch progress on stderr");

  vhp::cli::EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Metric suite on a test corpus");
  evaluate->add_option("--model", ev.model_path, "Checkpoint file")->required();
  evaluate->add_option("--data", ev.data_path, "Test corpus (FASTA/CSV)");
  evaluate->add_option("--prepared", ev.prepared_dir, "Prepared dir; uses its test split");
  add_format_flags(evaluate, ev.in);
  evaluate->add_option("--batch-size", ev.batch_size, "")->capture_default_str();
  evaluate->add_option("--out", ev.out_dir, "Output directory")->required();

  vhp::cli::PredictOptions pr;
  auto* predict = app.add_subcommand("predict", "Per-sequence host probabilities");
  predict->add_option("--model", pr.model_path, "Checkpoint file")->required();
  predict->add_option("--input", pr.input_path, "Sequences to classify")->required();
  add_format_flags(predict, pr.in);
  predict->add_option("--out", pr.out_path, "Output CSV (default: stdout)");
  predict->add_option("--batch-size", pr.batch_size, "")->capture_default_str();

  vhp::cli::DiagnoseOptions di;
  auto* diagnose = app.add_subcommand(
      "diagnose", "Train/test similarity and composition diagnostics");
  diagnose->add_option("--train", di.train_path, "Training corpus");
  diagnose->add_option("--test", di.test_path, "Test corpus");
  diagnose->add_option("--prepared", di.prepared_dir, "Prepared dir; uses its split");
  add_format_flags(diagnose, di.in);
  diagnose->add_option("--pairs", di.pairs, "Sampled sequence pairs")->capture_default_str();
  diagnose->add_option("--seed", di.seed, "Sampling seed")->capture_default_str();
  diagnose->add_option("--mode", di.mode, "raw, preprocessed or both")
      ->check(CLI::IsMember({"raw", "preprocessed", "both"}))
      ->capture_default_str();
  diagnose->add_option("--seq-len", di.seq_len, "Length for preprocessed mode")
      ->capture_default_str();
  diagnose->add_option("--out", di.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (prepare->parsed()) return vhp::cli::cmd_prepare(prep);
    if (train->parsed()) return vhp::cli::cmd_train(tr);
    if (evaluate->parsed()) return vhp::cli::cmd_evaluate(ev);
    if (predict->parsed()) return vhp::cli::cmd_predict(pr);
    if (diagnose->parsed()) return vhp::cli::cmd_diagnose(di);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
