// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vhp/records.hpp"

namespace vhp {

// Deterministic train/test split plus cross-validation fold assignment,
// stratified by host class. Stored by record id.
struct SplitPlan {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::vector<std::string>> folds;  // validation id lists, partition train_ids
  std::uint64_t seed = 0;
};

// Keep only records whose host occurs at least `min_count` times in the
// input. Relative order is preserved; empty output is permitted.
std::vector<SequenceRecord> filter_hosts(const std::vector<SequenceRecord>& records,
                                         std::size_t min_count = 100);

// Stratified split: per class, round(test_fraction * n) records go to test;
// the rest are assigned to folds round-robin after a seeded shuffle. Every
// class needs at least folds + 1 records. Duplicate ids are rejected.
SplitPlan make_split(const std::vector<SequenceRecord>& records,
                     double test_fraction = 0.20, int folds = 5,
                     std::uint64_t seed = 0);

std::string split_plan_to_json(const SplitPlan& plan);
SplitPlan split_plan_from_json(const std::string& text);

}  // namespace vhp
