// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/split.hpp"

#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "vhp/prng.hpp"

namespace vhp {

std::vector<SequenceRecord> filter_hosts(const std::vector<SequenceRecord>& records,
                                         std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) ++counts[r.host];
  std::vector<SequenceRecord> kept;
  for (const auto& r : records)
    if (counts[r.host] >= min_count) kept.push_back(r);
  return kept;
}

SplitPlan make_split(const std::vector<SequenceRecord>& records,
                     double test_fraction, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("make_split: folds must be at least 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("make_split: test_fraction must lie in (0, 1)");

  std::set<std::string> seen_ids;
  for (const auto& r : records)
    if (!seen_ids.insert(r.id).second)
      throw ConfigError("make_split: duplicate record id '" + r.id + "'");

  // Group indices per class; lexicographic class order keeps the plan
  // independent of input shuffling up to within-class order.
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_class[records[i].host].push_back(i);

  SplitPlan plan;
  plan.seed = seed;
  plan.folds.resize(static_cast<std::size_t>(folds));
  const Prng split_root = Prng(seed).child(stream::kSplit);

  std::size_t class_index = 0;
  for (auto& [host, idx] : by_class) {
    const std::size_t n = idx.size();
    if (n < static_cast<std::size_t>(folds) + 1)
      throw ConfigError("make_split: class '" + host + "' has " + std::to_string(n) +
                        " records, needs at least " + std::to_string(folds + 1));

    // Per-class child stream so membership does not depend on other classes.
    Prng rng = split_root.child(class_index++);
    rng.shuffle(idx.begin(), idx.end());

    const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n)));
    if (n - n_test < static_cast<std::size_t>(folds))
      throw ConfigError("make_split: class '" + host + "' leaves fewer training records than folds");

    for (std::size_t j = 0; j < n; ++j) {
      const std::string& id = records[idx[j]].id;
      if (j < n_test) {
        plan.test_ids.push_back(id);
      } else {
        plan.train_ids.push_back(id);
        plan.folds[(j - n_test) % static_cast<std::size_t>(folds)].push_back(id);
      }
    }
  }
  return plan;
}

std::string split_plan_to_json(const SplitPlan& plan) {
  nlohmann::json j;
  j["seed"] = plan.seed;
  j["train_ids"] = plan.train_ids;
  j["test_ids"] = plan.test_ids;
  j["folds"] = plan.folds;
  return j.dump(2) + "\n";
}

SplitPlan split_plan_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SplitPlan plan;
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.train_ids = j.at("train_ids").get<std::vector<std::string>>();
  plan.test_ids = j.at("test_ids").get<std::vector<std::string>>();
  plan.folds = j.at("folds").get<std::vector<std::vector<std::string>>>();
  return plan;
}

}  // namespace vhp
