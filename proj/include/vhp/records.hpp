// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vhp {

// Malformed input data (bad FASTA/CSV structure, empty bodies, ...).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller-side misconfiguration (missing column, bad flag combination, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One nucleotide sequence with its host label. `sequence` is raw as parsed
// (uppercased, whitespace stripped) and is normalized later by preprocess.
struct SequenceRecord {
  std::string id;
  std::string sequence;
  std::string host;
};

// Bijection between host label strings and [0, size). Ordering is
// lexicographic by label so the map is stable under input shuffling.
class LabelMap {
 public:
  LabelMap() = default;

  template <typename Records>
  static LabelMap from_records(const Records& records) {
    std::map<std::string, int> seen;
    for (const auto& r : records) seen.emplace(r.host, 0);
    LabelMap m;
    m.labels_.reserve(seen.size());
    for (auto& [host, idx] : seen) {
      idx = static_cast<int>(m.labels_.size());
      m.labels_.push_back(host);
    }
    m.index_ = std::move(seen);
    return m;
  }

  // `labels` must already be sorted and duplicate-free.
  static LabelMap from_labels(std::vector<std::string> labels) {
    LabelMap m;
    m.labels_ = std::move(labels);
    for (std::size_t i = 0; i + 1 < m.labels_.size(); ++i) {
      if (!(m.labels_[i] < m.labels_[i + 1]))
        throw ConfigError("label list is not sorted and unique at '" + m.labels_[i + 1] + "'");
    }
    for (std::size_t i = 0; i < m.labels_.size(); ++i)
      m.index_.emplace(m.labels_[i], static_cast<int>(i));
    return m;
  }

  int index_of(const std::string& host) const {
    auto it = index_.find(host);
    if (it == index_.end()) throw ConfigError("unknown host label: '" + host + "'");
    return it->second;
  }

  bool contains(const std::string& host) const { return index_.count(host) != 0; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
};

}  // namespace vhp
