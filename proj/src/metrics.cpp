// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "vhp/csv.hpp"

namespace vhp {

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions,
                          int num_classes) {
  if (labels.size() != predictions.size())
    throw ConfigError("confusion: labels and predictions differ in length");
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int t = labels[i], p = predictions[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes)
      throw ConfigError("confusion: value out of range at sample " + std::to_string(i));
    ++cm.counts(t, p);
  }
  return cm;
}

PerClassPrf precision_recall_f1(const ConfusionMatrix& cm) {
  const int C = static_cast<int>(cm.counts.rows());
  PerClassPrf r;
  r.precision.resize(C);
  r.recall.resize(C);
  r.f1.resize(C);
  for (int c = 0; c < C; ++c) {
    const double tp = cm.counts(c, c);
    const double col = cm.counts.col(c).sum();
    const double row = cm.counts.row(c).sum();
    r.precision[c] = col > 0 ? tp / col : 0.0;
    r.recall[c] = row > 0 ? tp / row : 0.0;
    const double pr = r.precision[c] + r.recall[c];
    r.f1[c] = pr > 0 ? 2.0 * r.precision[c] * r.recall[c] / pr : 0.0;
  }
  return r;
}

double accuracy_from(const ConfusionMatrix& cm) {
  const long long total = cm.total();
  return total > 0 ? static_cast<double>(cm.counts.trace()) / static_cast<double>(total) : 0.0;
}

double micro_average_auc(const std::vector<int>& labels, const Eigen::MatrixXd& probs) {
  const auto B = probs.rows();
  const auto C = probs.cols();
  if (static_cast<Eigen::Index>(labels.size()) != B)
    throw ConfigError("micro_average_auc: labels length mismatch");
  if (C < 2) throw ConfigError("micro_average_auc: needs at least two classes");
  for (Eigen::Index i = 0; i < B; ++i)
    if (std::abs(probs.row(i).sum() - 1.0) > 1e-6)
      throw ConfigError("micro_average_auc: probability row " + std::to_string(i) +
                        " does not sum to 1");

  // Flattened one-vs-rest pairs: exactly B positives, B*(C-1) negatives.
  struct Pair {
    double score;
    bool positive;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(B * C));
  for (Eigen::Index i = 0; i < B; ++i)
    for (Eigen::Index c = 0; c < C; ++c)
      pairs.push_back({probs(i, c), labels[i] == static_cast<int>(c)});

  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.score < b.score; });

  // Rank sum of positives with average ranks over tie groups.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < pairs.size()) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j].score == pairs[i].score) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (pairs[k].positive) rank_sum_pos += avg_rank;
    i = j;
  }
  const double P = static_cast<double>(B);
  const double N = static_cast<double>(B) * static_cast<double>(C - 1);
  return (rank_sum_pos - P * (P + 1.0) / 2.0) / (P * N);
}

MetricsReport compute_report(const std::vector<int>& labels, const std::vector<int>& predictions,
                             const Eigen::MatrixXd& probs,
                             const std::vector<std::string>& class_names) {
  MetricsReport r;
  r.class_names = class_names;
  r.confusion = confusion(labels, predictions, static_cast<int>(class_names.size()));
  r.accuracy = accuracy_from(r.confusion);
  r.prf = precision_recall_f1(r.confusion);
  r.micro_auc = micro_average_auc(labels, probs);
  return r;
}

std::string metrics_report_to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["accuracy"] = r.accuracy;
  j["micro_average_auc"] = r.micro_auc;
  j["classes"] = r.class_names;
  j["precision"] = r.prf.precision;
  j["recall"] = r.prf.recall;
  j["f1"] = r.prf.f1;
  std::vector<std::vector<int>> counts;
  for (Eigen::Index t = 0; t < r.confusion.counts.rows(); ++t) {
    std::vector<int> row;
    for (Eigen::Index p = 0; p < r.confusion.counts.cols(); ++p)
      row.push_back(r.confusion.counts(t, p));
    counts.push_back(std::move(row));
  }
  j["confusion"] = counts;
  return j.dump(2) + "\n";
}

std::string confusion_to_csv(const ConfusionMatrix& cm, const std::vector<std::string>& names,
                             bool normalized) {
  std::ostringstream out;
  out << "true_class";
  for (const auto& n : names) out << ',' << csv_escape(n);
  out << '\n';
  for (Eigen::Index t = 0; t < cm.counts.rows(); ++t) {
    out << csv_escape(names[static_cast<std::size_t>(t)]);
    const double row_sum = cm.counts.row(t).sum();
    for (Eigen::Index p = 0; p < cm.counts.cols(); ++p) {
      if (normalized) {
        const double pct = row_sum > 0 ? 100.0 * cm.counts(t, p) / row_sum : 0.0;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", pct);
        out << ',' << buf;
      } else {
        out << ',' << cm.counts(t, p);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace vhp
