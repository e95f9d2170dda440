// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "vhp/records.hpp"

namespace vhp {

// Rows = true class, columns = predicted class.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;
  long long total() const { return counts.sum(); }
};

struct PerClassPrf {
  std::vector<double> precision, recall, f1;
};

struct MetricsReport {
  double accuracy = 0.0;
  double micro_auc = 0.0;
  PerClassPrf prf;
  ConfusionMatrix confusion;
  std::vector<std::string> class_names;
};

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions,
                          int num_classes);

// Zero-denominator convention: precision/recall/F1 are 0 when undefined.
PerClassPrf precision_recall_f1(const ConfusionMatrix& cm);

double accuracy_from(const ConfusionMatrix& cm);

// One-vs-rest flattening over all (sample, class) pairs; AUC is the
// Mann-Whitney statistic with ties counting one half. probs rows must be
// probability vectors (sum 1 within 1e-6).
double micro_average_auc(const std::vector<int>& labels,
                         const Eigen::MatrixXd& probs);

// Assemble the full report from per-sample predictions and probabilities.
MetricsReport compute_report(const std::vector<int>& labels, const std::vector<int>& predictions,
                             const Eigen::MatrixXd& probs, const std::vector<std::string>& class_names);

std::string metrics_report_to_json(const MetricsReport& r);
// Raw counts, or row-normalized percentages when `normalized`.
std::string confusion_to_csv(const ConfusionMatrix& cm, const std::vector<std::string>& names,
                             bool normalized);

}  // namespace vhp
