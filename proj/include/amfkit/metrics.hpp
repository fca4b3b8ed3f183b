/**
 * Copyright 2026 The amfkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amfkit {

struct Confusion {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Predicted AMF iff score >= threshold.
Confusion confusion_matrix(std::span<const double> scores, std::span<const int> hard_labels, double threshold);

double balanced_accuracy(double positive_recall, double negative_recall);

/// Rank-statistic AUC with mid-ranks for ties. Absent when a class is missing.
std::optional<double> auc(std::span<const double> scores, std::span<const int> hard_labels);

/// Metrics for one evaluation set. Metrics that need a class the set lacks
/// stay empty rather than defaulting to a number.
struct FoldReport {
  std::size_t fold = 0;
  std::string held_out_domain;
  std::size_t n = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  Confusion confusion;
  std::optional<double> ba;
  std::optional<double> f1;
  std::optional<double> auc;
  std::optional<double> amf_recall;
  std::optional<double> nmf_recall;
};

FoldReport compute_report(std::span<const double> scores, std::span<const int> hard_labels, double threshold);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

/// Over the present values only.
MeanStd mean_std(const std::vector<std::optional<double>>& values);

/// "0.812 ± 0.041"
std::string format_mean_std(const MeanStd& m, int digits = 3);

}  // namespace amfkit
