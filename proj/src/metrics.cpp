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

#include "amfkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amfkit/errors.hpp"
#include "amfkit/format.hpp"

namespace amfkit {

Confusion confusion_matrix(std::span<const double> scores, std::span<const int> hard_labels, double threshold) {
  if (scores.size() != hard_labels.size()) throw ValidationError("confusion_matrix: size mismatch");
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (hard_labels[i] == 1)
      ++(predicted ? c.tp : c.fn);
    else
      ++(predicted ? c.fp : c.tn);
  }
  return c;
}

double balanced_accuracy(double positive_recall, double negative_recall) {
  return 0.5 * (positive_recall + negative_recall);
}

std::optional<double> auc(std::span<const double> scores, std::span<const int> hard_labels) {
  if (scores.size() != hard_labels.size()) throw ValidationError("auc: size mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // 1-based ranks i+1..j share their average.
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (hard_labels[order[k]] == 1) {
        pos_rank_sum += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

FoldReport compute_report(std::span<const double> scores, std::span<const int> hard_labels, double threshold) {
  FoldReport r;
  r.n = scores.size();
  r.confusion = confusion_matrix(scores, hard_labels, threshold);
  const auto& c = r.confusion;
  r.positives = c.tp + c.fn;
  r.negatives = c.tn + c.fp;
  if (r.positives > 0) r.amf_recall = static_cast<double>(c.tp) / static_cast<double>(r.positives);
  if (r.negatives > 0) r.nmf_recall = static_cast<double>(c.tn) / static_cast<double>(r.negatives);
  if (r.amf_recall && r.nmf_recall) r.ba = balanced_accuracy(*r.amf_recall, *r.nmf_recall);
  const std::size_t f1_den = 2 * c.tp + c.fp + c.fn;
  if (f1_den > 0) r.f1 = 2.0 * static_cast<double>(c.tp) / static_cast<double>(f1_den);
  r.auc = auc(scores, hard_labels);
  return r;
}

MeanStd mean_std(const std::vector<std::optional<double>>& values) {
  MeanStd m;
  double sum = 0.0;
  for (const auto& v : values)
    if (v) {
      sum += *v;
      ++m.count;
    }
  if (m.count == 0) return m;
  m.mean = sum / static_cast<double>(m.count);
  double sq = 0.0;
  for (const auto& v : values)
    if (v) sq += (*v - m.mean) * (*v - m.mean);
  m.std = std::sqrt(sq / static_cast<double>(m.count));
  return m;
}

std::string format_mean_std(const MeanStd& m, int digits) {
  if (m.count == 0) return "NA";
  return format_fixed(m.mean, digits) + " ± " + format_fixed(m.std, digits);
}

}  // namespace amfkit
