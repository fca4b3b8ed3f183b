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

#include "amfkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amfkit/errors.hpp"
#include "amfkit/format.hpp"

namespace amfkit {

void SamplerConfig::validate() const {
  if (!(hard_fraction >= 0.0 && hard_fraction <= 1.0))
    throw ValidationError("sampler.hard_fraction must lie in [0,1]");
  if (!(hard_multiplier > 0.0) || !std::isfinite(hard_multiplier))
    throw ValidationError("sampler.hard_multiplier must be finite and > 0");
}

std::size_t hard_set_size(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(x));
}

std::vector<double> compute_weights(const DatasetTable& table, const std::vector<bool>& hard_flags,
                                    const SamplerConfig& config) {
  config.validate();
  const std::size_t n = table.size();
  if (n == 0) throw ValidationError("compute_weights: empty table");
  if (!hard_flags.empty() && hard_flags.size() != n)
    throw ValidationError("compute_weights: hard flags do not match the table");

  const ClassCounts totals = table.totals();
  const double nd = static_cast<double>(n);
  const double n_domains = static_cast<double>(table.domains().size());
  std::vector<double> w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = table[i];
    if (config.mode == SamplerMode::kWeighted) {
      const std::size_t n_class = hard_label(s.label) == 1 ? totals.positives : totals.negatives;
      const double class_w = nd / (2.0 * static_cast<double>(n_class));
      const double domain_w = nd / (n_domains * static_cast<double>(table.census().at(s.domain).total()));
      w[i] = class_w * domain_w;
    }
    if (!hard_flags.empty() && hard_flags[i]) w[i] *= config.hard_multiplier;
  }
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / nd;
  for (auto& v : w) v /= mean;
  return w;
}

SamplerState initial_state(const DatasetTable& table, const SamplerConfig& config) {
  SamplerState s;
  s.hard_flags.assign(table.size(), false);
  s.weights = compute_weights(table, s.hard_flags, config);
  return s;
}

std::vector<std::size_t> draw_batch(const SamplerState& state, Rng& rng, std::size_t batch_size) {
  if (batch_size == 0) throw ValidationError("draw_batch: batch_size must be >= 1");
  if (state.weights.empty()) throw ValidationError("draw_batch: no weights");
  std::vector<double> cumulative(state.weights.size());
  std::partial_sum(state.weights.begin(), state.weights.end(), cumulative.begin());
  const double total = cumulative.back();
  std::vector<std::size_t> out(batch_size);
  for (auto& idx : out) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  }
  return out;
}

DifficultyReport mine_hard(const DatasetTable& table, std::span<const double> predictions,
                           double fraction) {
  const std::size_t n = table.size();
  if (predictions.size() != n) throw ValidationError("mine_hard: predictions do not match the table");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ValidationError("mine_hard: fraction must lie in [0,1]");
  DifficultyReport rep;
  rep.difficulty.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(predictions[i] >= 0.0 && predictions[i] <= 1.0))
      throw ValidationError("mine_hard: prediction outside [0,1]");
    rep.difficulty[i] = std::abs(predictions[i] - table[i].label);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rep.difficulty[a] != rep.difficulty[b]) return rep.difficulty[a] > rep.difficulty[b];
    return table[a].id < table[b].id;
  });
  const std::size_t k = hard_set_size(fraction, n);
  rep.selected.assign(n, false);
  rep.selected_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  for (auto i : rep.selected_indices) rep.selected[i] = true;
  rep.threshold = k > 0 ? rep.difficulty[rep.selected_indices.back()] : 0.0;
  return rep;
}

SamplerState refresh(const SamplerState& state, const DatasetTable& table,
                     std::span<const double> predictions, const SamplerConfig& config) {
  SamplerState next;
  next.epoch = state.epoch + 1;
  if (config.hard_mining) {
    next.hard_flags = mine_hard(table, predictions, config.hard_fraction).selected;
  } else {
    next.hard_flags.assign(table.size(), false);
  }
  next.weights = compute_weights(table, next.hard_flags, config);
  return next;
}

std::string format_difficulty_csv(const DatasetTable& table, const DifficultyReport& report) {
  std::string out = "id,difficulty,selected\n";
  for (std::size_t i = 0; i < table.size(); ++i)
    out += table[i].id + "," + format_real(report.difficulty[i]) + "," + (report.selected[i] ? "1" : "0") + "\n";
  return out;
}

}  // namespace amfkit
