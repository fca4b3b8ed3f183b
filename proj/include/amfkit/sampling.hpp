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
#include <span>
#include <string>
#include <vector>

#include "amfkit/datamodel.hpp"
#include "amfkit/numerics.hpp"

namespace amfkit {

enum class SamplerMode { kWeighted, kUniform };

struct SamplerConfig {
  SamplerMode mode = SamplerMode::kWeighted;
  bool hard_mining = true;
  double hard_fraction = 0.30;
  double hard_multiplier = 2.0;

  void validate() const;
};

struct SamplerState {
  std::vector<double> weights;
  std::vector<bool> hard_flags;
  std::size_t epoch = 0;

  friend bool operator==(const SamplerState&, const SamplerState&) = default;
};

struct DifficultyReport {
  std::vector<double> difficulty;  // |p_hat - y|
  std::vector<bool> selected;
  std::vector<std::size_t> selected_indices;  // hardest first
  double threshold = 0.0;  // smallest selected difficulty
};

/// ceil(fraction * n), robust to the representation error in products such
/// as 0.3 * 10.
std::size_t hard_set_size(double fraction, std::size_t n);

/// w_i = classW * domainW * (multiplier if hard), normalized to mean 1, with
/// classW(c) = N / (2 N_c) on hard labels and domainW(d) = N / (|D| N_d).
/// Uniform mode keeps only the hard multiplier.
std::vector<double> compute_weights(const DatasetTable& table, const std::vector<bool>& hard_flags,
                                    const SamplerConfig& config = {});

SamplerState initial_state(const DatasetTable& table, const SamplerConfig& config = {});

/// With-replacement categorical draws proportional to the weights.
std::vector<std::size_t> draw_batch(const SamplerState& state, Rng& rng, std::size_t batch_size);

/// Top ceil(fraction * N) samples by difficulty; boundary ties go to the
/// smaller sample id.
DifficultyReport mine_hard(const DatasetTable& table, std::span<const double> predictions,
                           double fraction = 0.30);

/// End-of-epoch update: new hard flags (when mining is enabled), new weights,
/// epoch + 1.
SamplerState refresh(const SamplerState& state, const DatasetTable& table,
                     std::span<const double> predictions, const SamplerConfig& config = {});

/// `id,difficulty,selected` audit export.
std::string format_difficulty_csv(const DatasetTable& table, const DifficultyReport& report);

}  // namespace amfkit
