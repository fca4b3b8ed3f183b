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
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "amfkit/augment.hpp"
#include "amfkit/datamodel.hpp"
#include "amfkit/losses.hpp"
#include "amfkit/metrics.hpp"
#include "amfkit/model.hpp"
#include "amfkit/sampling.hpp"

namespace amfkit {

enum class LossKind { kFocal, kBce };
enum class StopMode { kMonitor, kFixed };
/// Which composition the per-epoch w+ is computed from: raw pool counts, or
/// the pool as the sampler weights it for the coming epoch.
enum class PosWeightSource { kPool, kSampled };

struct TrainConfig {
  std::size_t epochs_max = 30;
  std::size_t batch_size = 64;
  StopMode stop_mode = StopMode::kMonitor;
  std::size_t patience = 5;
  double min_delta = 1e-4;

  LossKind loss = LossKind::kFocal;
  /// Recompute w+ from the training pool every epoch; otherwise use
  /// `loss_params.focal.pos_weight` as given.
  bool adaptive_pos_weight = true;
  PosWeightSource pos_weight_source = PosWeightSource::kSampled;
  LossParams loss_params;
  MixupConfig mixup;
  SamplerConfig sampler;

  std::vector<std::size_t> hidden_dims{64, 32};
  Activation activation = Activation::kRelu;
  AdamConfig adam;

  double threshold = 0.5;
  double monitor_fraction = 0.05;
  std::uint64_t seed = 7;

  void validate() const;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  LossBreakdown loss;     // means over the epoch's batches
  double pos_weight = 1.0;
  std::size_t hard_set_size = 0;
  FoldReport monitor;
};

struct CheckpointChoice {
  std::size_t best_epoch = 0;
  double best_monitor_ba = 0.0;
  std::string rule;
};

struct TrainResult {
  NetState state;
  std::vector<EpochLog> logs;
  CheckpointChoice choice;
};

/// Test seam: called after every epoch with the log just written.
using EpochObserver = std::function<void(const EpochLog&, const SamplerState&, const DatasetTable& pool)>;

/// Weighted sampling, mixup, composite loss and Adam, with per-epoch w+
/// recomputation, hard-example refresh and monitor-BA early stopping.
/// Returns the parameters of the best-BA epoch (earliest on ties).
TrainResult train(const DatasetTable& table, const SplitPlan& split, const TrainConfig& config,
                  const EpochObserver& observer = {});

FoldReport evaluate(const NetState& state, const DatasetTable& samples, double threshold = 0.5);

struct LodoFold {
  SplitPlan outer;    // train = other domains, monitor_ids = held-out domain
  SplitPlan inner;    // stratified monitor carved from the training domains
  FoldReport report;  // on the held-out domain
  CheckpointChoice choice;
};

struct LodoAggregate {
  MeanStd ba, f1, auc, amf_recall, nmf_recall;
};

struct LodoResult {
  std::vector<LodoFold> folds;
  LodoAggregate aggregate;
};

LodoResult run_lodo(const DatasetTable& table, const TrainConfig& config);

// --- reports -------------------------------------------------------------------

std::string format_epoch_log_csv(const std::vector<EpochLog>& logs);
/// `fold,held_out_domain,ba,f1,auc,amf_recall,nmf_recall,n`; absent metrics are `NA`.
std::string format_fold_csv(const std::vector<FoldReport>& folds);
std::string format_lodo_csv(const LodoResult& result);
/// Per-domain table with a mean ± std footer row.
std::string format_lodo_markdown(const LodoResult& result);

}  // namespace amfkit
