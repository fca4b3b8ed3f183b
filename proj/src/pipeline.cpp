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

#include "amfkit/pipeline.hpp"

#include <cmath>

#include "amfkit/errors.hpp"
#include "amfkit/format.hpp"

namespace amfkit {

void TrainConfig::validate() const {
  if (epochs_max == 0) throw ValidationError("train.epochs_max must be >= 1");
  if (batch_size == 0) throw ValidationError("train.batch_size must be >= 1");
  if (mixup.mode != MixupMode::kNone && batch_size < 2)
    throw ValidationError("train.batch_size must be >= 2 when mixup is enabled");
  if (patience == 0) throw ValidationError("train.patience must be >= 1");
  if (!(min_delta >= 0.0)) throw ValidationError("train.min_delta must be >= 0");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("train.threshold must lie in (0,1)");
  if (!(monitor_fraction > 0.0 && monitor_fraction < 1.0))
    throw ValidationError("train.monitor_fraction must lie in (0,1)");
  if (!(adam.lr > 0.0)) throw ValidationError("train.lr must be > 0");
  loss_params.validate();
  mixup.validate();
  sampler.validate();
}

FoldReport evaluate(const NetState& state, const DatasetTable& samples, double threshold) {
  const auto scores = predict_proba(state, samples.feature_matrix());
  const auto labels = samples.hard_labels();
  return compute_report(scores, labels, threshold);
}

namespace {

struct Batch {
  Matrix features;
  std::vector<double> labels;
  std::vector<std::size_t> domains;
};

Batch gather(const DatasetTable& pool, const std::vector<std::size_t>& domain_of, const std::vector<std::size_t>& idx) {
  Batch b{Matrix(idx.size(), pool.dim()), {}, {}};
  b.labels.reserve(idx.size());
  b.domains.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto& s = pool[idx[r]];
    std::copy(s.features.begin(), s.features.end(), b.features.row(r).begin());
    b.labels.push_back(s.label);
    b.domains.push_back(domain_of[idx[r]]);
  }
  return b;
}

}  // namespace

TrainResult train(const DatasetTable& table, const SplitPlan& split, const TrainConfig& config,
                  const EpochObserver& observer) {
  config.validate();
  const DatasetTable pool = table.subset(split.train_ids);
  const DatasetTable monitor = table.subset(split.monitor_ids);
  if (pool.empty()) throw ValidationError("train: empty training pool");
  if (monitor.empty()) throw ValidationError("train: empty monitor set");
  const auto pool_labels = pool.labels();
  {
    double mass = 0.0;
    for (double y : pool_labels) mass += y;
    if (!(mass > 0.0)) throw ValidationError("train: degenerate pool, no positive label mass");
  }
  if (config.stop_mode == StopMode::kMonitor) {
    const auto t = monitor.totals();
    if (t.positives == 0 || t.negatives == 0)
      throw ValidationError("train: monitor set needs both classes for balanced accuracy");
  }

  std::vector<std::size_t> domain_of(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) domain_of[i] = pool.domain_index(pool[i].domain);
  const std::size_t domain_count = pool.domains().size();

  NetConfig net_config{pool.dim(), config.hidden_dims, domain_count, config.activation, config.seed};
  NetState net = init(net_config);

  const Rng master(config.seed);
  Rng sampler_rng = master.split("sampler");
  Rng mixup_rng = master.split("mixup");

  SamplerState sampler = initial_state(pool, config.sampler);
  const Matrix pool_features = pool.feature_matrix();
  const Matrix monitor_features = monitor.feature_matrix();
  const auto monitor_labels = monitor.hard_labels();
  const std::size_t batches = (pool.size() + config.batch_size - 1) / config.batch_size;

  TrainResult result;
  result.choice.rule = config.stop_mode == StopMode::kMonitor ? "max_monitor_ba_earliest" : "final_epoch";
  double best_for_patience = -1.0;
  std::size_t stale_epochs = 0;
  bool have_best = false;

  for (std::size_t epoch = 1; epoch <= config.epochs_max; ++epoch) {
    LossParams params = config.loss_params;
    if (config.loss == LossKind::kBce) {
      params.focal.gamma = 0.0;
      params.focal.pos_weight = 1.0;
    } else if (config.adaptive_pos_weight) {
      params.focal.pos_weight = config.pos_weight_source == PosWeightSource::kPool
                                    ? dynamic_pos_weight(pool_labels)
                                    : dynamic_pos_weight(pool_labels, sampler.weights);
    }

    EpochLog log;
    log.epoch = epoch;
    log.pos_weight = params.focal.pos_weight;
    for (std::size_t b = 0; b < batches; ++b) {
      const auto idx = draw_batch(sampler, sampler_rng, config.batch_size);
      const Batch batch = gather(pool, domain_of, idx);
      MixedBatch mixed =
          apply_mixup(batch.features, batch.labels, batch.domains, domain_count, config.mixup, mixup_rng);

      const ForwardTrace trace = forward(net, mixed.features);
      BatchOutputs outputs{trace.class_logits, trace.embedding, trace.domain_logits};
      BatchTargets targets{std::move(mixed.labels), std::move(mixed.domain_targets)};
      const CompositeResult loss = composite_loss(outputs, targets, params);
      if (!std::isfinite(loss.breakdown.total)) throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch));

      UpstreamGrads up{loss.grad_logits, loss.grad_embeddings, loss.grad_domain_logits, loss.feature_grad_scale};
      const auto grads = backward(net, trace, up);
      adam_step(net, grads, config.adam);

      log.loss.focal += loss.breakdown.focal;
      log.loss.contrastive += loss.breakdown.contrastive;
      log.loss.domain_ce += loss.breakdown.domain_ce;
      log.loss.total += loss.breakdown.total;
      log.loss.mined_pairs += loss.breakdown.mined_pairs;
    }
    const double inv = 1.0 / static_cast<double>(batches);
    log.loss.focal *= inv;
    log.loss.contrastive *= inv;
    log.loss.domain_ce *= inv;
    log.loss.total *= inv;

    const auto predictions = predict_proba(net, pool_features);
    sampler = refresh(sampler, pool, predictions, config.sampler);
    std::size_t hard = 0;
    for (bool f : sampler.hard_flags) hard += f ? 1 : 0;
    log.hard_set_size = hard;

    log.monitor = compute_report(predict_proba(net, monitor_features), monitor_labels, config.threshold);
    result.logs.push_back(log);
    if (observer) observer(log, sampler, pool);

    const double ba = log.monitor.ba.value_or(0.0);
    if (config.stop_mode == StopMode::kFixed) {
      result.state = net;
      result.choice.best_epoch = epoch;
      result.choice.best_monitor_ba = ba;
      continue;
    }
    if (!have_best || ba > result.choice.best_monitor_ba) {
      have_best = true;
      result.state = net;
      result.choice.best_epoch = epoch;
      result.choice.best_monitor_ba = ba;
    }
    if (ba > best_for_patience + config.min_delta) {
      best_for_patience = ba;
      stale_epochs = 0;
    } else if (++stale_epochs >= config.patience) {
      break;
    }
  }
  return result;
}

LodoResult run_lodo(const DatasetTable& table, const TrainConfig& config) {
  config.validate();
  LodoResult result;
  const auto folds = lodo_folds(table);
  const Rng master(config.seed);
  std::vector<std::optional<double>> ba, f1, auc_v, amf, nmf;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    LodoFold fold;
    fold.outer = folds[k];
    const DatasetTable train_domains = table.subset(fold.outer.train_ids);
    Rng fold_rng = master.split("lodo/" + fold.outer.held_out_domain);
    fold.inner = stratified_split(train_domains, config.monitor_fraction, fold_rng);

    TrainConfig fold_config = config;
    fold_config.seed = fold_rng.next_u64();
    const TrainResult trained = train(train_domains, fold.inner, fold_config);
    fold.choice = trained.choice;
    fold.report = evaluate(trained.state, table.subset(fold.outer.monitor_ids), config.threshold);
    fold.report.fold = k;
    fold.report.held_out_domain = fold.outer.held_out_domain;

    ba.push_back(fold.report.ba);
    f1.push_back(fold.report.f1);
    auc_v.push_back(fold.report.auc);
    amf.push_back(fold.report.amf_recall);
    nmf.push_back(fold.report.nmf_recall);
    result.folds.push_back(std::move(fold));
  }
  result.aggregate = {mean_std(ba), mean_std(f1), mean_std(auc_v), mean_std(amf), mean_std(nmf)};
  return result;
}

// --- reports -------------------------------------------------------------------------

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_real(*v) : "NA"; }
std::string opt3(const std::optional<double>& v) { return v ? format_fixed(*v, 3) : "NA"; }

}  // namespace

std::string format_epoch_log_csv(const std::vector<EpochLog>& logs) {
  std::string out =
      "epoch,focal,contrastive,domain_ce,total,mined_pairs,pos_weight,hard_set_size,monitor_ba,monitor_f1,"
      "monitor_auc,monitor_amf_recall,monitor_nmf_recall\n";
  for (const auto& l : logs) {
    out += std::to_string(l.epoch) + "," + format_real(l.loss.focal) + "," + format_real(l.loss.contrastive) + "," +
           format_real(l.loss.domain_ce) + "," + format_real(l.loss.total) + "," + std::to_string(l.loss.mined_pairs) +
           "," + format_real(l.pos_weight) + "," + std::to_string(l.hard_set_size) + "," + opt(l.monitor.ba) + "," +
           opt(l.monitor.f1) + "," + opt(l.monitor.auc) + "," + opt(l.monitor.amf_recall) + "," +
           opt(l.monitor.nmf_recall) + "\n";
  }
  return out;
}

std::string format_fold_csv(const std::vector<FoldReport>& folds) {
  std::string out = "fold,held_out_domain,ba,f1,auc,amf_recall,nmf_recall,n\n";
  for (const auto& r : folds) {
    out += std::to_string(r.fold) + "," + r.held_out_domain + "," + opt(r.ba) + "," + opt(r.f1) + "," + opt(r.auc) +
           "," + opt(r.amf_recall) + "," + opt(r.nmf_recall) + "," + std::to_string(r.n) + "\n";
  }
  return out;
}

std::string format_lodo_csv(const LodoResult& result) {
  std::vector<FoldReport> reports;
  for (const auto& f : result.folds) reports.push_back(f.report);
  return format_fold_csv(reports);
}

std::string format_lodo_markdown(const LodoResult& result) {
  std::string out =
      "| Held-out domain | n | BA | F1 | AUC | AMF Recall | NMF Recall |\n"
      "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& f : result.folds) {
    const auto& r = f.report;
    out += "| " + r.held_out_domain + " | " + std::to_string(r.n) + " | " + opt3(r.ba) + " | " + opt3(r.f1) + " | " +
           opt3(r.auc) + " | " + opt3(r.amf_recall) + " | " + opt3(r.nmf_recall) + " |\n";
  }
  const auto& a = result.aggregate;
  out += "| **mean ± std** | | " + format_mean_std(a.ba) + " | " + format_mean_std(a.f1) + " | " +
         format_mean_std(a.auc) + " | " + format_mean_std(a.amf_recall) + " | " + format_mean_std(a.nmf_recall) +
         " |\n\n";
  out += "Std is the population standard deviation over " + std::to_string(result.folds.size()) + " folds. RNG: " +
         std::string(Rng::kAlgorithm) + ".\n";
  return out;
}

}  // namespace amfkit
