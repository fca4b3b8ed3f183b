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

#include "amfkit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "amfkit/datamodel.hpp"
#include "amfkit/errors.hpp"

namespace amfkit {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double logsumexp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

void FocalParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("focal.gamma must be finite and >= 0");
  if (!(pos_weight > 0.0) || !std::isfinite(pos_weight))
    throw ValidationError("focal.pos_weight must be finite and > 0");
}

LossAndGrad focal_loss(std::span<const double> logits, std::span<const double> labels,
                       const FocalParams& params) {
  params.validate();
  if (logits.empty()) throw ValidationError("focal_loss: empty batch");
  if (logits.size() != labels.size()) throw ValidationError("focal_loss: logits/labels size mismatch");

  const double n = static_cast<double>(logits.size());
  const double w = params.pos_weight;
  const double gamma = params.gamma;
  LossAndGrad out;
  out.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    const double y = labels[i];
    if (!std::isfinite(z)) throw NumericalError("focal_loss: non-finite logit");
    if (!(y >= 0.0 && y <= 1.0)) throw ValidationError("focal_loss: label outside [0,1]");

    const double p = sigmoid(z);
    const double p_neg = sigmoid(-z);
    const double bce = w * y * softplus(-z) + (1.0 - y) * softplus(z);
    const double d_bce = -w * y * p_neg + (1.0 - y) * p;

    // 1 - p_t, written without cancellation.
    const double q = y * p_neg + (1.0 - y) * p;
    const double factor = std::pow(q, gamma);
    double d_factor = 0.0;
    if (gamma > 0.0 && q > 0.0 && !params.detach_factor)
      d_factor = gamma * std::pow(q, gamma - 1.0) * (1.0 - 2.0 * y) * p * p_neg;

    out.loss += factor * bce;
    out.grad[i] = (factor * d_bce + d_factor * bce) / n;
  }
  out.loss /= n;
  return out;
}

double dynamic_pos_weight(std::span<const double> labels) {
  double pos = 0.0, neg = 0.0;
  for (double y : labels) {
    pos += y;
    neg += 1.0 - y;
  }
  if (!(pos > 0.0)) throw ValidationError("degenerate pool: zero positive label mass");
  return neg / pos;
}

double dynamic_pos_weight(std::span<const double> labels, std::span<const double> weights) {
  if (labels.size() != weights.size()) throw ValidationError("dynamic_pos_weight: size mismatch");
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    pos += weights[i] * labels[i];
    neg += weights[i] * (1.0 - labels[i]);
  }
  if (!(pos > 0.0)) throw ValidationError("degenerate pool: zero positive label mass");
  return neg / pos;
}

void ContrastiveParams::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw ValidationError("contrastive.temperature must be > 0");
  if (!(miner_epsilon >= 0.0)) throw ValidationError("contrastive.epsilon must be >= 0");
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw ValidationError("contrastive.weight must be >= 0");
}

std::size_t MinedPairs::pair_count() const {
  std::size_t n = 0;
  for (const auto& p : positives) n += p.size();
  for (const auto& q : negatives) n += q.size();
  return n;
}

MinedPairs ms_mine(const Matrix& embeddings, std::span<const int> hard_labels, double epsilon) {
  const std::size_t n = embeddings.rows();
  if (hard_labels.size() != n) throw ValidationError("ms_mine: labels/embeddings size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = std::sqrt(dot(embeddings.row(i), embeddings.row(i)));
    if (std::abs(norm - 1.0) > 1e-6) {
      throw ValidationError("ms_mine: row " + std::to_string(i) + " is not unit-norm");
    }
  }
  MinedPairs mined;
  mined.positives.resize(n);
  mined.negatives.resize(n);
  std::vector<double> sim(n);
  for (std::size_t a = 0; a < n; ++a) {
    double min_pos = std::numeric_limits<double>::infinity();
    double max_neg = -std::numeric_limits<double>::infinity();
    bool has_pos = false, has_neg = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      sim[j] = dot(embeddings.row(a), embeddings.row(j));
      if (hard_labels[j] == hard_labels[a]) {
        has_pos = true;
        min_pos = std::min(min_pos, sim[j]);
      } else {
        has_neg = true;
        max_neg = std::max(max_neg, sim[j]);
      }
    }
    if (!has_pos || !has_neg) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      if (hard_labels[j] == hard_labels[a]) {
        if (sim[j] < max_neg + epsilon) mined.positives[a].push_back(j);
      } else {
        if (sim[j] > min_pos - epsilon) mined.negatives[a].push_back(j);
      }
    }
  }
  return mined;
}

MatrixLossAndGrad supcon_loss(const Matrix& embeddings, const MinedPairs& mined, double temperature,
                              bool full_denominator) {
  if (!(temperature > 0.0)) throw ValidationError("supcon_loss: temperature must be > 0");
  const std::size_t n = embeddings.rows();
  MatrixLossAndGrad out{0.0, Matrix(n, embeddings.cols())};
  if (mined.positives.size() != n || mined.negatives.size() != n) {
    if (mined.positives.empty() && mined.negatives.empty()) return out;
    throw ValidationError("supcon_loss: mined pairs do not match the batch");
  }

  std::size_t anchors = 0;
  std::vector<double> d_sim(n);
  std::vector<std::size_t> members;
  std::vector<double> scaled;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pos = mined.positives[i];
    if (pos.empty()) continue;
    members.clear();
    if (full_denominator) {
      for (std::size_t a = 0; a < n; ++a)
        if (a != i) members.push_back(a);
    } else {
      members.insert(members.end(), pos.begin(), pos.end());
      members.insert(members.end(), mined.negatives[i].begin(), mined.negatives[i].end());
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
    }
    for (auto a : members)
      if (a >= n || a == i) throw ValidationError("supcon_loss: invalid mined index");
    ++anchors;

    scaled.resize(members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
      scaled[k] = dot(embeddings.row(i), embeddings.row(members[k])) / temperature;
    const double lse = logsumexp(scaled);

    const double inv_p = 1.0 / static_cast<double>(pos.size());
    double pos_mean = 0.0;
    for (auto p : pos) pos_mean += dot(embeddings.row(i), embeddings.row(p)) / temperature;
    pos_mean *= inv_p;
    out.loss += lse - pos_mean;

    // dL_i/dS_ia = (softmax_a - count_a/|P|) / tau, scattered into both rows.
    std::fill(d_sim.begin(), d_sim.end(), 0.0);
    for (std::size_t k = 0; k < members.size(); ++k)
      d_sim[members[k]] += std::exp(scaled[k] - lse) / temperature;
    for (auto p : pos) d_sim[p] -= inv_p / temperature;
    for (std::size_t a = 0; a < n; ++a) {
      if (d_sim[a] == 0.0) continue;
      auto gi = out.grad.row(i);
      auto ga = out.grad.row(a);
      auto ei = embeddings.row(i);
      auto ea = embeddings.row(a);
      for (std::size_t c = 0; c < embeddings.cols(); ++c) {
        gi[c] += d_sim[a] * ea[c];
        ga[c] += d_sim[a] * ei[c];
      }
    }
  }
  if (anchors == 0) return out;
  const double inv = 1.0 / static_cast<double>(anchors);
  out.loss *= inv;
  for (auto& g : out.grad.data()) g *= inv;
  return out;
}

void DomainLossParams::validate() const {
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw ValidationError("domain.weight must be finite and >= 0");
  if (!(grl_scale >= 0.0) || !std::isfinite(grl_scale))
    throw ValidationError("domain.grl_scale must be finite and >= 0");
}

DomainLossResult grl_domain_loss(const Matrix& domain_logits, const Matrix& domain_targets,
                                 const DomainLossParams& params) {
  params.validate();
  if (domain_logits.rows() != domain_targets.rows() || domain_logits.cols() != domain_targets.cols())
    throw ValidationError("grl_domain_loss: logits/targets shape mismatch");
  const std::size_t n = domain_logits.rows();
  DomainLossResult out;
  out.feature_grad_scale = -params.grl_scale;
  out.grad_logits = Matrix(n, domain_logits.cols());
  if (n == 0) return out;

  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto t = domain_targets.row(i);
    double row_sum = 0.0;
    for (double v : t) row_sum += v;
    if (std::abs(row_sum - 1.0) > 1e-6)
      throw ValidationError("grl_domain_loss: target row " + std::to_string(i) + " does not sum to 1");
    auto z = domain_logits.row(i);
    const double lse = logsumexp(z);
    double ce = lse;
    for (std::size_t k = 0; k < z.size(); ++k) ce -= t[k] * z[k];
    out.cross_entropy += ce;
    auto g = out.grad_logits.row(i);
    for (std::size_t k = 0; k < z.size(); ++k) g[k] = params.weight * inv_n * (std::exp(z[k] - lse) - t[k]);
  }
  out.cross_entropy *= inv_n;
  out.loss = params.weight * out.cross_entropy;
  return out;
}

void LossParams::validate() const {
  focal.validate();
  contrastive.validate();
  domain.validate();
}

CompositeResult composite_loss(const BatchOutputs& outputs, const BatchTargets& targets,
                               const LossParams& params, const MinedPairs* mined) {
  params.validate();
  CompositeResult out;
  const std::size_t n = outputs.class_logits.size();

  auto focal = focal_loss(outputs.class_logits, targets.labels, params.focal);
  out.breakdown.focal = focal.loss;
  out.grad_logits = std::move(focal.grad);

  out.grad_embeddings = Matrix(outputs.embeddings.rows(), outputs.embeddings.cols());
  if (params.contrastive.weight > 0.0 && outputs.embeddings.rows() == n) {
    MinedPairs local;
    if (mined == nullptr) {
      std::vector<int> hard(n);
      for (std::size_t i = 0; i < n; ++i) hard[i] = hard_label(targets.labels[i]);
      local = ms_mine(outputs.embeddings, hard, params.contrastive.miner_epsilon);
      mined = &local;
    }
    out.breakdown.mined_pairs = mined->pair_count();
    auto con = supcon_loss(outputs.embeddings, *mined, params.contrastive.temperature,
                           params.contrastive.full_denominator);
    out.breakdown.contrastive = con.loss;
    for (std::size_t k = 0; k < con.grad.size(); ++k)
      out.grad_embeddings.data()[k] = params.contrastive.weight * con.grad.data()[k];
  }

  out.grad_domain_logits = Matrix(outputs.domain_logits.rows(), outputs.domain_logits.cols());
  out.feature_grad_scale = -params.domain.grl_scale;
  double domain_term = 0.0;
  if (params.domain.weight > 0.0 && outputs.domain_logits.cols() > 0) {
    auto dom = grl_domain_loss(outputs.domain_logits, targets.domain_targets, params.domain);
    out.breakdown.domain_ce = dom.cross_entropy;
    domain_term = dom.loss;
    out.grad_domain_logits = std::move(dom.grad_logits);
  }

  out.breakdown.total =
      out.breakdown.focal + params.contrastive.weight * out.breakdown.contrastive + domain_term;
  return out;
}

}  // namespace amfkit
