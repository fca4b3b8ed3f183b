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
#include <vector>

#include "amfkit/numerics.hpp"

namespace amfkit {

// --- focal ------------------------------------------------------------------

struct FocalParams {
  double gamma = 2.0;
  double pos_weight = 1.0;
  /// Treat (1 - p_t)^gamma as a constant weight in the backward pass.
  bool detach_factor = false;

  void validate() const;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Sigmoid focal loss with a positive-class weight inside BCE-with-logits:
///   l = (1 - p_t)^gamma * -(w+ y log p + (1 - y) log(1 - p)),
///   p = sigmoid(z), p_t = y p + (1 - y)(1 - p).
/// Soft labels use the same expressions. Mean over the batch; the gradient
/// is w.r.t. z and includes the focal factor unless detached.
LossAndGrad focal_loss(std::span<const double> logits, std::span<const double> labels,
                       const FocalParams& params);

/// w+ = sum(1 - y) / sum(y) over the pool. Throws on zero positive mass.
double dynamic_pos_weight(std::span<const double> labels);
/// Weighted variant: sum(w (1 - y)) / sum(w y).
double dynamic_pos_weight(std::span<const double> labels, std::span<const double> weights);

// --- multi-similarity mining + supervised contrastive -----------------------

struct ContrastiveParams {
  double temperature = 0.1;
  double miner_epsilon = 0.1;
  double weight = 0.5;
  /// Use every other batch member in the denominator instead of the mined set.
  bool full_denominator = false;

  void validate() const;
};

struct MinedPairs {
  std::vector<std::vector<std::size_t>> positives;  // per anchor
  std::vector<std::vector<std::size_t>> negatives;

  std::size_t pair_count() const;
  bool empty() const { return pair_count() == 0; }
};

/// Rows of `embeddings` must be unit-norm within 1e-6. For anchor a, keeps
/// negative n iff S_an > min_p S_ap - eps and positive p iff
/// S_ap < max_n S_an + eps. Anchors lacking either class keep nothing.
MinedPairs ms_mine(const Matrix& embeddings, std::span<const int> hard_labels, double epsilon);

struct MatrixLossAndGrad {
  double loss = 0.0;
  Matrix grad;
};

/// Supervised contrastive loss over mined pairs. For anchor i with kept
/// positives P(i):
///   L_i = -(1/|P(i)|) sum_p log( exp(S_ip/tau) / sum_{a in A(i)} exp(S_ia/tau) )
/// with A(i) the distinct kept positives and negatives (or all a != i under
/// `full_denominator`). Averaged over anchors with |P(i)| > 0; zero when none
/// qualify. The gradient is w.r.t. the normalized embeddings.
MatrixLossAndGrad supcon_loss(const Matrix& embeddings, const MinedPairs& mined, double temperature,
                              bool full_denominator = false);

// --- domain-adversarial term ----------------------------------------------------

struct DomainLossParams {
  double weight = 0.1;
  double grl_scale = 1.0;

  void validate() const;
};

struct DomainLossResult {
  double loss = 0.0;          // weight * mean cross-entropy
  double cross_entropy = 0.0; // unweighted mean cross-entropy
  Matrix grad_logits;         // d loss / d logits, for the domain head's own parameters
  /// Multiplier applied to the gradient that leaves the domain head towards
  /// the shared features: -grl_scale. The forward value never depends on it.
  double feature_grad_scale = -1.0;
};

/// Softmax cross-entropy against (possibly mixed) target distributions.
/// Target rows must sum to 1 within 1e-6.
DomainLossResult grl_domain_loss(const Matrix& domain_logits, const Matrix& domain_targets,
                                 const DomainLossParams& params);

// --- composite -------------------------------------------------------------------

struct LossParams {
  FocalParams focal;
  ContrastiveParams contrastive;
  DomainLossParams domain;

  void validate() const;
};

struct BatchOutputs {
  std::vector<double> class_logits;
  Matrix embeddings;     // L2-normalized
  Matrix domain_logits;  // batch x |D|
};

struct BatchTargets {
  std::vector<double> labels;  // soft
  Matrix domain_targets;       // rows sum to 1
};

struct LossBreakdown {
  double focal = 0.0;
  double contrastive = 0.0;   // unweighted SupCon value
  double domain_ce = 0.0;     // unweighted cross-entropy
  double total = 0.0;
  std::size_t mined_pairs = 0;
};

struct CompositeResult {
  LossBreakdown breakdown;
  std::vector<double> grad_logits;
  Matrix grad_embeddings;
  Matrix grad_domain_logits;
  double feature_grad_scale = -1.0;
};

/// total = focal + weight_con * supcon + weight_dom * domain_ce.
/// Pairs are mined on hard labels from `targets.labels` unless `mined` is
/// supplied, in which case it is used as-is.
CompositeResult composite_loss(const BatchOutputs& outputs, const BatchTargets& targets,
                               const LossParams& params, const MinedPairs* mined = nullptr);

}  // namespace amfkit
