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

#include "amfkit/numerics.hpp"

namespace amfkit {

// --- MixUp ------------------------------------------------------------------

enum class MixupMode { kNone, kStandard, kStrong, kDomainAware };

/// Beta(alpha, alpha) concentration used by each variant when none is given.
double default_mixup_alpha(MixupMode mode);

struct MixupConfig {
  MixupMode mode = MixupMode::kNone;
  double alpha = 0.2;
  double apply_probability = 1.0;
  /// Domain-aware partners come from a different domain instead of the same one.
  bool cross_domain = false;

  void validate() const;
};

struct MixedSample {
  std::vector<double> features;
  double label = 0.0;
  std::vector<double> domain_target;
};

/// x = lam x1 + (1 - lam) x2, likewise for labels and one-hot domain targets.
MixedSample mixup(std::span<const double> x1, double y1, std::size_t d1, std::span<const double> x2,
                  double y2, std::size_t d2, double lambda, std::size_t domain_count);

/// Partner index for every batch member. Standard and strong draw uniformly
/// among the other members; domain-aware draws among other members of the
/// same domain and pairs singletons with themselves.
std::vector<std::size_t> pair_selector(std::span<const std::size_t> batch_domains, MixupMode mode,
                                       Rng& rng, bool cross_domain = false);

struct MixedBatch {
  Matrix features;
  std::vector<double> labels;
  Matrix domain_targets;
  double lambda = 1.0;
  bool mixed = false;
};

/// Applies the configured variant to a whole batch with one lambda draw.
/// When the variant is off, or the apply-probability coin says no, returns
/// the batch with one-hot domain targets.
MixedBatch apply_mixup(const Matrix& features, std::span<const double> labels,
                       std::span<const std::size_t> domains, std::size_t domain_count,
                       const MixupConfig& config, Rng& rng);

// --- exact geometric transforms ----------------------------------------------

/// Dihedral transform. Codes 0-3 rotate by code * 90 degrees counter-
/// clockwise; 4-7 mirror left-right first, then rotate by (code - 4) * 90.
/// Odd rotations need a square patch.
Matrix flip_rotate90(const Matrix& patch, int op_code);
int dihedral_inverse(int op_code);
/// Code equivalent to applying `first` and then `second`.
int dihedral_compose(int first, int second);

/// One square hole of side floor(fraction * min(H, W)), placed fully inside
/// the patch and filled with the mean of the pixels it covers.
Matrix cutout(const Matrix& patch, Rng& rng, double hole_fraction);

// --- RASS -------------------------------------------------------------------

struct RassConfig {
  double beta = 0.3;
  double low_freq_radius = 0.25;

  void validate() const;
};

/// Amplitude multipliers u ~ Uniform(1 - beta, 1 + beta) for frequencies whose
/// normalized radius is within `low_freq_radius`; 1 elsewhere. Conjugate
/// frequency pairs share a multiplier.
Matrix rass_multipliers(std::size_t height, std::size_t width, const RassConfig& config, Rng& rng);

struct RassResult {
  Matrix output;      // clamped to the input's value range
  Matrix unclamped;   // real inverse transform before clamping
  Matrix multipliers;
  double max_imag_residue = 0.0;
};

/// Rescales the low-frequency amplitude spectrum, keeps phase. Dimensions
/// must be powers of two.
RassResult rass_detailed(const Matrix& patch, const RassConfig& config, Rng& rng);
Matrix rass(const Matrix& patch, const RassConfig& config, Rng& rng);

/// Edge-replicating pad up to the next power of two in each dimension.
Matrix pad_to_power_of_two(const Matrix& patch);
Matrix crop(const Matrix& patch, std::size_t height, std::size_t width);
/// pad -> rass -> crop, for arbitrary patch sizes.
Matrix rass_any_size(const Matrix& patch, const RassConfig& config, Rng& rng);

}  // namespace amfkit
