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

#include "amfkit/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amfkit/errors.hpp"

namespace amfkit {

double default_mixup_alpha(MixupMode mode) {
  switch (mode) {
    case MixupMode::kStrong:
      return 1.0;
    case MixupMode::kStandard:
    case MixupMode::kDomainAware:
    case MixupMode::kNone:
      break;
  }
  return 0.2;
}

void MixupConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("mixup.alpha must be > 0");
  if (!(apply_probability >= 0.0 && apply_probability <= 1.0))
    throw ValidationError("mixup.probability must lie in [0,1]");
}

MixedSample mixup(std::span<const double> x1, double y1, std::size_t d1, std::span<const double> x2,
                  double y2, std::size_t d2, double lambda, std::size_t domain_count) {
  if (x1.size() != x2.size()) throw ValidationError("mixup: feature shape mismatch");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("mixup: lambda outside [0,1]");
  if (d1 >= domain_count || d2 >= domain_count) throw ValidationError("mixup: domain index out of range");
  MixedSample out;
  const double mu = 1.0 - lambda;
  out.features.resize(x1.size());
  for (std::size_t k = 0; k < x1.size(); ++k) out.features[k] = lambda * x1[k] + mu * x2[k];
  out.label = lambda * y1 + mu * y2;
  out.domain_target.assign(domain_count, 0.0);
  out.domain_target[d1] += lambda;
  out.domain_target[d2] += mu;
  return out;
}

std::vector<std::size_t> pair_selector(std::span<const std::size_t> batch_domains, MixupMode mode,
                                       Rng& rng, bool cross_domain) {
  const std::size_t n = batch_domains.size();
  std::vector<std::size_t> partner(n);
  for (std::size_t i = 0; i < n; ++i) partner[i] = i;
  if (mode == MixupMode::kNone || n < 2) return partner;

  if (mode == MixupMode::kStandard || mode == MixupMode::kStrong) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = rng.uniform_index(n - 1);
      partner[i] = j >= i ? j + 1 : j;
    }
    return partner;
  }

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const bool same = batch_domains[j] == batch_domains[i];
      if (same != cross_domain) candidates.push_back(j);
    }
    if (!candidates.empty()) partner[i] = candidates[rng.uniform_index(candidates.size())];
  }
  return partner;
}

MixedBatch apply_mixup(const Matrix& features, std::span<const double> labels,
                       std::span<const std::size_t> domains, std::size_t domain_count,
                       const MixupConfig& config, Rng& rng) {
  const std::size_t n = features.rows();
  if (labels.size() != n || domains.size() != n) throw ValidationError("apply_mixup: batch size mismatch");
  MixedBatch out;
  out.features = features;
  out.labels.assign(labels.begin(), labels.end());
  out.domain_targets = Matrix(n, domain_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (domains[i] >= domain_count) throw ValidationError("apply_mixup: domain index out of range");
    out.domain_targets(i, domains[i]) = 1.0;
  }
  if (config.mode == MixupMode::kNone || n < 2) return out;
  config.validate();
  if (rng.uniform() >= config.apply_probability) return out;

  const double lambda = rand_beta(rng, config.alpha);
  const auto partner = pair_selector(domains, config.mode, rng, config.cross_domain);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = partner[i];
    auto m = mixup(features.row(i), labels[i], domains[i], features.row(j), labels[j], domains[j], lambda,
                   domain_count);
    std::copy(m.features.begin(), m.features.end(), out.features.row(i).begin());
    out.labels[i] = m.label;
    std::copy(m.domain_target.begin(), m.domain_target.end(), out.domain_targets.row(i).begin());
  }
  out.lambda = lambda;
  out.mixed = true;
  return out;
}

// --- dihedral -----------------------------------------------------------------

namespace {

void check_op(int op_code) {
  if (op_code < 0 || op_code > 7) throw ValidationError("flip_rotate90: op code must be in 0..7");
}

Matrix rotate_ccw(const Matrix& in) {
  const std::size_t h = in.rows(), w = in.cols();
  Matrix out(w, h);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out(w - 1 - c, r) = in(r, c);
  return out;
}

Matrix mirror(const Matrix& in) {
  const std::size_t w = in.cols();
  Matrix out(in.rows(), w);
  for (std::size_t r = 0; r < in.rows(); ++r)
    for (std::size_t c = 0; c < w; ++c) out(r, w - 1 - c) = in(r, c);
  return out;
}

}  // namespace

Matrix flip_rotate90(const Matrix& patch, int op_code) {
  check_op(op_code);
  const int turns = op_code % 4;
  if (turns % 2 == 1 && patch.rows() != patch.cols())
    throw ValidationError("flip_rotate90: 90-degree rotations need a square patch");
  Matrix out = op_code >= 4 ? mirror(patch) : patch;
  for (int t = 0; t < turns; ++t) out = rotate_ccw(out);
  return out;
}

int dihedral_inverse(int op_code) {
  check_op(op_code);
  if (op_code >= 4) return op_code;  // reflections are involutions
  return (4 - op_code) % 4;
}

int dihedral_compose(int first, int second) {
  check_op(first);
  check_op(second);
  const int f1 = first / 4, r1 = first % 4;
  const int f2 = second / 4, r2 = second % 4;
  // R^r2 F^f2 R^r1 F^f1, using F R^r = R^-r F.
  const int r = ((r2 + (f2 ? -r1 : r1)) % 4 + 4) % 4;
  return 4 * ((f1 + f2) % 2) + r;
}

Matrix cutout(const Matrix& patch, Rng& rng, double hole_fraction) {
  if (!(hole_fraction >= 0.0 && hole_fraction < 1.0)) throw ValidationError("cutout: hole_fraction must lie in [0,1)");
  const std::size_t h = patch.rows(), w = patch.cols();
  const auto side = static_cast<std::size_t>(std::floor(hole_fraction * static_cast<double>(std::min(h, w))));
  Matrix out = patch;
  if (side == 0) return out;
  const std::size_t top = rng.uniform_index(h - side + 1);
  const std::size_t left = rng.uniform_index(w - side + 1);
  double sum = 0.0;
  for (std::size_t r = top; r < top + side; ++r)
    for (std::size_t c = left; c < left + side; ++c) sum += patch(r, c);
  const double fill = sum / static_cast<double>(side * side);
  for (std::size_t r = top; r < top + side; ++r)
    for (std::size_t c = left; c < left + side; ++c) out(r, c) = fill;
  return out;
}

// --- RASS -----------------------------------------------------------------------

void RassConfig::validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("rass.beta must lie in [0,1)");
  if (!(low_freq_radius >= 0.0 && low_freq_radius <= 1.0))
    throw ValidationError("rass.low_freq_radius must lie in [0,1]");
}

Matrix rass_multipliers(std::size_t height, std::size_t width, const RassConfig& config, Rng& rng) {
  config.validate();
  Matrix u(height, width, 1.0);
  auto normalized = [](std::size_t k, std::size_t n) {
    const double half = static_cast<double>(n) / 2.0;
    const double signed_k = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    return signed_k / half;
  };
  for (std::size_t ky = 0; ky < height; ++ky) {
    for (std::size_t kx = 0; kx < width; ++kx) {
      const std::size_t py = (height - ky) % height;
      const std::size_t px = (width - kx) % width;
      if (py * width + px < ky * width + kx) {
        u(ky, kx) = u(py, px);
        continue;
      }
      const double ry = normalized(ky, height);
      const double rx = normalized(kx, width);
      if (std::sqrt(ry * ry + rx * rx) <= config.low_freq_radius)
        u(ky, kx) = rng.uniform(1.0 - config.beta, 1.0 + config.beta);
    }
  }
  return u;
}

RassResult rass_detailed(const Matrix& patch, const RassConfig& config, Rng& rng) {
  if (!is_power_of_two(patch.rows()) || !is_power_of_two(patch.cols()))
    throw ValidationError("rass: patch dimensions must be powers of two (pad first)");
  RassResult res;
  res.multipliers = rass_multipliers(patch.rows(), patch.cols(), config, rng);
  ComplexGrid spectrum = fft2d(ComplexGrid::from_real(patch), false);
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) spectrum.values[i] *= res.multipliers.data()[i];
  const ComplexGrid back = fft2d(spectrum, true);
  res.unclamped = back.real_part();
  for (const auto& v : back.values) res.max_imag_residue = std::max(res.max_imag_residue, std::abs(v.imag()));

  const auto [lo, hi] = std::minmax_element(patch.data().begin(), patch.data().end());
  res.output = res.unclamped;
  for (auto& v : res.output.data()) v = std::clamp(v, *lo, *hi);
  return res;
}

Matrix rass(const Matrix& patch, const RassConfig& config, Rng& rng) {
  return rass_detailed(patch, config, rng).output;
}

Matrix pad_to_power_of_two(const Matrix& patch) {
  auto next_pow2 = [](std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
  };
  if (patch.empty()) throw ValidationError("pad_to_power_of_two: empty patch");
  const std::size_t h = next_pow2(patch.rows()), w = next_pow2(patch.cols());
  Matrix out(h, w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      out(r, c) = patch(std::min(r, patch.rows() - 1), std::min(c, patch.cols() - 1));
  return out;
}

Matrix crop(const Matrix& patch, std::size_t height, std::size_t width) {
  if (height > patch.rows() || width > patch.cols()) throw ValidationError("crop: target larger than patch");
  Matrix out(height, width);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) out(r, c) = patch(r, c);
  return out;
}

Matrix rass_any_size(const Matrix& patch, const RassConfig& config, Rng& rng) {
  return crop(rass(pad_to_power_of_two(patch), config, rng), patch.rows(), patch.cols());
}

}  // namespace amfkit
