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

// Reference implementations used only by the tests. They favour the most
// literal reading of each definition over speed or numerical care.

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <vector>

#include "amfkit/losses.hpp"
#include "amfkit/numerics.hpp"

namespace oracle {

inline double bce_with_logits(std::span<const double> z, std::span<const double> y, double w) {
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    // log(1 + e^x) written two ways so that neither side overflows.
    auto softplus = [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
    total += w * y[i] * softplus(-z[i]) + (1.0 - y[i]) * softplus(z[i]);
  }
  return total / static_cast<double>(z.size());
}

inline double focal_direct(std::span<const double> z, std::span<const double> y, double gamma, double w) {
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-z[i]));
    const double pt = y[i] * p + (1.0 - y[i]) * (1.0 - p);
    const double bce = -(w * y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
    total += std::pow(1.0 - pt, gamma) * bce;
  }
  return total / static_cast<double>(z.size());
}

inline amfkit::Matrix random_unit_rows(amfkit::Rng& rng, std::size_t n, std::size_t d) {
  amfkit::Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      m(i, c) = rng.normal();
      s += m(i, c) * m(i, c);
    }
    for (std::size_t c = 0; c < d; ++c) m(i, c) /= std::sqrt(s);
  }
  return m;
}

inline double cosine(const amfkit::Matrix& e, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t c = 0; c < e.cols(); ++c) s += e(a, c) * e(b, c);
  return s;
}

// A negative survives if it is within eps of beating at least one positive,
// and symmetrically for positives.
inline amfkit::MinedPairs mine_exhaustive(const amfkit::Matrix& e, const std::vector<int>& labels, double eps) {
  const std::size_t n = labels.size();
  amfkit::MinedPairs out;
  out.positives.resize(n);
  out.negatives.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      (labels[j] == labels[a] ? pos : neg).push_back(j);
    }
    if (pos.empty() || neg.empty()) continue;
    for (auto q : neg) {
      bool keep = false;
      for (auto p : pos) keep = keep || cosine(e, a, q) > cosine(e, a, p) - eps;
      if (keep) out.negatives[a].push_back(q);
    }
    for (auto p : pos) {
      bool keep = false;
      for (auto q : neg) keep = keep || cosine(e, a, p) < cosine(e, a, q) + eps;
      if (keep) out.positives[a].push_back(p);
    }
  }
  return out;
}

inline double supcon_direct(const amfkit::Matrix& e, const amfkit::MinedPairs& m, double tau, bool full) {
  double total = 0.0;
  std::size_t anchors = 0;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    if (m.positives[i].empty()) continue;
    std::set<std::size_t> denom;
    if (full) {
      for (std::size_t a = 0; a < e.rows(); ++a)
        if (a != i) denom.insert(a);
    } else {
      denom.insert(m.positives[i].begin(), m.positives[i].end());
      denom.insert(m.negatives[i].begin(), m.negatives[i].end());
    }
    double z = 0.0;
    for (auto a : denom) z += std::exp(cosine(e, i, a) / tau);
    double li = 0.0;
    for (auto p : m.positives[i]) li -= std::log(std::exp(cosine(e, i, p) / tau) / z);
    total += li / static_cast<double>(m.positives[i].size());
    ++anchors;
  }
  return anchors ? total / static_cast<double>(anchors) : 0.0;
}

// Fraction of (positive, negative) pairs ranked correctly, ties counting half.
inline double auc_pairs(std::span<const double> s, std::span<const int> y) {
  double good = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return good / static_cast<double>(pairs);
}

}  // namespace oracle
