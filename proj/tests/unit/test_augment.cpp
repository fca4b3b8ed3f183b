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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "amfkit/augment.hpp"
#include "amfkit/errors.hpp"

using namespace amfkit;

namespace {

Matrix distinct_patch(std::size_t h, std::size_t w) {
  Matrix m(h, w);
  for (std::size_t k = 0; k < m.size(); ++k) m.data()[k] = static_cast<double>(k + 1);
  return m;
}

Matrix random_patch(Rng& rng, std::size_t h, std::size_t w) {
  Matrix m(h, w);
  for (auto& v : m.data()) v = rng.uniform();
  return m;
}

double mean_of(const Matrix& m) {
  return std::accumulate(m.data().begin(), m.data().end(), 0.0) / static_cast<double>(m.size());
}

}  // namespace

TEST_CASE("mixup endpoints, midpoint and convexity") {
  const std::vector<double> x1{1.0, -2.0, 3.0}, x2{0.5, 4.0, 3.0};
  const auto id = mixup(x1, 1.0, 2, x2, 0.0, 0, 1.0, 3);
  CHECK(id.features == x1);
  CHECK(id.label == 1.0);
  CHECK(id.domain_target == std::vector<double>{0.0, 0.0, 1.0});

  const auto mid = mixup(x1, 1.0, 2, x2, 0.0, 0, 0.5, 3);
  CHECK(mid.label == 0.5);
  CHECK(mid.domain_target == std::vector<double>{0.5, 0.0, 0.5});

  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const double lam = rng.uniform();
    const auto m = mixup(x1, rng.uniform(), 0, x2, rng.uniform(), 1, lam, 2);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(m.features[k] >= std::min(x1[k], x2[k]) - 1e-15);
      CHECK(m.features[k] <= std::max(x1[k], x2[k]) + 1e-15);
    }
    CHECK(m.domain_target[0] + m.domain_target[1] == doctest::Approx(1.0));
    const auto self = mixup(x1, 0.25, 1, x1, 0.25, 1, lam, 2);
    CHECK(self.label == doctest::Approx(0.25).epsilon(1e-15));
    for (std::size_t k = 0; k < 3; ++k) CHECK(self.features[k] == doctest::Approx(x1[k]).epsilon(1e-15));
    CHECK(self.domain_target[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(mixup(x1, 0, 0, std::vector<double>{1.0}, 0, 0, 0.5, 1), ValidationError);
  CHECK_THROWS_AS(mixup(x1, 0, 0, x2, 0, 0, 1.5, 1), ValidationError);
}

TEST_CASE("default alphas per variant") {
  CHECK(default_mixup_alpha(MixupMode::kStandard) == 0.2);
  CHECK(default_mixup_alpha(MixupMode::kStrong) == 1.0);
  CHECK(default_mixup_alpha(MixupMode::kDomainAware) == 0.2);
}

TEST_CASE("pair_selector: domain-aware pairing rules") {
  Rng rng(1);
  const std::vector<std::size_t> distinct{0, 1, 2, 3, 4};
  const auto p = pair_selector(distinct, MixupMode::kDomainAware, rng);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == i);

  const std::vector<std::size_t> domains{0, 1, 0, 1, 1, 2, 0};
  for (int t = 0; t < 500; ++t) {
    const auto q = pair_selector(domains, MixupMode::kDomainAware, rng);
    for (std::size_t i = 0; i < q.size(); ++i) {
      CHECK(domains[q[i]] == domains[i]);
      if (domains[i] != 2) CHECK(q[i] != i);
    }
    CHECK(q[5] == 5);
    const auto c = pair_selector(domains, MixupMode::kDomainAware, rng, true);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(domains[c[i]] != domains[i]);
  }
}

TEST_CASE("pair_selector: standard mode covers every partner") {
  Rng rng(2);
  const std::vector<std::size_t> domains(8, 0);
  std::vector<std::set<std::size_t>> seen(8);
  for (int t = 0; t < 10000; ++t) {
    const auto p = pair_selector(domains, MixupMode::kStandard, rng);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(p[i] != i);
      seen[i].insert(p[i]);
    }
  }
  for (const auto& s : seen) CHECK(s.size() == 7);
}

TEST_CASE("apply_mixup: off, forced, probability zero") {
  Rng rng(4);
  Matrix x(4, 2);
  for (auto& v : x.data()) v = rng.normal();
  const std::vector<double> y{1, 0, 0, 1};
  const std::vector<std::size_t> d{0, 0, 1, 1};

  MixupConfig cfg;
  const auto off = apply_mixup(x, y, d, 2, cfg, rng);
  CHECK_FALSE(off.mixed);
  CHECK(off.features == x);
  CHECK(off.domain_targets(2, 1) == 1.0);

  cfg.mode = MixupMode::kStrong;
  cfg.alpha = 1.0;
  const auto on = apply_mixup(x, y, d, 2, cfg, rng);
  CHECK(on.mixed);
  CHECK(on.lambda >= 0.0);
  CHECK(on.lambda <= 1.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(on.domain_targets(i, 0) + on.domain_targets(i, 1) == doctest::Approx(1.0));

  cfg.apply_probability = 0.0;
  CHECK_FALSE(apply_mixup(x, y, d, 2, cfg, rng).mixed);

  cfg.apply_probability = 1.0;
  Rng a(9), b(9);
  const auto ra = apply_mixup(x, y, d, 2, cfg, a), rb = apply_mixup(x, y, d, 2, cfg, b);
  CHECK(ra.features == rb.features);
  CHECK(ra.labels == rb.labels);
}

TEST_CASE("dihedral transforms on a 4x4 patch of distinct values") {
  const Matrix p = distinct_patch(4, 4);
  CHECK(flip_rotate90(p, 0) == p);

  // Code 1 rotates counter-clockwise: the top-right corner moves to the top-left.
  CHECK(flip_rotate90(p, 1)(0, 0) == p(0, 3));
  // Code 4 mirrors left-right.
  CHECK(flip_rotate90(p, 4)(0, 0) == p(0, 3));
  CHECK(flip_rotate90(p, 4)(2, 1) == p(2, 2));

  Matrix r = p;
  for (int i = 0; i < 4; ++i) r = flip_rotate90(r, 1);
  CHECK(r == p);

  std::set<std::vector<double>> images;
  for (int a = 0; a < 8; ++a) {
    const Matrix pa = flip_rotate90(p, a);
    images.insert(std::vector<double>(pa.data().begin(), pa.data().end()));
    CHECK(flip_rotate90(pa, dihedral_inverse(a)) == p);
    for (int b = 0; b < 8; ++b) {
      // Closure: the composite is again one of the eight transforms.
      const Matrix ab = flip_rotate90(pa, b);
      CHECK(ab == flip_rotate90(p, dihedral_compose(a, b)));
    }
  }
  CHECK(images.size() == 8);

  const Matrix wide = distinct_patch(2, 4);
  CHECK_THROWS_AS(flip_rotate90(wide, 1), ValidationError);
  CHECK(flip_rotate90(wide, 2)(0, 0) == wide(1, 3));
  CHECK_THROWS_AS(flip_rotate90(p, 8), ValidationError);
}

TEST_CASE("cutout: identity at side 0, pixel count, mean preservation") {
  Rng rng(6);
  const Matrix p = distinct_patch(10, 12);
  CHECK(cutout(p, rng, 0.0) == p);
  CHECK(cutout(p, rng, 0.05) == p);  // floor(0.5) = 0

  for (int t = 0; t < 200; ++t) {
    const Matrix q = random_patch(rng, 6 + rng.uniform_index(10), 6 + rng.uniform_index(10));
    const double frac = rng.uniform(0.1, 0.9);
    const Matrix out = cutout(q, rng, frac);
    const auto side = static_cast<std::size_t>(std::floor(frac * static_cast<double>(std::min(q.rows(), q.cols()))));
    std::size_t changed = 0;
    for (std::size_t k = 0; k < q.size(); ++k) changed += out.data()[k] != q.data()[k];
    // The hole takes its own mean, so a single-pixel hole keeps its value.
    CHECK(changed == (side >= 2 ? side * side : 0));
    CHECK(std::abs(mean_of(out) - mean_of(q)) <= 1e-9);
  }
  CHECK_THROWS_AS(cutout(p, rng, 1.0), ValidationError);
}

TEST_CASE("RASS: beta 0 is the identity") {
  Rng rng(8);
  const Matrix p = random_patch(rng, 16, 8);
  const auto r = rass_detailed(p, RassConfig{0.0, 0.25}, rng);
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(std::abs(r.output.data()[k] - p.data()[k]) <= 1e-9);
}

TEST_CASE("RASS: constant patch scales with the DC multiplier, then clamps") {
  Rng rng(10);
  const Matrix c(8, 8, 0.7);
  const auto r = rass_detailed(c, RassConfig{0.3, 0.25}, rng);
  const double u = r.multipliers(0, 0);
  CHECK(u >= 0.7);
  CHECK(u <= 1.3);
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(r.unclamped.data()[k] == doctest::Approx(u * 0.7).epsilon(1e-12));
    CHECK(r.output.data()[k] == std::clamp(u * 0.7, 0.7, 0.7));
  }
}

TEST_CASE("RASS: phase kept, spectrum symmetric, output in range") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Matrix p = random_patch(rng, 8, 16);
    const RassConfig cfg{0.3, 0.5};
    const auto r = rass_detailed(p, cfg, rng);
    CHECK(r.max_imag_residue < 1e-9);

    const auto before = fft2d(ComplexGrid::from_real(p), false);
    const auto after = fft2d(ComplexGrid::from_real(r.unclamped), false);
    for (std::size_t k = 0; k < before.values.size(); ++k) {
      if (std::abs(before.values[k]) <= 1e-9) continue;
      // Multipliers are positive, so the angle is unchanged.
      CHECK(std::abs(std::arg(after.values[k] / before.values[k])) <= 1e-6);
      CHECK(std::abs(after.values[k]) == doctest::Approx(std::abs(before.values[k]) * r.multipliers.data()[k]).epsilon(1e-9));
    }
    const auto [lo, hi] = std::minmax_element(p.data().begin(), p.data().end());
    for (double v : r.output.data()) {
      CHECK(v >= *lo);
      CHECK(v <= *hi);
    }
    // Multipliers only differ from 1 inside the low-frequency disc, and share values across conjugates.
    for (std::size_t ky = 0; ky < 8; ++ky)
      for (std::size_t kx = 0; kx < 16; ++kx)
        CHECK(r.multipliers(ky, kx) == r.multipliers((8 - ky) % 8, (16 - kx) % 16));
    CHECK(r.multipliers(4, 8) == 1.0);
  }
}

TEST_CASE("RASS: power-of-two requirement, padding helpers, determinism") {
  Rng rng(14);
  const Matrix odd = random_patch(rng, 5, 7);
  CHECK_THROWS_AS(rass(odd, RassConfig{}, rng), ValidationError);
  const Matrix padded = pad_to_power_of_two(odd);
  CHECK(padded.rows() == 8);
  CHECK(padded.cols() == 8);
  CHECK(padded(7, 7) == odd(4, 6));
  CHECK(crop(padded, 5, 7) == odd);
  const Matrix any = rass_any_size(odd, RassConfig{0.0, 0.25}, rng);
  for (std::size_t k = 0; k < odd.size(); ++k) CHECK(std::abs(any.data()[k] - odd.data()[k]) <= 1e-9);

  Rng a(3), b(3);
  CHECK(rass(padded, RassConfig{}, a) == rass(padded, RassConfig{}, b));
  CHECK_THROWS_AS((RassConfig{1.0, 0.25}.validate()), ValidationError);
}
