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

#include "amfkit/errors.hpp"
#include "amfkit/sampling.hpp"

using namespace amfkit;

namespace {

DatasetTable table_of(const std::vector<double>& labels, const std::vector<std::string>& domains) {
  std::vector<Sample> s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "x%03zu", i);
    s.push_back(Sample{id, domains[i], labels[i], {static_cast<double>(i)}, std::nullopt});
  }
  return DatasetTable(s);
}

DatasetTable one_domain(std::size_t neg, std::size_t pos) {
  std::vector<double> labels(neg, 0.0);
  labels.resize(neg + pos, 1.0);
  return table_of(labels, std::vector<std::string>(labels.size(), "a"));
}

}  // namespace

TEST_CASE("hard_set_size is the ceiling of fraction * N") {
  CHECK(hard_set_size(0.3, 10) == 3);
  CHECK(hard_set_size(0.3, 0) == 0);
  CHECK(hard_set_size(0.3, 1) == 1);
  CHECK(hard_set_size(0.3, 11) == 4);
  CHECK(hard_set_size(0.3, 100) == 30);
  CHECK(hard_set_size(0.3, 101) == 31);
  CHECK(hard_set_size(0.7, 10) == 7);
  for (std::size_t n = 1; n < 5000; ++n) {
    // Integer form of ceil(3n/10).
    CHECK(hard_set_size(0.3, n) == (3 * n + 9) / 10);
  }
}

TEST_CASE("single domain, 9 negatives and 1 positive: positive drawn half the time") {
  const DatasetTable t = one_domain(9, 1);
  const auto w = compute_weights(t, std::vector<bool>(10, false));
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  CHECK(w[9] / total == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(total == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("class mass balance is exact without flags") {
  for (auto [neg, pos] : {std::pair<std::size_t, std::size_t>{9, 1}, {97, 3}, {1000, 148}, {5, 5}}) {
    const DatasetTable t = one_domain(neg, pos);
    const auto w = compute_weights(t, std::vector<bool>(t.size(), false));
    double mp = 0.0, mn = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) (t[i].label >= 0.5 ? mp : mn) += w[i];
    CHECK(mp == doctest::Approx(mn).epsilon(1e-14));
    double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("domain mass is balanced when classes are balanced within domains") {
  std::vector<double> labels;
  std::vector<std::string> domains;
  const std::pair<const char*, std::size_t> sizes[] = {{"a", 4}, {"b", 20}, {"c", 10}};
  for (auto [d, n] : sizes)
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back(i % 2 == 0 ? 1.0 : 0.0);
      domains.push_back(d);
    }
  const DatasetTable t = table_of(labels, domains);
  const auto w = compute_weights(t, std::vector<bool>(t.size(), false));
  std::map<std::string, double> mass;
  for (std::size_t i = 0; i < t.size(); ++i) mass[t[i].domain] += w[i];
  CHECK(mass["a"] == doctest::Approx(mass["b"]).epsilon(1e-14));
  CHECK(mass["b"] == doctest::Approx(mass["c"]).epsilon(1e-14));
}

TEST_CASE("balanced table gives equal weights; flagging doubles relative to a twin") {
  const DatasetTable t = one_domain(5, 5);
  const auto w = compute_weights(t, std::vector<bool>(10, false));
  for (double v : w) CHECK(v == doctest::Approx(1.0));

  std::vector<bool> flags(10, false);
  flags[0] = true;
  const auto wf = compute_weights(t, flags);
  CHECK(wf[0] / wf[1] == doctest::Approx(2.0).epsilon(1e-15));

  SamplerConfig uniform;
  uniform.mode = SamplerMode::kUniform;
  const auto wu = compute_weights(one_domain(9, 1), flags, uniform);
  CHECK(wu[0] / wu[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(wu[1] == wu[9]);
}

TEST_CASE("draw_batch: dominant weight") {
  SamplerState s;
  s.weights = {1e6, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  s.hard_flags.assign(10, false);
  Rng rng(5);
  const auto draws = draw_batch(s, rng, 10000);
  const auto hits = std::count(draws.begin(), draws.end(), std::size_t{0});
  CHECK(static_cast<double>(hits) / 10000 > 0.99);

  const auto batch = draw_batch(s, rng, 10);
  CHECK(std::count(batch.begin(), batch.end(), std::size_t{0}) >= 9);
}

TEST_CASE("draw_batch: equal weights pass a chi-square uniformity test") {
  SamplerState s;
  const std::size_t k = 20;
  s.weights.assign(k, 1.0);
  s.hard_flags.assign(k, false);
  Rng rng(77);
  const std::size_t n = 100000;
  std::vector<double> counts(k, 0.0);
  for (auto i : draw_batch(s, rng, n)) counts[i] += 1.0;
  double chi2 = 0.0;
  const double e = static_cast<double>(n) / k;
  for (double c : counts) chi2 += (c - e) * (c - e) / e;
  // Upper 0.001 quantile of chi-square with 19 degrees of freedom.
  CHECK(chi2 < 43.82);
}

TEST_CASE("draw_batch converges to arbitrary weights within 3 sigma") {
  SamplerState s;
  s.weights = {0.1, 0.5, 1.0, 2.0, 4.0, 0.4, 2.0};
  s.hard_flags.assign(s.weights.size(), false);
  const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  Rng rng(13);
  const std::size_t n = 100000;
  std::vector<double> counts(s.weights.size(), 0.0);
  for (auto i : draw_batch(s, rng, n)) counts[i] += 1.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double p = s.weights[i] / total;
    CHECK(std::abs(counts[i] - n * p) <= 3.0 * std::sqrt(n * p * (1 - p)));
  }
  Rng a(4), b(4);
  CHECK(draw_batch(s, a, 50) == draw_batch(s, b, 50));
}

TEST_CASE("mine_hard: ceiling count, ordering and tie-break") {
  const DatasetTable t = one_domain(6, 4);  // ids x000..x009, x006.. positive
  std::vector<double> pred(10, 0.0);
  for (std::size_t i = 6; i < 10; ++i) pred[i] = 1.0;
  // p_hat = y everywhere: all difficulties zero, ties resolved by id.
  auto r = mine_hard(t, pred, 0.3);
  CHECK(r.selected_indices.size() == 3);
  CHECK(std::count(r.selected.begin(), r.selected.end(), true) == 3);
  CHECK(r.threshold == 0.0);
  CHECK(r.selected[0]);
  CHECK(r.selected[1]);
  CHECK(r.selected[2]);

  pred[4] = 0.9;  // y=0, p_hat=0.9
  pred[8] = 0.2;  // y=1, d=0.8
  r = mine_hard(t, pred, 0.3);
  CHECK(r.selected_indices[0] == 4);
  CHECK(r.difficulty[4] == doctest::Approx(0.9));
  CHECK(r.selected_indices[1] == 8);
  CHECK(r.selected_indices[2] == 0);

  CHECK_THROWS_AS(mine_hard(t, std::vector<double>(3, 0.5), 0.3), ValidationError);
}

TEST_CASE("mine_hard equals a full-sort oracle") {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(80);
    std::vector<double> labels(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<double>(rng.uniform_index(4)) / 3.0;
      // Coarse predictions force plenty of ties.
      pred[i] = static_cast<double>(rng.uniform_index(6)) / 5.0;
    }
    const DatasetTable t = table_of(labels, std::vector<std::string>(n, "a"));
    const auto r = mine_hard(t, pred, 0.3);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double da = std::abs(pred[a] - labels[a]), db = std::abs(pred[b] - labels[b]);
      return da != db ? da > db : t[a].id < t[b].id;
    });
    order.resize((3 * n + 9) / 10);
    CHECK(r.selected_indices == order);
  }
}

TEST_CASE("refresh: idempotent, flag count, boundary-only changes") {
  Rng rng(23);
  const std::size_t n = 50;
  std::vector<double> labels(n), pred(n);
  std::vector<std::string> domains(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = rng.uniform() < 0.2 ? 1.0 : 0.0;
    domains[i] = i % 3 == 0 ? "p" : "q";
    pred[i] = rng.uniform();
  }
  const DatasetTable t = table_of(labels, domains);
  const SamplerState s0 = initial_state(t);
  CHECK(std::count(s0.hard_flags.begin(), s0.hard_flags.end(), true) == 0);
  const SamplerState s1 = refresh(s0, t, pred);
  CHECK(s1.epoch == s0.epoch + 1);
  CHECK(std::count(s1.hard_flags.begin(), s1.hard_flags.end(), true) == 15);
  for (double w : s1.weights) CHECK(w > 0.0);

  SamplerState s2 = refresh(s1, t, pred), s3 = refresh(s1, t, pred);
  CHECK(s2 == s3);
  s2.epoch = s1.epoch;
  CHECK(s2 == s1);  // same predictions, same flags and weights

  // Perturbing one prediction can only swap membership at the boundary.
  const auto before = mine_hard(t, pred, 0.3);
  for (std::size_t k = 0; k < n; ++k) {
    auto changed = pred;
    changed[k] = 1.0 - changed[k];
    const auto after = refresh(s1, t, changed);
    std::size_t diffs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (after.hard_flags[i] == s1.hard_flags[i]) continue;
      ++diffs;
      if (i == k) continue;
      // Any other sample that changed sits at the old selection boundary.
      const bool was_last_selected = i == before.selected_indices.back();
      const double d = before.difficulty[i];
      bool was_first_unselected = !s1.hard_flags[i];
      for (std::size_t j = 0; j < n && was_first_unselected; ++j)
        if (!s1.hard_flags[j] && j != i && j != k &&
            (before.difficulty[j] > d || (before.difficulty[j] == d && t[j].id < t[i].id)))
          was_first_unselected = false;
      CHECK((was_last_selected || was_first_unselected));
    }
    CHECK(diffs <= 2);
  }

  SamplerConfig no_mining;
  no_mining.hard_mining = false;
  const SamplerState off = refresh(s0, t, pred, no_mining);
  CHECK(std::count(off.hard_flags.begin(), off.hard_flags.end(), true) == 0);
}

TEST_CASE("difficulty CSV export") {
  const DatasetTable t = one_domain(2, 1);
  const auto r = mine_hard(t, std::vector<double>{0.5, 0.0, 0.25}, 0.3);
  CHECK(format_difficulty_csv(t, r) == "id,difficulty,selected\nx000,0.5,0\nx001,0,0\nx002,0.75,1\n");
}
