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

#include "amfkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amfkit/datamodel.hpp"
#include "amfkit/format.hpp"
#include "amfkit/losses.hpp"
#include "amfkit/model.hpp"
#include "amfkit/numerics.hpp"

namespace amfkit {

std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = probe[k];
    probe[k] = orig + step;
    const double up = f(probe);
    probe[k] = orig - step;
    const double down = f(probe);
    probe[k] = orig;
    g[k] = (up - down) / (2.0 * step);
  }
  return g;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric, double abs_floor) {
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double diff = std::abs(analytic[k] - numeric[k]);
    if (diff <= abs_floor) continue;
    const double scale = std::max(std::abs(analytic[k]), std::abs(numeric[k]));
    worst = std::max(worst, diff / scale);
  }
  return worst;
}

double max_absolute_error(std::span<const double> analytic, std::span<const double> numeric) {
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) worst = std::max(worst, std::abs(analytic[k] - numeric[k]));
  return worst;
}

namespace {

class Tally {
 public:
  Tally(std::string name, const GradcheckOptions& opt) : opt_(opt) { result_.name = std::move(name); }

  void compare(std::vector<double> analytic, std::span<const double> numeric) {
    if (opt_.corrupt)
      for (auto& a : analytic) a = a * 1.01 + 1e-3;
    const double err = max_relative_error(analytic, numeric, opt_.abs_floor);
    result_.max_rel_error = std::max(result_.max_rel_error, err);
    result_.max_abs_error = std::max(result_.max_abs_error, max_absolute_error(analytic, numeric));
    result_.entries += analytic.size();
    if (err > opt_.rel_tol) result_.passed = false;
  }
  void finish_configuration() { ++result_.configurations; }
  GradcheckComponent result() const { return result_; }

 private:
  const GradcheckOptions& opt_;
  GradcheckComponent result_;
};

std::size_t draw_between(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.uniform_index(hi - lo + 1); }

Matrix random_unit_rows(Rng& rng, std::size_t n, std::size_t d) {
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (auto& v : m.row(i)) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : m.row(i)) v /= norm;
  }
  return m;
}

std::vector<int> labels_with_both_classes(Rng& rng, std::size_t n) {
  std::vector<int> y(n);
  for (auto& v : y) v = rng.uniform() < 0.5 ? 1 : 0;
  y[0] = 1;
  y[1] = 0;
  rng.shuffle(y);
  return y;
}

GradcheckComponent check_focal(const GradcheckOptions& opt, Rng rng) {
  Tally tally("focal", opt);
  const double gammas[] = {0.0, 1.0, 2.0};
  const double weights[] = {1.0, 5.741};
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t n = draw_between(rng, 1, 16);
    const bool soft = t % 2 == 1;
    FocalParams p;
    p.gamma = gammas[t % 3];
    p.pos_weight = weights[(t / 3) % 2];
    std::vector<double> z(n), y(n);
    for (auto& v : z) v = rng.uniform(-6.0, 6.0);
    for (auto& v : y) v = soft ? static_cast<double>(rng.uniform_index(4)) / 3.0 : static_cast<double>(rng.uniform_index(2));
    auto f = [&](std::span<const double> zz) { return focal_loss(zz, y, p).loss; };
    tally.compare(focal_loss(z, y, p).grad, numerical_gradient(f, z, opt.step));
    tally.finish_configuration();
  }
  return tally.result();
}

GradcheckComponent check_supcon(const GradcheckOptions& opt, Rng rng) {
  Tally tally("supcon", opt);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t n = draw_between(rng, 4, 16);
    const std::size_t d = draw_between(rng, 2, 8);
    const double tau = t % 3 == 0 ? 0.1 : rng.uniform(0.1, 1.0);
    const bool full = t % 4 == 3;
    Matrix e;
    std::vector<int> labels;
    MinedPairs mined;
    do {
      e = random_unit_rows(rng, n, d);
      labels = labels_with_both_classes(rng, n);
      mined = ms_mine(e, labels, 0.1);
    } while (mined.empty());
    auto f = [&](std::span<const double> flat) {
      Matrix m(n, d, std::vector<double>(flat.begin(), flat.end()));
      return supcon_loss(m, mined, tau, full).loss;
    };
    auto analytic = supcon_loss(e, mined, tau, full).grad;
    tally.compare(std::vector<double>(analytic.data().begin(), analytic.data().end()),
                  numerical_gradient(f, e.data(), opt.step));
    tally.finish_configuration();
  }
  return tally.result();
}

GradcheckComponent check_domain(const GradcheckOptions& opt, Rng rng) {
  Tally tally("domain_grl", opt);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::size_t n = draw_between(rng, 1, 16);
    const std::size_t classes = draw_between(rng, 2, 10);
    const std::size_t width = draw_between(rng, 2, 8);
    DomainLossParams p{rng.uniform(0.05, 1.0), rng.uniform(0.0, 2.0)};

    Matrix head(classes, width), hidden(n, width), targets(n, classes);
    for (auto& v : head.data()) v = rng.normal();
    for (auto& v : hidden.data()) v = rng.normal();
    const bool mixed = t % 2 == 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = rng.uniform_index(classes);
      const std::size_t b = rng.uniform_index(classes);
      const double lam = mixed ? rng.uniform() : 1.0;
      targets(i, a) += lam;
      targets(i, b) += 1.0 - lam;
    }
    auto logits_of = [&](std::span<const double> h_flat) {
      Matrix h(n, width, std::vector<double>(h_flat.begin(), h_flat.end()));
      return matmul(h, head.transposed());
    };

    // Head side: plain softmax cross-entropy gradient.
    const Matrix logits = logits_of(hidden.data());
    const auto res = grl_domain_loss(logits, targets, p);
    auto f_logits = [&](std::span<const double> z) {
      return grl_domain_loss(Matrix(n, classes, std::vector<double>(z.begin(), z.end())), targets, p).loss;
    };
    tally.compare(std::vector<double>(res.grad_logits.data().begin(), res.grad_logits.data().end()),
                  numerical_gradient(f_logits, logits.data(), opt.step));

    // Feature side: reversed gradient must equal -grl_scale times the true one.
    const Matrix reversed = matmul(res.grad_logits, head);
    std::vector<double> analytic(reversed.data().begin(), reversed.data().end());
    for (auto& v : analytic) v *= res.feature_grad_scale;
    auto f_hidden = [&](std::span<const double> h) { return grl_domain_loss(logits_of(h), targets, p).loss; };
    auto numeric = numerical_gradient(f_hidden, hidden.data(), opt.step);
    for (auto& v : numeric) v *= -p.grl_scale;
    tally.compare(std::move(analytic), numeric);
    tally.finish_configuration();
  }
  return tally.result();
}

GradcheckComponent check_model(const GradcheckOptions& opt, Rng rng) {
  Tally tally("model_composite", opt);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    NetConfig cfg;
    cfg.input_dim = draw_between(rng, 2, 6);
    cfg.hidden_dims.clear();
    const std::size_t depth = draw_between(rng, 1, 2);
    for (std::size_t l = 0; l < depth; ++l) cfg.hidden_dims.push_back(draw_between(rng, 3, 8));
    cfg.domain_count = draw_between(rng, 2, 4);
    cfg.activation = t % 2 == 0 ? Activation::kTanh : Activation::kRelu;
    const std::size_t n = draw_between(rng, 4, 12);

    LossParams params;
    params.focal.gamma = 2.0;
    params.focal.pos_weight = rng.uniform(1.0, 6.0);
    params.contrastive.weight = 0.5;
    params.domain.weight = 0.1;
    params.domain.grl_scale = 1.0;

    NetState net;
    Matrix x;
    BatchTargets targets;
    MinedPairs mined;
    ForwardTrace trace;
    for (int attempt = 0;; ++attempt) {
      cfg.seed = rng.next_u64();
      net = init(cfg);
      for (auto& b : net.params) b += 0.1 * rng.normal();  // non-zero biases
      x = Matrix(n, cfg.input_dim);
      for (auto& v : x.data()) v = rng.normal();
      const auto hard = labels_with_both_classes(rng, n);
      targets.labels.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        targets.labels[i] = hard[i] == 1 ? (rng.uniform() < 0.5 ? 1.0 : 2.0 / 3.0) : (rng.uniform() < 0.5 ? 0.0 : 1.0 / 3.0);
      targets.domain_targets = Matrix(n, cfg.domain_count);
      for (std::size_t i = 0; i < n; ++i) {
        const double lam = rng.uniform();
        targets.domain_targets(i, rng.uniform_index(cfg.domain_count)) += lam;
        targets.domain_targets(i, rng.uniform_index(cfg.domain_count)) += 1.0 - lam;
      }
      trace = forward(net, x);
      mined = ms_mine(trace.embedding, hard, params.contrastive.miner_epsilon);
      // Central differences are meaningless across a ReLU kink or a
      // vanishing embedding norm; redraw such configurations.
      double min_pre = std::numeric_limits<double>::infinity();
      if (cfg.activation == Activation::kRelu)
        for (const auto& pre : trace.pre)
          for (double v : pre.data()) min_pre = std::min(min_pre, std::abs(v));
      const double min_norm = *std::min_element(trace.hidden_norm.begin(), trace.hidden_norm.end());
      if ((min_pre > 1e-3 && min_norm > 1e-2 && !mined.empty()) || attempt > 100) break;
    }

    auto loss_of = [&](std::span<const double> theta) {
      NetState probe = net;
      std::copy(theta.begin(), theta.end(), probe.params.begin());
      const ForwardTrace tr = forward(probe, x);
      BatchOutputs out{tr.class_logits, tr.embedding, tr.domain_logits};
      return composite_loss(out, targets, params, &mined).breakdown.total;
    };
    BatchOutputs outputs{trace.class_logits, trace.embedding, trace.domain_logits};
    const auto loss = composite_loss(outputs, targets, params, &mined);
    // +1: the true gradient of the total; reversal is checked in domain_grl.
    UpstreamGrads up{loss.grad_logits, loss.grad_embeddings, loss.grad_domain_logits, 1.0};
    tally.compare(backward(net, trace, up), numerical_gradient(loss_of, net.params, opt.step));
    tally.finish_configuration();
  }
  return tally.result();
}

}  // namespace

std::vector<GradcheckComponent> run_gradcheck(const GradcheckOptions& options) {
  const Rng master(options.seed);
  return {check_focal(options, master.split("focal")), check_supcon(options, master.split("supcon")),
          check_domain(options, master.split("domain")), check_model(options, master.split("model"))};
}

std::string format_gradcheck(const std::vector<GradcheckComponent>& results) {
  std::string out;
  for (const auto& r : results) {
    out += (r.passed ? "PASS " : "FAIL ") + r.name + " configurations=" + std::to_string(r.configurations) +
           " entries=" + std::to_string(r.entries) + " max_rel_error=" + format_real(r.max_rel_error) +
           " max_abs_error=" + format_real(r.max_abs_error) + "\n";
  }
  return out;
}

}  // namespace amfkit
