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

#include "amfkit/model.hpp"

#include <bit>
#include <cmath>

#include "amfkit/errors.hpp"
#include "amfkit/format.hpp"

namespace amfkit {

void NetConfig::validate() const {
  if (input_dim == 0) throw ValidationError("net.input_dim must be positive");
  if (hidden_dims.empty()) throw ValidationError("net.hidden_dims must be non-empty");
  for (auto h : hidden_dims)
    if (h == 0) throw ValidationError("net.hidden_dims entries must be positive");
  if (domain_count == 0) throw ValidationError("net.domain_count must be >= 1");
}

NetLayout make_layout(const NetConfig& config) {
  config.validate();
  NetLayout layout;
  std::size_t offset = 0;
  auto add = [&](std::size_t in, std::size_t out) {
    AffineSlot slot{offset, offset + in * out, in, out};
    offset += in * out + out;
    return slot;
  };
  std::size_t in = config.input_dim;
  for (auto h : config.hidden_dims) {
    layout.trunk.push_back(add(in, h));
    in = h;
  }
  layout.class_head = add(in, 1);
  layout.domain_head = add(in, config.domain_count);
  layout.parameter_count = offset;
  return layout;
}

double init_bound(Activation activation, std::size_t fan_in, std::size_t fan_out, bool is_head) {
  if (!is_head && activation == Activation::kRelu) return std::sqrt(6.0 / static_cast<double>(fan_in));
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

NetState init(const NetConfig& config) {
  NetState s;
  s.config = config;
  s.layout = make_layout(config);
  s.params.assign(s.layout.parameter_count, 0.0);
  s.adam_m.assign(s.layout.parameter_count, 0.0);
  s.adam_v.assign(s.layout.parameter_count, 0.0);
  Rng rng = Rng(config.seed).split("init");
  auto fill = [&](const AffineSlot& slot, bool is_head) {
    const double bound = init_bound(config.activation, slot.in, slot.out, is_head);
    for (std::size_t k = 0; k < slot.in * slot.out; ++k) s.params[slot.weight + k] = rng.uniform(-bound, bound);
  };
  for (const auto& slot : s.layout.trunk) fill(slot, false);
  fill(s.layout.class_head, true);
  fill(s.layout.domain_head, true);
  return s;
}

namespace {

// out = in * W^T + b for the slot's block.
Matrix affine(const Matrix& in, std::span<const double> params, const AffineSlot& slot) {
  Matrix out(in.rows(), slot.out);
  for (std::size_t i = 0; i < in.rows(); ++i) {
    auto x = in.row(i);
    auto y = out.row(i);
    for (std::size_t o = 0; o < slot.out; ++o) {
      const double* w = params.data() + slot.weight + o * slot.in;
      double acc = params[slot.bias + o];
      for (std::size_t k = 0; k < slot.in; ++k) acc += w[k] * x[k];
      y[o] = acc;
    }
  }
  return out;
}

// Accumulates dW += g^T x, db += sum(g), and returns dx = g W.
Matrix affine_backward(const Matrix& x, const Matrix& g, std::span<const double> params, const AffineSlot& slot,
                       std::vector<double>& grads, bool need_dx) {
  Matrix dx = need_dx ? Matrix(x.rows(), slot.in) : Matrix();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto xi = x.row(i);
    auto gi = g.row(i);
    for (std::size_t o = 0; o < slot.out; ++o) {
      const double go = gi[o];
      if (go == 0.0) continue;
      double* dw = grads.data() + slot.weight + o * slot.in;
      for (std::size_t k = 0; k < slot.in; ++k) dw[k] += go * xi[k];
      grads[slot.bias + o] += go;
      if (need_dx) {
        const double* w = params.data() + slot.weight + o * slot.in;
        auto dxi = dx.row(i);
        for (std::size_t k = 0; k < slot.in; ++k) dxi[k] += go * w[k];
      }
    }
  }
  return dx;
}

constexpr double kMinNorm = 1e-12;

}  // namespace

ForwardTrace forward(const NetState& state, const Matrix& features) {
  if (features.cols() != state.config.input_dim) {
    throw ValidationError("forward: feature dimension " + std::to_string(features.cols()) + ", network expects " +
                          std::to_string(state.config.input_dim));
  }
  ForwardTrace t;
  t.input = features;
  const Matrix* prev = &t.input;
  for (const auto& slot : state.layout.trunk) {
    t.pre.push_back(affine(*prev, state.params, slot));
    Matrix a = t.pre.back();
    for (auto& v : a.data()) v = state.config.activation == Activation::kRelu ? std::max(v, 0.0) : std::tanh(v);
    t.activation.push_back(std::move(a));
    prev = &t.activation.back();
  }
  const Matrix& h = t.hidden();
  const std::size_t n = h.rows();
  const std::size_t width = h.cols();
  t.hidden_norm.resize(n);
  t.embedding = Matrix(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = std::sqrt(dot(h.row(i), h.row(i)));
    t.hidden_norm[i] = norm;
    auto e = t.embedding.row(i);
    if (norm < kMinNorm) {
      // Dead row: any unit vector will do; no gradient flows back through it.
      const double v = 1.0 / std::sqrt(static_cast<double>(width));
      for (auto& x : e) x = v;
    } else {
      for (std::size_t k = 0; k < width; ++k) e[k] = h(i, k) / norm;
    }
  }
  const Matrix logits = affine(h, state.params, state.layout.class_head);
  t.class_logits.assign(logits.data().begin(), logits.data().end());
  t.domain_logits = affine(h, state.params, state.layout.domain_head);
  return t;
}

std::vector<double> backward(const NetState& state, const ForwardTrace& trace, const UpstreamGrads& up) {
  const Matrix& h = trace.hidden();
  const std::size_t n = h.rows();
  const std::size_t width = h.cols();
  if (trace.activation.size() != state.layout.trunk.size() || width != state.config.hidden_width() ||
      up.class_logits.size() != n)
    throw ValidationError("backward: trace does not match the network or upstream gradients");

  std::vector<double> grads(state.layout.parameter_count, 0.0);
  Matrix g_logit(n, 1, up.class_logits);
  Matrix dh = affine_backward(h, g_logit, state.params, state.layout.class_head, grads, true);

  if (up.domain_logits.rows() == n && up.domain_logits.cols() == state.config.domain_count) {
    const Matrix dh_dom = affine_backward(h, up.domain_logits, state.params, state.layout.domain_head, grads, true);
    for (std::size_t k = 0; k < dh.size(); ++k) dh.data()[k] += up.domain_feature_scale * dh_dom.data()[k];
  }

  if (up.embedding.rows() == n && up.embedding.cols() == width) {
    for (std::size_t i = 0; i < n; ++i) {
      const double norm = trace.hidden_norm[i];
      if (norm < kMinNorm) continue;
      auto e = trace.embedding.row(i);
      auto de = up.embedding.row(i);
      const double proj = dot(e, de);
      auto dhi = dh.row(i);
      for (std::size_t k = 0; k < width; ++k) dhi[k] += (de[k] - e[k] * proj) / norm;
    }
  }

  for (std::size_t l = state.layout.trunk.size(); l-- > 0;) {
    const Matrix& pre = trace.pre[l];
    const Matrix& act = trace.activation[l];
    Matrix dpre = dh;
    for (std::size_t k = 0; k < dpre.size(); ++k) {
      if (state.config.activation == Activation::kRelu)
        dpre.data()[k] *= pre.data()[k] > 0.0 ? 1.0 : 0.0;
      else
        dpre.data()[k] *= 1.0 - act.data()[k] * act.data()[k];
    }
    const Matrix& below = l == 0 ? trace.input : trace.activation[l - 1];
    dh = affine_backward(below, dpre, state.params, state.layout.trunk[l], grads, l > 0);
  }
  return grads;
}

void adam_step(NetState& state, std::span<const double> grads, const AdamConfig& config) {
  if (grads.size() != state.params.size()) throw ValidationError("adam_step: gradient size mismatch");
  for (double g : grads)
    if (!std::isfinite(g)) throw NumericalError("adam_step: non-finite gradient");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const double g = grads[k];
    state.adam_m[k] = config.beta1 * state.adam_m[k] + (1.0 - config.beta1) * g;
    state.adam_v[k] = config.beta2 * state.adam_v[k] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.adam_m[k] / c1;
    const double v_hat = state.adam_v[k] / c2;
    state.params[k] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

std::vector<double> predict_proba(const NetState& state, const Matrix& features) {
  const ForwardTrace t = forward(state, features);
  std::vector<double> p(t.class_logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double z = t.class_logits[i];
    p[i] = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }
  return p;
}

// --- checkpoint -------------------------------------------------------------------

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;

  std::uint64_t take(int width) {
    if (bytes.size() - pos < static_cast<std::size_t>(width))
      throw ValidationError("checkpoint: truncated at byte " + std::to_string(pos));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += width;
    return v;
  }
};

}  // namespace

std::string encode_checkpoint(const NetState& state) {
  std::string out = "AMK1";
  const auto& c = state.config;
  put_u32(out, static_cast<std::uint32_t>(c.input_dim));
  put_u32(out, static_cast<std::uint32_t>(c.hidden_dims.size()));
  for (auto h : c.hidden_dims) put_u32(out, static_cast<std::uint32_t>(h));
  put_u32(out, static_cast<std::uint32_t>(c.domain_count));
  put_u32(out, c.activation == Activation::kRelu ? 0u : 1u);
  put_u64(out, c.seed);
  put_u64(out, state.step);
  put_u64(out, state.params.size());
  for (const auto* vec : {&state.params, &state.adam_m, &state.adam_v})
    for (double v : *vec) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

NetState decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "AMK1") != 0) throw ValidationError("checkpoint: bad magic");
  Reader rd{bytes, 4};
  NetConfig c;
  c.input_dim = rd.take(4);
  const std::size_t layers = rd.take(4);
  if (layers > 1024) throw ValidationError("checkpoint: implausible layer count");
  c.hidden_dims.resize(layers);
  for (auto& h : c.hidden_dims) h = rd.take(4);
  c.domain_count = rd.take(4);
  const auto act = rd.take(4);
  if (act > 1) throw ValidationError("checkpoint: unknown activation code");
  c.activation = act == 0 ? Activation::kRelu : Activation::kTanh;
  c.seed = rd.take(8);

  NetState s;
  s.config = c;
  s.layout = make_layout(c);
  s.step = rd.take(8);
  const std::size_t count = rd.take(8);
  if (count != s.layout.parameter_count) throw ValidationError("checkpoint: parameter count does not match config");
  for (auto* vec : {&s.params, &s.adam_m, &s.adam_v}) {
    vec->resize(count);
    for (auto& v : *vec) v = std::bit_cast<double>(rd.take(8));
  }
  if (rd.pos != bytes.size()) throw ValidationError("checkpoint: trailing bytes");
  return s;
}

void save_checkpoint(const NetState& state, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(state));
}

NetState load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace amfkit
