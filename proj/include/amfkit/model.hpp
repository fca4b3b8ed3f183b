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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "amfkit/numerics.hpp"

namespace amfkit {

enum class Activation { kRelu, kTanh };

struct NetConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims{64, 32};
  std::size_t domain_count = 1;
  Activation activation = Activation::kRelu;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t hidden_width() const { return hidden_dims.back(); }
  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

/// Offsets of one affine block inside the flat parameter vector.
/// Weights are stored (out x in), row-major.
struct AffineSlot {
  std::size_t weight = 0;
  std::size_t bias = 0;
  std::size_t in = 0;
  std::size_t out = 0;
};

struct NetLayout {
  std::vector<AffineSlot> trunk;
  AffineSlot class_head;   // out = 1
  AffineSlot domain_head;  // out = domain_count
  std::size_t parameter_count = 0;
};

NetLayout make_layout(const NetConfig& config);

/// Parameters plus Adam moments, all in one flat layout.
struct NetState {
  NetConfig config;
  NetLayout layout;
  std::vector<double> params;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::uint64_t step = 0;

  friend bool operator==(const NetState& a, const NetState& b) {
    return a.config == b.config && a.params == b.params && a.adam_m == b.adam_m && a.adam_v == b.adam_v &&
           a.step == b.step;
  }
};

/// Trunk weights: He-uniform (relu) or Xavier-uniform (tanh). Heads:
/// Xavier-uniform. Biases start at zero.
NetState init(const NetConfig& config);

/// Largest |w| the init scheme can produce for a block.
double init_bound(Activation activation, std::size_t fan_in, std::size_t fan_out, bool is_head);

struct ForwardTrace {
  Matrix input;
  std::vector<Matrix> pre;        // per trunk layer, before activation
  std::vector<Matrix> activation; // per trunk layer
  std::vector<double> hidden_norm;
  Matrix embedding;               // L2-normalized final hidden rows
  std::vector<double> class_logits;
  Matrix domain_logits;

  const Matrix& hidden() const { return activation.back(); }
};

ForwardTrace forward(const NetState& state, const Matrix& features);

/// Loss gradients w.r.t. the three network outputs.
struct UpstreamGrads {
  std::vector<double> class_logits;
  Matrix embedding;
  Matrix domain_logits;
  /// The gradient leaving the domain head towards the trunk is multiplied by
  /// this value (gradient reversal: -grl_scale).
  double domain_feature_scale = -1.0;
};

/// Reverse-mode gradients for every parameter, in the flat layout.
std::vector<double> backward(const NetState& state, const ForwardTrace& trace, const UpstreamGrads& upstream);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam update in place. Throws NumericalError on non-finite gradients.
void adam_step(NetState& state, std::span<const double> grads, const AdamConfig& config = {});

/// sigmoid(class logit) per row.
std::vector<double> predict_proba(const NetState& state, const Matrix& features);

/// "AMK1" little-endian container: config header, step, then params, m, v as f64.
std::string encode_checkpoint(const NetState& state);
NetState decode_checkpoint(const std::string& bytes);
void save_checkpoint(const NetState& state, const std::filesystem::path& path);
NetState load_checkpoint(const std::filesystem::path& path);

}  // namespace amfkit
