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

#include "amfkit/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "amfkit/errors.hpp"
#include "amfkit/format.hpp"

namespace amfkit {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ValidationError(key + ": expected " + expected + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a number");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define AMFKIT_REAL(KEY, MEMBER)                                                                       \
  Field {                                                                                              \
    KEY, [](RunConfig& c, const std::string& k, const std::string& v) { c.MEMBER = to_double(k, v); }, \
        [](const RunConfig& c) { return format_real(c.MEMBER); }                                       \
  }
#define AMFKIT_COUNT(KEY, MEMBER)                                                                   \
  Field {                                                                                           \
    KEY, [](RunConfig& c, const std::string& k, const std::string& v) { c.MEMBER = to_u64(k, v); }, \
        [](const RunConfig& c) { return std::to_string(c.MEMBER); }                                 \
  }
#define AMFKIT_FLAG(KEY, MEMBER)                                                                     \
  Field {                                                                                            \
    KEY, [](RunConfig& c, const std::string& k, const std::string& v) { c.MEMBER = to_bool(k, v); }, \
        [](const RunConfig& c) { return bool_str(c.MEMBER); }                                        \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"run.seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
       [](const RunConfig& c) { return c.output_dir.string(); }},
      {"data.source",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v.empty()) bad_value(k, v, "'synthetic' or a dataset path");
         c.data_source = v;
       },
       [](const RunConfig& c) { return c.data_source; }},

      {"synthetic.domain_sizes",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.domain_sizes.clear();
         for (const auto& item : split_list(v)) c.synthetic.domain_sizes.push_back(to_u64(k, item));
       },
       [](const RunConfig& c) {
         return join<std::size_t>(c.synthetic.domain_sizes, [](const std::size_t& n) { return std::to_string(n); });
       }},
      {"synthetic.prevalence",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.prevalence.clear();
         for (const auto& item : split_list(v)) c.synthetic.prevalence.push_back(to_double(k, item));
       },
       [](const RunConfig& c) {
         return join<double>(c.synthetic.prevalence, [](const double& p) { return format_real(p); });
       }},
      AMFKIT_COUNT("synthetic.feature_dim", synthetic.feature_dim),
      AMFKIT_REAL("synthetic.separation", synthetic.separation),
      AMFKIT_REAL("synthetic.domain_shift", synthetic.domain_shift),
      AMFKIT_REAL("synthetic.annotator_flip", synthetic.annotator_flip),
      AMFKIT_REAL("synthetic.annotator_scale", synthetic.annotator_scale),
      AMFKIT_COUNT("synthetic.patch_size", synthetic.patch_size),

      AMFKIT_COUNT("train.epochs_max", train.epochs_max),
      AMFKIT_COUNT("train.batch_size", train.batch_size),
      {"train.stop_mode",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "monitor")
           c.train.stop_mode = StopMode::kMonitor;
         else if (v == "fixed")
           c.train.stop_mode = StopMode::kFixed;
         else
           bad_value(k, v, "monitor or fixed");
       },
       [](const RunConfig& c) { return std::string(c.train.stop_mode == StopMode::kMonitor ? "monitor" : "fixed"); }},
      AMFKIT_COUNT("train.patience", train.patience),
      AMFKIT_REAL("train.min_delta", train.min_delta),
      {"train.loss",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "focal")
           c.train.loss = LossKind::kFocal;
         else if (v == "bce")
           c.train.loss = LossKind::kBce;
         else
           bad_value(k, v, "focal or bce");
       },
       [](const RunConfig& c) { return std::string(c.train.loss == LossKind::kFocal ? "focal" : "bce"); }},
      AMFKIT_FLAG("train.adaptive_pos_weight", train.adaptive_pos_weight),
      {"train.pos_weight_source",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "pool")
           c.train.pos_weight_source = PosWeightSource::kPool;
         else if (v == "sampled")
           c.train.pos_weight_source = PosWeightSource::kSampled;
         else
           bad_value(k, v, "pool or sampled");
       },
       [](const RunConfig& c) {
         return std::string(c.train.pos_weight_source == PosWeightSource::kPool ? "pool" : "sampled");
       }},
      {"train.hidden_dims",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.hidden_dims.clear();
         for (const auto& item : split_list(v)) c.train.hidden_dims.push_back(to_u64(k, item));
         if (c.train.hidden_dims.empty()) bad_value(k, v, "a non-empty list of widths");
       },
       [](const RunConfig& c) {
         return join<std::size_t>(c.train.hidden_dims, [](const std::size_t& n) { return std::to_string(n); });
       }},
      {"train.activation",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "relu")
           c.train.activation = Activation::kRelu;
         else if (v == "tanh")
           c.train.activation = Activation::kTanh;
         else
           bad_value(k, v, "relu or tanh");
       },
       [](const RunConfig& c) { return std::string(c.train.activation == Activation::kRelu ? "relu" : "tanh"); }},
      AMFKIT_REAL("train.lr", train.adam.lr),
      AMFKIT_REAL("train.threshold", train.threshold),
      AMFKIT_REAL("train.monitor_fraction", train.monitor_fraction),

      AMFKIT_REAL("focal.gamma", train.loss_params.focal.gamma),
      AMFKIT_REAL("focal.pos_weight", train.loss_params.focal.pos_weight),
      AMFKIT_FLAG("focal.detach_factor", train.loss_params.focal.detach_factor),

      AMFKIT_REAL("contrastive.temperature", train.loss_params.contrastive.temperature),
      AMFKIT_REAL("contrastive.epsilon", train.loss_params.contrastive.miner_epsilon),
      AMFKIT_REAL("contrastive.weight", train.loss_params.contrastive.weight),
      AMFKIT_FLAG("contrastive.full_denominator", train.loss_params.contrastive.full_denominator),

      AMFKIT_REAL("domain.weight", train.loss_params.domain.weight),
      AMFKIT_REAL("domain.grl_scale", train.loss_params.domain.grl_scale),

      {"mixup.mode",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "none")
           c.train.mixup.mode = MixupMode::kNone;
         else if (v == "standard")
           c.train.mixup.mode = MixupMode::kStandard;
         else if (v == "strong")
           c.train.mixup.mode = MixupMode::kStrong;
         else if (v == "domain_aware")
           c.train.mixup.mode = MixupMode::kDomainAware;
         else
           bad_value(k, v, "none, standard, strong or domain_aware");
       },
       [](const RunConfig& c) {
         switch (c.train.mixup.mode) {
           case MixupMode::kStandard:
             return std::string("standard");
           case MixupMode::kStrong:
             return std::string("strong");
           case MixupMode::kDomainAware:
             return std::string("domain_aware");
           case MixupMode::kNone:
             break;
         }
         return std::string("none");
       }},
      {"mixup.alpha",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "auto")
           c.mixup_alpha.reset();
         else
           c.mixup_alpha = to_double(k, v);
       },
       [](const RunConfig& c) { return format_real(c.effective_train().mixup.alpha); }},
      AMFKIT_REAL("mixup.probability", train.mixup.apply_probability),
      AMFKIT_FLAG("mixup.cross_domain", train.mixup.cross_domain),

      {"sampler.mode",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "weighted")
           c.train.sampler.mode = SamplerMode::kWeighted;
         else if (v == "uniform")
           c.train.sampler.mode = SamplerMode::kUniform;
         else
           bad_value(k, v, "weighted or uniform");
       },
       [](const RunConfig& c) {
         return std::string(c.train.sampler.mode == SamplerMode::kWeighted ? "weighted" : "uniform");
       }},
      AMFKIT_FLAG("sampler.hard_mining", train.sampler.hard_mining),
      AMFKIT_REAL("sampler.hard_fraction", train.sampler.hard_fraction),
      AMFKIT_REAL("sampler.hard_multiplier", train.sampler.hard_multiplier),
  };
  return table;
}

#undef AMFKIT_REAL
#undef AMFKIT_COUNT
#undef AMFKIT_FLAG

}  // namespace

TrainConfig RunConfig::effective_train() const {
  TrainConfig t = train;
  t.mixup.alpha = mixup_alpha.value_or(default_mixup_alpha(t.mixup.mode));
  t.seed = seed;
  return t;
}

void RunConfig::validate() const {
  try {
    if (uses_synthetic()) synthetic.validate();
    effective_train().validate();
  } catch (const ValidationError& e) {
    // Messages start with the offending key; point at where it was set.
    const std::string msg = e.what();
    const auto key = msg.substr(0, msg.find(' '));
    auto it = origins.find(key);
    if (it != origins.end()) throw ValidationError(it->second + ": " + msg);
    throw;
  }
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value,
                      const std::string& origin) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      try {
        f.set(config, key, trim(value));
      } catch (const ValidationError& e) {
        if (origin.empty()) throw;
        throw ValidationError(origin + ": " + e.what());
      }
      config.origins[key] = origin.empty() ? key : origin;
      return;
    }
  }
  throw ValidationError((origin.empty() ? "" : origin + ": ") + "unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text, const std::string& source_name, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const std::string name = trim(line.substr(0, eq));
    const std::string key = section.empty() ? name : section + "." + name;
    set_config_value(base, key, line.substr(eq + 1), where);
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  return parse_config(read_file(path), path.string(), std::move(base));
}

std::string format_config(const RunConfig& config) {
  std::string out = "# rng = " + std::string(Rng::kAlgorithm) + "\n";
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = f.key.substr(0, dot);
    if (sec != section) {
      out += "\n[" + sec + "]\n";
      section = sec;
    }
    out += f.key.substr(dot + 1) + " = " + f.get(config) + "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

}  // namespace amfkit
