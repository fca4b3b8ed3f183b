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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amfkit/datamodel.hpp"
#include "amfkit/pipeline.hpp"

namespace amfkit {

/// Everything a CLI command needs. Loaded from a sectioned `key = value`
/// text file and `--section.key=value` overrides.
///
///   # comment
///   [train]
///   epochs_max = 30
///
struct RunConfig {
  /// "synthetic", or a path to a `.csv` / `.emb` dataset.
  std::string data_source = "synthetic";
  SyntheticSpec synthetic;
  TrainConfig train;
  std::optional<double> mixup_alpha;  // unset: the variant's default
  std::filesystem::path output_dir = "amfkit_out";
  std::uint64_t seed = 7;

  /// Where each key was last set, for error messages ("run.cfg:12", "--train.lr").
  std::map<std::string, std::string> origins;

  bool uses_synthetic() const { return data_source == "synthetic"; }
  /// TrainConfig with the mixup alpha and master seed resolved.
  TrainConfig effective_train() const;
  void validate() const;
};

/// Applies one key. Throws ValidationError naming the key for unknown keys
/// and unparsable values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value,
                      const std::string& origin = "");

/// Parses file text on top of `base`. `source_name` prefixes line-numbered errors.
RunConfig parse_config(const std::string& text, const std::string& source_name, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Every key with defaults resolved, in the file format above. Feeding it
/// back to parse_config reproduces the configuration.
std::string format_config(const RunConfig& config);

std::vector<std::string> config_keys();

}  // namespace amfkit
