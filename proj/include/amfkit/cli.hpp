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

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "amfkit/config.hpp"
#include "amfkit/datamodel.hpp"
#include "amfkit/gradcheck.hpp"

namespace amfkit {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::string summary;
};

/// Synthetic data from the `data` stream of the master seed, or a CSV/EMB1 file.
DatasetTable load_data(const RunConfig& config);

/// dataset.csv, dataset.emb, census.txt, effective.cfg
CommandResult cmd_generate(const RunConfig& config);
/// checkpoint.amk, epochs.csv, monitor_report.csv, difficulty.csv, split.csv, effective.cfg
CommandResult cmd_train(const RunConfig& config);
/// lodo_folds.csv, lodo.md, effective.cfg
CommandResult cmd_lodo(const RunConfig& config);
/// evaluation.csv for a checkpoint over the configured data.
CommandResult cmd_evaluate(const RunConfig& config, const std::filesystem::path& checkpoint);
/// Prints one line per component; returns kExitNumerical if any fails.
int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out);

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amfkit
