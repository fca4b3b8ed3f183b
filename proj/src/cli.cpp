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

#include "amfkit/cli.hpp"

#include <CLI11.hpp>

#include "amfkit/errors.hpp"
#include "amfkit/format.hpp"
#include "amfkit/model.hpp"
#include "amfkit/pipeline.hpp"
#include "amfkit/sampling.hpp"

namespace amfkit {

namespace fs = std::filesystem;

DatasetTable load_data(const RunConfig& config) {
  if (config.uses_synthetic()) {
    Rng rng = Rng(config.seed).split("data");
    return generate_synthetic(config.synthetic, rng);
  }
  const fs::path path = config.data_source;
  const auto ext = path.extension().string();
  if (ext == ".csv") return load_csv(path);
  if (ext == ".emb" || ext == ".bin") return load_embeddings_binary(path);
  throw ValidationError("data.source: unsupported extension '" + ext + "' (use .csv or .emb)");
}

namespace {

fs::path prepare_output(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir))
    throw ValidationError("output.dir: cannot create '" + config.output_dir.string() + "'");
  return config.output_dir;
}

void emit(CommandResult& result, const fs::path& path, const std::string& contents) {
  write_file(path, contents);
  result.files.push_back(path);
}

std::string split_csv(const SplitPlan& plan) {
  std::string out = "id,set\n";
  for (const auto& id : plan.train_ids) out += id + ",train\n";
  for (const auto& id : plan.monitor_ids) out += id + ",monitor\n";
  return out;
}

}  // namespace

CommandResult cmd_generate(const RunConfig& config) {
  if (!config.uses_synthetic()) throw ValidationError("data.source: generate needs 'synthetic'");
  config.validate();
  const DatasetTable table = load_data(config);
  const fs::path dir = prepare_output(config);
  CommandResult r;
  emit(r, dir / "dataset.csv", format_csv(table));
  emit(r, dir / "dataset.emb", encode_embeddings_binary(table));
  const std::string census = format_census(table);
  emit(r, dir / "census.txt", census);
  emit(r, dir / "effective.cfg", format_config(config));
  r.summary = census;
  return r;
}

CommandResult cmd_train(const RunConfig& config) {
  config.validate();
  const DatasetTable table = load_data(config);
  const TrainConfig train_config = config.effective_train();
  Rng split_rng = Rng(config.seed).split("split");
  const SplitPlan plan = stratified_split(table, train_config.monitor_fraction, split_rng);
  const TrainResult trained = train(table, plan, train_config);

  const fs::path dir = prepare_output(config);
  CommandResult r;
  emit(r, dir / "checkpoint.amk", encode_checkpoint(trained.state));
  emit(r, dir / "epochs.csv", format_epoch_log_csv(trained.logs));

  FoldReport monitor = evaluate(trained.state, table.subset(plan.monitor_ids), train_config.threshold);
  monitor.held_out_domain = "monitor";
  emit(r, dir / "monitor_report.csv", format_fold_csv({monitor}));

  const DatasetTable pool = table.subset(plan.train_ids);
  const auto difficulty =
      mine_hard(pool, predict_proba(trained.state, pool.feature_matrix()), train_config.sampler.hard_fraction);
  emit(r, dir / "difficulty.csv", format_difficulty_csv(pool, difficulty));
  emit(r, dir / "split.csv", split_csv(plan));
  emit(r, dir / "effective.cfg", format_config(config));

  r.summary = "best epoch " + std::to_string(trained.choice.best_epoch) + " of " +
              std::to_string(trained.logs.size()) + ", monitor BA " +
              format_fixed(trained.choice.best_monitor_ba, 4) + " (" + trained.choice.rule + ")\n";
  return r;
}

CommandResult cmd_lodo(const RunConfig& config) {
  config.validate();
  const DatasetTable table = load_data(config);
  const LodoResult result = run_lodo(table, config.effective_train());
  const fs::path dir = prepare_output(config);
  CommandResult r;
  emit(r, dir / "lodo_folds.csv", format_lodo_csv(result));
  const std::string md = format_lodo_markdown(result);
  emit(r, dir / "lodo.md", md);
  emit(r, dir / "effective.cfg", format_config(config));
  r.summary = md;
  return r;
}

CommandResult cmd_evaluate(const RunConfig& config, const fs::path& checkpoint) {
  config.validate();
  const DatasetTable table = load_data(config);
  const NetState state = load_checkpoint(checkpoint);
  FoldReport report = evaluate(state, table, config.train.threshold);
  report.held_out_domain = "all";
  const fs::path dir = prepare_output(config);
  CommandResult r;
  const std::string csv = format_fold_csv({report});
  emit(r, dir / "evaluation.csv", csv);
  r.summary = csv;
  return r;
}

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out) {
  if (options.trials == 0) throw ValidationError("--trials must be >= 1");
  const auto results = run_gradcheck(options);
  out << format_gradcheck(results);
  for (const auto& r : results)
    if (!r.passed) return kExitNumerical;
  return kExitOk;
}

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::string data;
  std::string loss;
  std::string sampler;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

// `--section.key=value` (or `--section.key value`) overrides, in order.
void apply_overrides(RunConfig& config, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw ValidationError("unexpected argument '" + arg + "'");
    std::string body = arg.substr(2);
    std::string value;
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      value = body.substr(eq + 1);
      body = body.substr(0, eq);
    } else if (i + 1 < extras.size()) {
      value = extras[++i];
    } else {
      throw ValidationError("missing value for '" + arg + "'");
    }
    if (body.find('.') == std::string::npos) throw ValidationError("unknown option '" + arg + "'");
    set_config_value(config, body, value, "--" + body);
  }
}

RunConfig resolve_config(const CommonOptions& opt, const std::vector<std::string>& extras) {
  RunConfig config;
  if (!opt.config_path.empty()) config = load_config(opt.config_path);
  if (!opt.data.empty()) set_config_value(config, "data.source", opt.data, "--data");
  if (!opt.out_dir.empty()) set_config_value(config, "output.dir", opt.out_dir, "--out");
  if (opt.seed_set) set_config_value(config, "run.seed", std::to_string(opt.seed), "--seed");
  if (opt.loss == "bce") {
    // Baseline objective: plain BCE-with-logits, no auxiliary terms.
    set_config_value(config, "train.loss", "bce", "--loss");
    set_config_value(config, "contrastive.weight", "0", "--loss");
    set_config_value(config, "domain.weight", "0", "--loss");
  } else if (opt.loss == "focal") {
    set_config_value(config, "train.loss", "focal", "--loss");
  } else if (!opt.loss.empty()) {
    throw ValidationError("--loss: expected focal or bce, got '" + opt.loss + "'");
  }
  if (opt.sampler == "uniform") {
    set_config_value(config, "sampler.mode", "uniform", "--sampler");
    set_config_value(config, "sampler.hard_mining", "false", "--sampler");
  } else if (opt.sampler == "weighted") {
    set_config_value(config, "sampler.mode", "weighted", "--sampler");
  } else if (!opt.sampler.empty()) {
    throw ValidationError("--sampler: expected weighted or uniform, got '" + opt.sampler + "'");
  }
  apply_overrides(config, extras);
  config.validate();
  return config;
}

void add_common(CLI::App* sub, CommonOptions& opt, bool training) {
  sub->add_option("-c,--config", opt.config_path, "Config file (sectioned key = value)");
  sub->add_option("-o,--out", opt.out_dir, "Output directory");
  sub->add_option("--data", opt.data, "'synthetic' or a .csv/.emb dataset");
  sub->add_option("--seed", opt.seed, "Master seed")->each([&](const std::string&) { opt.seed_set = true; });
  if (training) {
    sub->add_option("--loss", opt.loss, "focal | bce (bce also drops the auxiliary terms)");
    sub->add_option("--sampler", opt.sampler, "weighted | uniform (uniform also disables hard mining)");
  }
  sub->allow_extras();
  sub->footer("Any config key can be overridden with --section.key=value.");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"amfkit: domain-aware training for imbalanced binary classification"};
  app.require_subcommand(1);

  CommonOptions gen_opt, train_opt, lodo_opt, eval_opt;
  auto* gen = app.add_subcommand("generate", "Write a synthetic multi-domain dataset");
  add_common(gen, gen_opt, false);
  auto* tr = app.add_subcommand("train", "Train on a stratified 95/5 split with monitor early stopping");
  add_common(tr, train_opt, true);
  auto* lodo = app.add_subcommand("lodo", "Leave-one-domain-out cross-validation");
  add_common(lodo, lodo_opt, true);
  auto* ev = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset");
  add_common(ev, eval_opt, false);
  std::string checkpoint;
  ev->add_option("--checkpoint", checkpoint, "Checkpoint written by train")->required();

  GradcheckOptions gc;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of every analytic gradient");
  grad->add_option("--seed", gc.seed, "Seed for the random configurations");
  grad->add_option("--trials", gc.trials, "Configurations per component");
  grad->add_flag("--corrupt", gc.corrupt, "Perturb analytic gradients (self-test of the checker)");

  std::vector<std::string> argv_store;
  argv_store.push_back("amfkit");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    CommandResult result;
    if (*gen) {
      result = cmd_generate(resolve_config(gen_opt, gen->remaining()));
    } else if (*tr) {
      result = cmd_train(resolve_config(train_opt, tr->remaining()));
    } else if (*lodo) {
      result = cmd_lodo(resolve_config(lodo_opt, lodo->remaining()));
    } else if (*ev) {
      result = cmd_evaluate(resolve_config(eval_opt, ev->remaining()), checkpoint);
    } else if (*grad) {
      return cmd_gradcheck(gc, out);
    }
    out << result.summary;
    for (const auto& f : result.files) out << "wrote " << f.string() << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace amfkit
