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

#include <string>

#include "amfkit/config.hpp"
#include "amfkit/errors.hpp"

using namespace amfkit;

namespace {

std::string error_of(const auto& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse sections, comments and lists") {
  const std::string text =
      "# top comment\n"
      "[run]\n"
      "seed = 42\n"
      "\n"
      "[train]\n"
      "epochs_max = 12   # trailing comment\n"
      "hidden_dims = 32, 16, 8\n"
      "stop_mode = fixed\n"
      "[synthetic]\n"
      "domain_sizes = 10,20\n"
      "prevalence = 0.1, 0.2\n"
      "[mixup]\n"
      "mode = domain_aware\n";
  const RunConfig c = parse_config(text, "run.cfg");
  CHECK(c.seed == 42);
  CHECK(c.train.epochs_max == 12);
  CHECK(c.train.hidden_dims == std::vector<std::size_t>{32, 16, 8});
  CHECK(c.train.stop_mode == StopMode::kFixed);
  CHECK(c.synthetic.domain_sizes == std::vector<std::size_t>{10, 20});
  CHECK(c.synthetic.prevalence == std::vector<double>{0.1, 0.2});
  CHECK(c.train.mixup.mode == MixupMode::kDomainAware);
  CHECK(c.origins.at("train.epochs_max") == "run.cfg:6");

  const TrainConfig t = c.effective_train();
  CHECK(t.seed == 42);
  CHECK(t.mixup.alpha == 0.2);
}

TEST_CASE("later settings override earlier ones") {
  RunConfig c = parse_config("[train]\nlr = 0.01\n", "a.cfg");
  c = parse_config("[train]\nlr = 0.002\n", "b.cfg", c);
  CHECK(c.train.adam.lr == 0.002);
  set_config_value(c, "train.lr", "0.5", "--train.lr");
  CHECK(c.train.adam.lr == 0.5);
  CHECK(c.origins.at("train.lr") == "--train.lr");

  set_config_value(c, "mixup.alpha", "0.7");
  CHECK(c.effective_train().mixup.alpha == 0.7);
  set_config_value(c, "mixup.alpha", "auto");
  c.train.mixup.mode = MixupMode::kStrong;
  CHECK(c.effective_train().mixup.alpha == 1.0);
}

TEST_CASE("unknown keys and bad values are rejected with a location") {
  CHECK(error_of([] { parse_config("[train]\nlearning_rate = 1\n", "x.cfg"); }) ==
        "x.cfg:2: unknown config key 'train.learning_rate'");
  CHECK(error_of([] { parse_config("\n\n[train]\nepochs_max = many\n", "x.cfg"); }).rfind("x.cfg:4: ", 0) == 0);
  CHECK(error_of([] { parse_config("[train\n", "x.cfg"); }) == "x.cfg:1: malformed section header");
  CHECK(error_of([] { parse_config("[train]\nepochs_max\n", "x.cfg"); }) == "x.cfg:2: expected key = value");
  CHECK(error_of([] { parse_config("[train]\nloss = hinge\n", "x.cfg"); }).find("train.loss") != std::string::npos);
  CHECK(error_of([] { parse_config("[sampler]\nhard_mining = maybe\n", "x.cfg"); }).find("true or false") !=
        std::string::npos);

  RunConfig c;
  CHECK_THROWS_AS(set_config_value(c, "nosuch", "1"), ValidationError);
}

TEST_CASE("gamma = -1 is a validation error naming the key and its origin") {
  const RunConfig c = parse_config("[focal]\ngamma = -1\n", "run.cfg");
  const std::string msg = error_of([&] { c.validate(); });
  CHECK(msg.find("focal.gamma") != std::string::npos);
  CHECK(msg.rfind("run.cfg:2: ", 0) == 0);

  RunConfig d;
  set_config_value(d, "train.lr", "0", "--train.lr");
  CHECK(error_of([&] { d.validate(); }).rfind("--train.lr: train.lr", 0) == 0);
}

TEST_CASE("format_config round-trips every key") {
  RunConfig c;
  c.seed = 99;
  c.output_dir = "somewhere/else";
  c.train.hidden_dims = {7, 5};
  c.train.loss = LossKind::kBce;
  c.train.adam.lr = 0.0123456789012345;
  c.train.mixup.mode = MixupMode::kStrong;
  c.train.sampler.mode = SamplerMode::kUniform;
  c.train.loss_params.contrastive.full_denominator = true;
  c.synthetic.prevalence = {0.1, 0.3};
  c.synthetic.domain_sizes = {5, 6};
  c.mixup_alpha = 0.35;

  const std::string text = format_config(c);
  CHECK(text.rfind("# rng = xoshiro256**/splitmix64\n", 0) == 0);
  const RunConfig back = parse_config(text, "effective.cfg");
  CHECK(format_config(back) == text);
  CHECK(back.seed == 99);
  CHECK(back.output_dir == c.output_dir);
  CHECK(back.train.adam.lr == c.train.adam.lr);
  CHECK(back.train.hidden_dims == c.train.hidden_dims);
  CHECK(back.effective_train().mixup.alpha == 0.35);
  CHECK(back.train.loss_params.contrastive.full_denominator);

  for (const auto& key : config_keys()) {
    const auto dot = key.find('.');
    CHECK(text.find(key.substr(dot + 1) + " = ") != std::string::npos);
  }
}
