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
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace amfkit {

struct GradcheckOptions {
  std::uint64_t seed = 1;
  std::size_t trials = 100;  // configurations per component
  double step = 1e-5;
  double rel_tol = 1e-4;
  double abs_floor = 1e-7;
  /// Fault injection: perturb every analytic gradient before comparing.
  bool corrupt = false;
};

struct GradcheckComponent {
  std::string name;
  std::size_t configurations = 0;
  std::size_t entries = 0;
  double max_rel_error = 0.0;  // over entries above the absolute floor
  double max_abs_error = 0.0;
  bool passed = true;
};

/// Central differences of `f` at `x`.
std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step);

/// Max relative error over entries whose absolute difference exceeds the floor.
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric, double abs_floor);
double max_absolute_error(std::span<const double> analytic, std::span<const double> numeric);

/// Components: "focal", "supcon", "domain_grl", "model_composite".
std::vector<GradcheckComponent> run_gradcheck(const GradcheckOptions& options);

std::string format_gradcheck(const std::vector<GradcheckComponent>& results);

}  // namespace amfkit
