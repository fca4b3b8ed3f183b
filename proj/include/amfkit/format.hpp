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
#include <string>

namespace amfkit {

/// Shortest decimal string that parses back to the same double.
std::string format_real(double v);
/// Fixed-point with `digits` decimals.
std::string format_fixed(double v, int digits);

std::string read_file(const std::filesystem::path& path);
/// Throws ValidationError if the file cannot be written.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace amfkit
