/*
 * Copyright 2026 The rcmdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include "rcmdp/model.hpp"

#include <string>

namespace rcmdp {

/// JSON document mirroring Rcmdp. `horizon` is null for an unbounded horizon.
/// Doubles are written in shortest round-trip form, so parsing reproduces the
/// model bit-exactly.
std::string model_to_json(const Rcmdp& model, int indent = -1);

/// Throws std::invalid_argument on malformed documents.
Rcmdp model_from_json(const std::string& text);

void save_model(const std::string& path, const Rcmdp& model);
Rcmdp load_model(const std::string& path);

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

} // namespace rcmdp
