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

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcmdp::csv {

/// A header-first CSV table held as strings. No quoting support; fields never
/// contain commas in the formats this library writes.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index; throws std::invalid_argument naming the missing column.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
    std::size_t index(std::size_t row, const std::string& name) const;
};

Table read(std::istream& in);
Table read_file(const std::string& path);

/// Throws std::invalid_argument naming the first absent column.
void require_columns(const Table& table, const std::vector<std::string>& columns);

/// Formats with 17 significant digits.
std::string format(double value);

} // namespace rcmdp::csv
