// Copyright 2026 The gridloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridloop
{

    /// A headed comma-separated document. Fields are whitespace-trimmed;
    /// double quotes may wrap fields containing commas. Blank lines are
    /// skipped.
    struct CsvTable
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;
        /// 1-based file line of each row (for diagnostics).
        std::vector<std::size_t> lines;

        [[nodiscard]] std::optional<std::size_t>
        FindColumn(std::string_view name) const;
    };

    /// Throws IngestionError (row 0) when the document has no header.
    CsvTable
    ParseCsv(std::string_view text, std::string_view source = "<memory>");

    /// Throws IngestionError when the file can't be read.
    std::string
    ReadTextFile(std::filesystem::path const& path);

    /// Strict double parse: whole field must be consumed and finite.
    std::optional<double>
    ParseFiniteDouble(std::string_view text);

    /// Reads a two-column numeric table such as `utilization,power_w`.
    /// Columns are selected by header name; returns (x, y) pairs in file
    /// order. Throws IngestionError naming the offending row.
    std::vector<std::pair<double, double>>
    LoadNumericPairs(
        std::filesystem::path const& path,
        std::string_view x_column,
        std::string_view y_column);

} // namespace gridloop
