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

#include "gridloop/csv.hpp"

#include "gridloop/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

namespace gridloop
{
    namespace
    {
        std::string
        TrimCopy(std::string_view s)
        {
            std::size_t b = 0;
            std::size_t e = s.size();
            while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
            {
                ++b;
            }
            while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
            {
                --e;
            }
            return std::string{s.substr(b, e - b)};
        }

        std::vector<std::string>
        SplitLine(std::string_view line)
        {
            std::vector<std::string> fields;
            std::string current;
            bool quoted = false;
            bool was_quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i)
            {
                char const c = line[i];
                if (quoted)
                {
                    if (c == '"')
                    {
                        if (i + 1 < line.size() && line[i + 1] == '"')
                        {
                            current.push_back('"');
                            ++i;
                        }
                        else
                        {
                            quoted = false;
                        }
                    }
                    else
                    {
                        current.push_back(c);
                    }
                }
                else if (c == '"')
                {
                    quoted = true;
                    was_quoted = true;
                }
                else if (c == ',')
                {
                    fields.push_back(was_quoted ? current : TrimCopy(current));
                    current.clear();
                    was_quoted = false;
                }
                else
                {
                    current.push_back(c);
                }
            }
            fields.push_back(was_quoted ? current : TrimCopy(current));
            return fields;
        }
    } // namespace

    std::optional<std::size_t>
    CsvTable::FindColumn(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
        {
            if (header[i] == name)
            {
                return i;
            }
        }
        return std::nullopt;
    }

    CsvTable
    ParseCsv(std::string_view text, std::string_view source)
    {
        CsvTable table;
        std::size_t line_no = 0;
        bool have_header = false;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            std::size_t const nl = text.find('\n', pos);
            std::string_view line = text.substr(
                pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r')
            {
                line.remove_suffix(1);
            }
            if (TrimCopy(line).empty())
            {
                continue;
            }
            if (!have_header)
            {
                // A UTF-8 byte order mark would otherwise end up in the
                // first column name.
                if (line.substr(0, 3) == "\xEF\xBB\xBF")
                {
                    line.remove_prefix(3);
                }
                table.header = SplitLine(line);
                have_header = true;
                continue;
            }
            table.rows.push_back(SplitLine(line));
            table.lines.push_back(line_no);
        }
        if (!have_header)
        {
            throw IngestionError(
                fmt::format("{}: empty file (header row required)", source), 0);
        }
        return table;
    }

    std::string
    ReadTextFile(std::filesystem::path const& path)
    {
        std::ifstream in{path, std::ios::binary};
        if (!in)
        {
            throw IngestionError(
                fmt::format("{}: cannot open file", path.string()), 0);
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::optional<double>
    ParseFiniteDouble(std::string_view text)
    {
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        {
            text.remove_prefix(1);
        }
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        {
            text.remove_suffix(1);
        }
        if (!text.empty() && text.front() == '+')
        {
            text.remove_prefix(1);
        }
        if (text.empty())
        {
            return std::nullopt;
        }
        double v = 0.0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(v))
        {
            return std::nullopt;
        }
        return v;
    }

    std::vector<std::pair<double, double>>
    LoadNumericPairs(
        std::filesystem::path const& path,
        std::string_view x_column,
        std::string_view y_column)
    {
        auto const source = path.string();
        auto const table = ParseCsv(ReadTextFile(path), source);
        auto const xi = table.FindColumn(x_column);
        auto const yi = table.FindColumn(y_column);
        if (!xi || !yi)
        {
            throw IngestionError(
                fmt::format(
                    "{}: header must contain columns '{}' and '{}'",
                    source, x_column, y_column),
                0);
        }
        std::vector<std::pair<double, double>> out;
        for (std::size_t r = 0; r < table.rows.size(); ++r)
        {
            auto const& row = table.rows[r];
            if (row.size() <= std::max(*xi, *yi))
            {
                throw IngestionError(
                    fmt::format("{}: row {}: missing column", source, r + 1), r + 1);
            }
            auto const x = ParseFiniteDouble(row[*xi]);
            auto const y = ParseFiniteDouble(row[*yi]);
            if (!x || !y)
            {
                throw IngestionError(
                    fmt::format("{}: row {}: unparseable value", source, r + 1),
                    r + 1);
            }
            out.emplace_back(*x, *y);
        }
        if (out.empty())
        {
            throw IngestionError(fmt::format("{}: no data rows", source), 0);
        }
        return out;
    }

} // namespace gridloop
