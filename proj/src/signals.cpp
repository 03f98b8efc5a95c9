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

#include "gridloop/signals.hpp"

#include "gridloop/csv.hpp"
#include "gridloop/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <fmt/core.h>

namespace gridloop
{
    namespace
    {
        std::string
        Lower(std::string_view s)
        {
            std::string out{s};
            for (char& c : out)
            {
                c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            }
            return out;
        }

        std::size_t
        ResolveColumn(
            CsvTable const& table,
            ColumnRef const& ref,
            std::string_view source,
            std::string_view role)
        {
            if (auto const* name = std::get_if<std::string>(&ref))
            {
                if (auto idx = table.FindColumn(*name))
                {
                    return *idx;
                }
                throw IngestionError(
                    fmt::format("{}: no {} column named '{}'", source, role, *name),
                    0);
            }
            auto const idx = std::get<std::size_t>(ref);
            if (idx >= table.header.size())
            {
                throw IngestionError(
                    fmt::format(
                        "{}: {} column index {} out of range (header has {} columns)",
                        source, role, idx, table.header.size()),
                    0);
            }
            return idx;
        }

        std::int64_t
        FloorMod(std::int64_t a, std::int64_t b)
        {
            auto r = a % b;
            return r < 0 ? r + b : r;
        }
    } // namespace

    Unit
    ParseUnit(std::string_view text)
    {
        auto const s = Lower(text);
        if (s == "w" || s == "watt" || s == "watts")
        {
            return Unit::Watts;
        }
        if (s == "w/m2" || s == "w/m^2" || s == "w/m²")
        {
            return Unit::WattsPerSquareMeter;
        }
        if (s == "m/s" || s == "mps")
        {
            return Unit::MetersPerSecond;
        }
        if (s == "fraction" || s == "utilization")
        {
            return Unit::Fraction;
        }
        if (s == "gco2/kwh" || s == "g/kwh" || s == "gco2eq/kwh")
        {
            return Unit::GramsPerKilowattHour;
        }
        if (s == "1" || s == "dimensionless" || s.empty())
        {
            return Unit::Dimensionless;
        }
        throw std::invalid_argument(fmt::format("unknown unit '{}'", text));
    }

    std::string_view
    ToString(Unit unit)
    {
        switch (unit)
        {
            case Unit::Watts:
                return "W";
            case Unit::WattsPerSquareMeter:
                return "W/m2";
            case Unit::MetersPerSecond:
                return "m/s";
            case Unit::Fraction:
                return "fraction";
            case Unit::GramsPerKilowattHour:
                return "gCO2/kWh";
            case Unit::Dimensionless:
                return "1";
        }
        return "?";
    }

    Interpolation
    ParseInterpolation(std::string_view text)
    {
        auto const s = Lower(text);
        if (s == "hold" || s == "previous" || s == "previous-value-hold")
        {
            return Interpolation::Hold;
        }
        if (s == "linear")
        {
            return Interpolation::Linear;
        }
        throw std::invalid_argument(
            fmt::format("unknown interpolation '{}' (expected hold|linear)", text));
    }

    std::string_view
    ToString(Interpolation interpolation)
    {
        return interpolation == Interpolation::Hold ? "hold" : "linear";
    }

    TimeSeriesTrace::TimeSeriesTrace(
        std::vector<TracePoint> points,
        Interpolation interpolation,
        double scale,
        bool repeat,
        Unit unit,
        std::string name)
        : points_(std::move(points))
        , interpolation_(interpolation)
        , scale_(scale)
        , repeat_(repeat)
        , unit_(unit)
        , name_(std::move(name))
    {
        if (points_.empty())
        {
            throw ConfigError(
                fmt::format("trace '{}': at least one point required", name_));
        }
        if (!(scale_ >= 0.0) || !std::isfinite(scale_))
        {
            throw ConfigError(
                fmt::format("trace '{}': scale must be finite and >= 0", name_));
        }
        for (std::size_t i = 0; i < points_.size(); ++i)
        {
            if (!std::isfinite(points_[i].value))
            {
                throw ConfigError(fmt::format(
                    "trace '{}': non-finite value at point {}", name_, i + 1));
            }
            if (i > 0 && points_[i].time <= points_[i - 1].time)
            {
                throw ConfigError(fmt::format(
                    "trace '{}': timestamps not strictly increasing at point {}",
                    name_, i + 1));
            }
        }
        if (points_.size() >= 2)
        {
            auto const n = points_.size();
            period_ = (points_[n - 1].time - points_[0].time)
                + (points_[n - 1].time - points_[n - 2].time);
        }
    }

    double
    TimeSeriesTrace::Interpolate(Timestamp t) const
    {
        // precondition: first <= t <= last
        auto it = std::upper_bound(
            points_.begin(), points_.end(), t,
            [](Timestamp lhs, TracePoint const& p) { return lhs < p.time; });
        auto const& lo = *(it - 1);
        if (lo.time == t || interpolation_ == Interpolation::Hold
            || it == points_.end())
        {
            return lo.value;
        }
        auto const& hi = *it;
        double const frac = static_cast<double>((t - lo.time).count())
            / static_cast<double>((hi.time - lo.time).count());
        return lo.value + (hi.value - lo.value) * frac;
    }

    Sample
    TimeSeriesTrace::SampleAt(Timestamp t) const
    {
        auto const& first = points_.front();
        auto const& last = points_.back();
        if (points_.size() == 1)
        {
            if (!repeat_ && t < first.time)
            {
                throw OutOfRangeError(fmt::format(
                    "trace '{}': {} precedes first point {}", name_,
                    FormatTimestamp(t), FormatTimestamp(first.time)));
            }
            return {first.value * scale_, !repeat_ && t > first.time};
        }
        if (!repeat_)
        {
            if (t < first.time)
            {
                throw OutOfRangeError(fmt::format(
                    "trace '{}': {} precedes first point {}", name_,
                    FormatTimestamp(t), FormatTimestamp(first.time)));
            }
            if (t > last.time)
            {
                return {last.value * scale_, true};
            }
            return {Interpolate(t) * scale_, false};
        }

        Timestamp const folded = first.time
            + Seconds{FloorMod((t - first.time).count(), period_.count())};
        if (folded <= last.time)
        {
            return {Interpolate(folded) * scale_, false};
        }
        // Wrap gap between the last point and the next cycle's first point.
        if (interpolation_ == Interpolation::Hold)
        {
            return {last.value * scale_, false};
        }
        Timestamp const next_first = first.time + period_;
        double const frac = static_cast<double>((folded - last.time).count())
            / static_cast<double>((next_first - last.time).count());
        return {(last.value + (first.value - last.value) * frac) * scale_, false};
    }

    ForecastSet::ForecastSet(std::vector<ForecastIssue> issues)
        : issues_(std::move(issues))
    {
        for (std::size_t i = 0; i < issues_.size(); ++i)
        {
            auto const& issue = issues_[i];
            if (i > 0 && issue.issue_time <= issues_[i - 1].issue_time)
            {
                throw ConfigError(fmt::format(
                    "forecast issue {} not after previous issue",
                    FormatTimestamp(issue.issue_time)));
            }
            if (issue.trace.Points().front().time < issue.issue_time)
            {
                throw ConfigError(fmt::format(
                    "forecast issued {} has a target before its issue time",
                    FormatTimestamp(issue.issue_time)));
            }
        }
    }

    ForecastSlice
    ForecastSet::Forecast(Timestamp request_time, Seconds horizon) const
    {
        if (horizon < Seconds{0})
        {
            throw InputError("forecast horizon must be >= 0");
        }
        auto it = std::upper_bound(
            issues_.begin(), issues_.end(), request_time,
            [](Timestamp lhs, ForecastIssue const& f) { return lhs < f.issue_time; });
        if (it == issues_.begin())
        {
            throw NoForecastError(fmt::format(
                "no forecast issued at or before {}", FormatTimestamp(request_time)));
        }
        auto const& issue = *(it - 1);
        ForecastSlice slice{issue.issue_time, {}};
        Timestamp const end = request_time + horizon;
        double const scale = issue.trace.Scale();
        for (auto const& p : issue.trace.Points())
        {
            if (p.time > request_time && p.time <= end)
            {
                slice.points.push_back({p.time, p.value * scale});
            }
        }
        return slice;
    }

    TimeSeriesTrace
    ParseTrace(
        std::string_view csv,
        ColumnSpec const& columns,
        TraceOptions const& options,
        std::string name)
    {
        auto const table = ParseCsv(csv, name);
        auto const ti = ResolveColumn(table, columns.time, name, "time");
        auto const vi = ResolveColumn(table, columns.value, name, "value");
        if (table.rows.empty())
        {
            throw IngestionError(fmt::format("{}: no data rows", name), 0);
        }
        std::vector<TracePoint> points;
        points.reserve(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r)
        {
            auto const row_no = r + 1;
            auto const& row = table.rows[r];
            if (row.size() <= std::max(ti, vi))
            {
                throw IngestionError(
                    fmt::format(
                        "{}: row {} (line {}): missing column", name, row_no,
                        table.lines[r]),
                    row_no);
            }
            Timestamp t;
            try
            {
                t = ParseTimestamp(row[ti]);
            }
            catch (std::invalid_argument const&)
            {
                throw IngestionError(
                    fmt::format(
                        "{}: row {} (line {}): unparseable timestamp '{}'", name,
                        row_no, table.lines[r], row[ti]),
                    row_no);
            }
            auto const v = ParseFiniteDouble(row[vi]);
            if (!v)
            {
                throw IngestionError(
                    fmt::format(
                        "{}: row {} (line {}): invalid value '{}'", name, row_no,
                        table.lines[r], row[vi]),
                    row_no);
            }
            if (!points.empty() && t <= points.back().time)
            {
                throw IngestionError(
                    fmt::format(
                        "{}: row {} (line {}): timestamp {} not after previous row",
                        name, row_no, table.lines[r], row[ti]),
                    row_no);
            }
            points.push_back({t, *v});
        }
        return TimeSeriesTrace{
            std::move(points), options.interpolation, options.scale,
            options.repeat, options.unit, std::move(name)};
    }

    TimeSeriesTrace
    LoadTrace(
        std::filesystem::path const& path,
        ColumnSpec const& columns,
        TraceOptions const& options)
    {
        return ParseTrace(ReadTextFile(path), columns, options, path.string());
    }

    std::optional<Timestamp>
    IssueTimeFromFileName(std::string_view file_name)
    {
        constexpr std::string_view prefix = "forecast_";
        constexpr std::string_view suffix = ".csv";
        if (file_name.size() <= prefix.size() + suffix.size()
            || file_name.substr(0, prefix.size()) != prefix
            || file_name.substr(file_name.size() - suffix.size()) != suffix)
        {
            return std::nullopt;
        }
        auto stamp = file_name.substr(
            prefix.size(), file_name.size() - prefix.size() - suffix.size());
        // Colons are awkward in file names; accept "-" or "_" as the time
        // separator too ("2024-06-01T09-00-00Z").
        std::string normalized{stamp};
        if (auto tpos = normalized.find('T'); tpos != std::string::npos)
        {
            for (std::size_t i : {tpos + 3, tpos + 6})
            {
                if (i < normalized.size()
                    && (normalized[i] == '-' || normalized[i] == '_'))
                {
                    normalized[i] = ':';
                }
            }
        }
        try
        {
            return ParseTimestamp(normalized);
        }
        catch (std::invalid_argument const&)
        {
            try
            {
                return ParseTimestamp(stamp);
            }
            catch (std::invalid_argument const&)
            {
                return std::nullopt;
            }
        }
    }

    ForecastSet
    LoadForecastSet(
        std::filesystem::path const& directory,
        ColumnSpec const& columns,
        TraceOptions const& options)
    {
        namespace fs = std::filesystem;
        if (!fs::is_directory(directory))
        {
            throw IngestionError(
                fmt::format("{}: forecast directory not found", directory.string()),
                0);
        }
        std::vector<ForecastIssue> issues;
        for (auto const& entry : fs::directory_iterator{directory})
        {
            if (!entry.is_regular_file())
            {
                continue;
            }
            auto const issued = IssueTimeFromFileName(entry.path().filename().string());
            if (!issued)
            {
                continue;
            }
            issues.push_back({*issued, LoadTrace(entry.path(), columns, options)});
        }
        if (issues.empty())
        {
            throw IngestionError(
                fmt::format(
                    "{}: no forecast_<ISO8601>.csv files found", directory.string()),
                0);
        }
        std::sort(issues.begin(), issues.end(), [](auto const& a, auto const& b) {
            return a.issue_time < b.issue_time;
        });
        return ForecastSet{std::move(issues)};
    }

    CarbonIntensitySignal::CarbonIntensitySignal(
        std::string id, TimeSeriesTrace trace, CarbonIntensityKind kind)
        : id_(std::move(id))
        , trace_(std::move(trace))
        , kind_(kind)
    {
    }

    void
    CarbonIntensitySignal::Sample(StepContext& ctx)
    {
        auto const s = trace_.SampleAt(ctx.time);
        if (s.stale)
        {
            ctx.diagnostics.push_back(fmt::format(
                "trace '{}' past its last point at {}; holding last value",
                trace_.Name(), FormatTimestamp(ctx.time)));
        }
        if (s.value < 0.0)
        {
            throw InputError(fmt::format(
                "carbon intensity {} gCO2/kWh at {} is negative", s.value,
                FormatTimestamp(ctx.time)));
        }
        ctx.carbon_intensity_gpkwh = s.value;
    }

} // namespace gridloop
