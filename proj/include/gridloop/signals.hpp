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

#include "gridloop/subsystem.hpp"
#include "gridloop/time.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gridloop
{

    enum class Interpolation
    {
        /// value at the latest point with timestamp <= t
        Hold,
        Linear,
    };

    /// Physical dimension of a trace. Checked when a trace is bound to a
    /// subsystem so that e.g. a wind-speed file can't feed a PV panel.
    enum class Unit
    {
        Watts,
        WattsPerSquareMeter,
        MetersPerSecond,
        Fraction,
        GramsPerKilowattHour,
        Dimensionless,
    };

    Unit
    ParseUnit(std::string_view text);

    std::string_view
    ToString(Unit unit);

    Interpolation
    ParseInterpolation(std::string_view text);

    std::string_view
    ToString(Interpolation interpolation);

    struct TracePoint
    {
        Timestamp time;
        double value = 0.0;

        friend bool
        operator==(TracePoint const&, TracePoint const&) = default;
    };

    struct Sample
    {
        double value = 0.0;
        /// t lies past the last point of a non-repeating trace; value is the
        /// last point held.
        bool stale = false;
    };

    /// Immutable timestamped scalar series.
    ///
    /// Sampled value = interpolate(points, t) * scale. With `repeat`, the
    /// series is replayed cyclically with period
    /// (last - first) + (last - second-to-last); in the wrap gap linear
    /// interpolation runs towards the first point of the next cycle.
    class TimeSeriesTrace
    {
      public:
        TimeSeriesTrace(
            std::vector<TracePoint> points,
            Interpolation interpolation,
            double scale = 1.0,
            bool repeat = false,
            Unit unit = Unit::Dimensionless,
            std::string name = {});

        /// Throws OutOfRangeError when t precedes the first point and the
        /// trace does not repeat.
        [[nodiscard]] Sample
        SampleAt(Timestamp t) const;

        [[nodiscard]] double
        ValueAt(Timestamp t) const
        {
            return SampleAt(t).value;
        }

        [[nodiscard]] std::vector<TracePoint> const&
        Points() const noexcept
        {
            return points_;
        }
        [[nodiscard]] Interpolation
        GetInterpolation() const noexcept
        {
            return interpolation_;
        }
        [[nodiscard]] double
        Scale() const noexcept
        {
            return scale_;
        }
        [[nodiscard]] bool
        Repeats() const noexcept
        {
            return repeat_;
        }
        [[nodiscard]] Unit
        GetUnit() const noexcept
        {
            return unit_;
        }
        [[nodiscard]] std::string const&
        Name() const noexcept
        {
            return name_;
        }
        [[nodiscard]] Seconds
        Period() const noexcept
        {
            return period_;
        }

      private:
        [[nodiscard]] double
        Interpolate(Timestamp t) const;

        std::vector<TracePoint> points_;
        Interpolation interpolation_;
        double scale_;
        bool repeat_;
        Unit unit_;
        std::string name_;
        Seconds period_{0};
    };

    /// Trace values whose target times lie in (request, request + horizon],
    /// taken from the latest issue at or before the request.
    struct ForecastSlice
    {
        Timestamp issue_time;
        std::vector<TracePoint> points;
    };

    struct ForecastIssue
    {
        Timestamp issue_time;
        TimeSeriesTrace trace;
    };

    class ForecastSet
    {
      public:
        /// Issues must have strictly increasing issue times and no target
        /// earlier than their own issue time. Throws ConfigError otherwise.
        explicit ForecastSet(std::vector<ForecastIssue> issues);

        /// Throws NoForecastError when nothing was issued at or before
        /// request_time.
        [[nodiscard]] ForecastSlice
        Forecast(Timestamp request_time, Seconds horizon) const;

        [[nodiscard]] std::vector<ForecastIssue> const&
        Issues() const noexcept
        {
            return issues_;
        }

      private:
        std::vector<ForecastIssue> issues_;
    };

    /// Selects a CSV column either by header name or by 0-based index.
    using ColumnRef = std::variant<std::string, std::size_t>;

    struct ColumnSpec
    {
        ColumnRef time = std::size_t{0};
        ColumnRef value = std::size_t{1};
    };

    struct TraceOptions
    {
        Unit unit = Unit::Dimensionless;
        Interpolation interpolation = Interpolation::Hold;
        double scale = 1.0;
        bool repeat = false;
    };

    /// Reads a headed CSV whose time column holds ISO-8601 UTC or epoch
    /// seconds. Rejects empty files, unparseable or non-finite values and
    /// non-increasing timestamps with an IngestionError naming the row.
    TimeSeriesTrace
    LoadTrace(
        std::filesystem::path const& path,
        ColumnSpec const& columns,
        TraceOptions const& options);

    /// Same as LoadTrace, from an in-memory CSV document.
    TimeSeriesTrace
    ParseTrace(
        std::string_view csv,
        ColumnSpec const& columns,
        TraceOptions const& options,
        std::string name = {});

    /// Loads every `forecast_<ISO8601>.csv` in `directory`; the issue time is
    /// taken from the file name.
    ForecastSet
    LoadForecastSet(
        std::filesystem::path const& directory,
        ColumnSpec const& columns,
        TraceOptions const& options);

    enum class CarbonIntensityKind
    {
        Average,
        Marginal,
    };

    /// Samples a gCO2/kWh trace into StepContext::carbon_intensity_gpkwh.
    /// Whether the trace holds average or marginal intensity is metadata
    /// only; accounting treats both the same way.
    class CarbonIntensitySignal final : public Signal
    {
      public:
        CarbonIntensitySignal(
            std::string id,
            TimeSeriesTrace trace,
            CarbonIntensityKind kind = CarbonIntensityKind::Average);

        [[nodiscard]] std::string const&
        Id() const override
        {
            return id_;
        }
        void
        Sample(StepContext& ctx) override;

        [[nodiscard]] CarbonIntensityKind
        Kind() const noexcept
        {
            return kind_;
        }

      private:
        std::string id_;
        TimeSeriesTrace trace_;
        CarbonIntensityKind kind_;
    };

    /// Parses the issue time out of a `forecast_<ISO8601>.csv` file name.
    std::optional<Timestamp>
    IssueTimeFromFileName(std::string_view file_name);

} // namespace gridloop
