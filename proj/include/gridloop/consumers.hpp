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

#include "gridloop/signals.hpp"
#include "gridloop/subsystem.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gridloop
{

    using WallTime = std::chrono::steady_clock::time_point;
    using WallClockFn = std::function<WallTime()>;

    /// Piecewise-linear utilization -> power ladder (SPECpower style).
    struct PowerModel
    {
        /// (utilization in [0, 1], watts); first utilization 0, last 1.
        std::vector<std::pair<double, double>> load_points;
    };

    /// Throws ConfigError.
    void
    ValidatePowerModel(PowerModel const& model);

    struct PowerModelSample
    {
        double power_w = 0.0;
        /// The utilization had to be clamped into [0, 1].
        bool clamped = false;
    };

    PowerModelSample
    EvaluatePowerModel(PowerModel const& model, double utilization);

    /// Reads `utilization,power_w`.
    PowerModel
    LoadPowerModel(std::filesystem::path const& path);

    struct ConstantPue
    {
        double pue = 1.0;
    };

    /// Facility power as a function of IT power.
    struct OverheadTable
    {
        /// (it_power_w, total_power_w), IT strictly increasing, total
        /// non-decreasing and >= IT.
        std::vector<std::pair<double, double>> points;
    };

    using OverheadModel = std::variant<ConstantPue, OverheadTable>;

    /// Throws ConfigError.
    void
    ValidateOverhead(OverheadModel const& model);

    /// Reads `it_power_w,total_power_w`.
    OverheadTable
    LoadOverheadTable(std::filesystem::path const& path);

    /// Total facility power for a given IT load. The table variant is
    /// interpolated and clamped to its end points, and never reports less
    /// than the IT load itself.
    double
    FacilityPower(OverheadModel const& model, double it_power_w);

    enum class MeterKind
    {
        Push,
        Model,
        Trace,
    };

    std::string_view
    ToString(MeterKind kind);

    /// One compute node's power source.
    ///
    /// Push meters are written by external agents from API threads; every
    /// other member is touched only by the kernel thread.
    class NodeMeter
    {
      public:
        static std::shared_ptr<NodeMeter>
        Push(std::string id, Seconds staleness_timeout, double initial_power_w = 0.0);

        static std::shared_ptr<NodeMeter>
        Model(std::string id, PowerModel model, TimeSeriesTrace utilization);

        static std::shared_ptr<NodeMeter>
        Trace(std::string id, TimeSeriesTrace power);

        [[nodiscard]] std::string const&
        Id() const noexcept
        {
            return id_;
        }
        [[nodiscard]] MeterKind
        Kind() const noexcept
        {
            return kind_;
        }
        [[nodiscard]] Seconds
        StalenessTimeout() const noexcept
        {
            return staleness_timeout_;
        }

        /// Thread-safe. Throws ValidationError for negative or non-finite
        /// power and ConfigError for non-push meters.
        void
        PushMeasurement(double power_w, WallTime at);

        /// Power at simulated time t, after the cap. `wall_now` drives push
        /// staleness. Notes clamping/staleness in `diagnostics`.
        [[nodiscard]] NodeReading
        Read(Timestamp t, WallTime wall_now, std::vector<std::string>* diagnostics = nullptr) const;

        [[nodiscard]] std::optional<double>
        Cap() const noexcept
        {
            return cap_w_;
        }

        /// Throws ValidationError for a negative cap.
        void
        SetCap(std::optional<double> cap_w);

      private:
        NodeMeter(std::string id, MeterKind kind);

        struct PushCell
        {
            double power_w = 0.0;
            std::optional<WallTime> at;
        };

        std::string id_;
        MeterKind kind_;
        Seconds staleness_timeout_{0};
        std::optional<PowerModel> model_;
        std::optional<TimeSeriesTrace> trace_;
        std::optional<double> cap_w_;

        mutable std::mutex push_mutex_;
        PushCell push_;
    };

    void
    ValidateCap(std::optional<double> cap_w);

    struct ConsumptionTotals
    {
        double it_power_w = 0.0;
        double total_power_w = 0.0;
    };

    /// IT power is the sum of node readings (summed in ascending order, so
    /// the result does not depend on meter order); total applies overhead.
    ConsumptionTotals
    TotalConsumption(std::span<NodeReading const> readings, OverheadModel const& overhead);

    ConsumptionTotals
    TotalConsumption(
        std::span<std::shared_ptr<NodeMeter> const> meters,
        OverheadModel const& overhead,
        Timestamp t,
        WallTime wall_now);

    /// A group of node meters behind one overhead model.
    class ComputeFacility final : public Consumer
    {
      public:
        ComputeFacility(
            std::string id,
            std::vector<std::shared_ptr<NodeMeter>> meters,
            OverheadModel overhead,
            WallClockFn wall_clock = [] { return std::chrono::steady_clock::now(); });

        [[nodiscard]] std::string const&
        Id() const override
        {
            return id_;
        }
        double
        PowerW(StepContext& ctx) override;

        [[nodiscard]] std::span<std::shared_ptr<NodeMeter> const>
        NodeMeters() const override
        {
            return meters_;
        }
        [[nodiscard]] OverheadModel const&
        Overhead() const noexcept
        {
            return overhead_;
        }

      private:
        std::string id_;
        std::vector<std::shared_ptr<NodeMeter>> meters_;
        OverheadModel overhead_;
        WallClockFn wall_clock_;
    };

} // namespace gridloop
