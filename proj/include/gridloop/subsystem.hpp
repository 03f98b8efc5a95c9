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

#include "gridloop/time.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gridloop
{

    struct ProducerReading
    {
        std::string id;
        std::string category;
        double power_w = 0.0;
    };

    struct NodeReading
    {
        std::string id;
        double power_w = 0.0;
        bool stale = false;
        std::optional<double> cap_w;
    };

    /// Scratch state shared by the subsystems of one step. Power within a
    /// step is constant over [time, time + dt).
    struct StepContext
    {
        Timestamp time;
        Seconds dt{0};
        double carbon_intensity_gpkwh = 0.0;
        std::vector<ProducerReading> producers;
        std::vector<NodeReading> nodes;
        /// Non-fatal notes (stale traces, clamped utilization, ...).
        std::vector<std::string> diagnostics;
    };

    /// Exogenous inputs sampled first in every step (carbon intensity, ...).
    class Signal
    {
      public:
        virtual ~Signal() = default;
        [[nodiscard]] virtual std::string const&
        Id() const = 0;
        virtual void
        Sample(StepContext& ctx) = 0;
    };

    class Producer
    {
      public:
        virtual ~Producer() = default;
        [[nodiscard]] virtual std::string const&
        Id() const = 0;
        /// "solar", "wind" or "other"; used to group visibility reads.
        [[nodiscard]] virtual std::string const&
        Category() const = 0;
        /// Power delivered over the step, watts >= 0.
        [[nodiscard]] virtual double
        PowerW(StepContext& ctx) = 0;
    };

    class NodeMeter;

    class Consumer
    {
      public:
        virtual ~Consumer() = default;
        [[nodiscard]] virtual std::string const&
        Id() const = 0;
        /// Power drawn over the step (including facility overhead), watts >= 0.
        [[nodiscard]] virtual double
        PowerW(StepContext& ctx) = 0;
        /// Individually addressable nodes behind this consumer, if any.
        [[nodiscard]] virtual std::span<std::shared_ptr<NodeMeter> const>
        NodeMeters() const
        {
            return {};
        }
    };

    class BatterySubsystem;

    using SubsystemHandle = std::variant<
        std::shared_ptr<Signal>,
        std::shared_ptr<Producer>,
        std::shared_ptr<Consumer>,
        std::shared_ptr<BatterySubsystem>>;

    enum class SubsystemKind
    {
        Signal = 0,
        Producer = 1,
        Consumer = 2,
        Storage = 3,
    };

} // namespace gridloop
