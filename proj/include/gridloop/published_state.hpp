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

#include "gridloop/record.hpp"
#include "gridloop/subsystem.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace gridloop
{

    struct BatterySnapshot
    {
        double soc_kwh = 0.0;
        double capacity_kwh = 0.0;
        double min_soc_kwh = 0.0;
        double grid_charge_w = 0.0;
        double max_power_w = 0.0;
        double charged_kwh_total = 0.0;
        double discharged_kwh_total = 0.0;
    };

    /// Everything API readers may see about one committed step. Immutable
    /// once published.
    struct PublishedState
    {
        /// 0-based index of the committed step.
        std::uint64_t step_index = 0;
        StepRecord record;
        std::vector<ProducerReading> producers;
        std::vector<NodeReading> nodes;
        std::optional<BatterySnapshot> battery;
        std::chrono::system_clock::time_point step_committed_at;
        /// Effective time handed to writes arriving now.
        Timestamp next_commit;

        [[nodiscard]] Timestamp
        SimTime() const noexcept
        {
            return record.time;
        }
    };

    /// Holds the latest snapshot. Publish and Load only swap / copy a
    /// shared_ptr under a short lock, so readers never wait on a step.
    class StateStore
    {
      public:
        [[nodiscard]] std::shared_ptr<PublishedState const>
        Load() const
        {
            std::lock_guard lock{mutex_};
            return current_;
        }

        void
        Publish(std::shared_ptr<PublishedState const> state)
        {
            std::lock_guard lock{mutex_};
            current_.swap(state);
        }

      private:
        mutable std::mutex mutex_;
        std::shared_ptr<PublishedState const> current_;
    };

} // namespace gridloop
