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

#include <chrono>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gridloop
{

    enum class DirectiveTarget
    {
        BatteryMinSoc,
        BatteryGridCharge,
        NodePowerCap,
    };

    /// A buffered control write awaiting the next step boundary.
    struct ControlDirective
    {
        DirectiveTarget target = DirectiveTarget::BatteryMinSoc;
        /// Node id for NodePowerCap, empty otherwise.
        std::string node_id;
        /// nullopt only for NodePowerCap (removes the cap).
        std::optional<double> value;
        std::chrono::system_clock::time_point received_at;

        /// "battery.min_soc", "battery.grid_charge_w" or
        /// "node.<id>.power_cap_w". Aggregation is per key.
        [[nodiscard]] std::string
        Key() const;
    };

    struct DrainedDirectives
    {
        /// Simulation time of the step that applies them.
        Timestamp commit_time;
        /// At most one per key, in key order.
        std::vector<ControlDirective> directives;
        /// Everything enqueued during the window, including overwritten ones.
        std::size_t received = 0;
    };

    /// Thread-safe last-writer-wins buffer between API threads and the
    /// kernel. Enqueue and Drain share one lock, so the effective time handed
    /// back to a writer is always the step that will apply its directive.
    class DirectiveBuffer
    {
      public:
        explicit DirectiveBuffer(Timestamp first_commit);

        /// Returns the simulation time at which the directive takes effect.
        Timestamp
        Enqueue(ControlDirective directive);

        /// Queues all directives under one lock, so they land in the same
        /// commit.
        Timestamp
        Enqueue(std::vector<ControlDirective> directives);

        /// Hands over the pending window for the step at the current commit
        /// time; later writes land in the window ending at `next_commit`.
        DrainedDirectives
        Drain(Timestamp next_commit);

        [[nodiscard]] Timestamp
        NextCommit() const;

        [[nodiscard]] std::size_t
        Pending() const;

      private:
        mutable std::mutex mutex_;
        Timestamp next_commit_;
        std::map<std::string, ControlDirective> pending_;
        std::size_t received_ = 0;
    };

} // namespace gridloop
