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

namespace gridloop
{

    /// Snapshot of every power flow over one step [time, time + dt).
    ///
    /// Balance: production - consumption - battery_power + grid_power = 0.
    struct StepRecord
    {
        Timestamp time;
        double production_w = 0.0;
        /// Includes facility overhead.
        double consumption_w = 0.0;
        /// Positive = charging.
        double battery_power_w = 0.0;
        double battery_soc_kwh = 0.0;
        /// Positive = import from the grid.
        double grid_power_w = 0.0;
        double carbon_intensity_gpkwh = 0.0;
        double step_carbon_g = 0.0;
        /// Set when the step overran its wall-clock slot. The only field
        /// that depends on pacing.
        bool deadline_missed = false;

        friend bool
        operator==(StepRecord const&, StepRecord const&) = default;
    };

    /// Equality of every simulated value, ignoring deadline_missed.
    inline bool
    SameSimulatedValues(StepRecord const& a, StepRecord const& b)
    {
        StepRecord x = a;
        x.deadline_missed = b.deadline_missed;
        return x == b;
    }

} // namespace gridloop
