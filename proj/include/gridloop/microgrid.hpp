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
#include "gridloop/storage.hpp"
#include "gridloop/time.hpp"

#include <optional>

namespace gridloop
{

    struct GridExchange
    {
        /// Positive = import.
        double grid_power_w = 0.0;
        /// Signed energy over the step.
        double energy_kwh = 0.0;
        /// Import only; export earns no credit.
        double carbon_g = 0.0;
    };

    /// Grams of CO2 for importing `grid_power_w` over `dt` at `ci_gpkwh`.
    double
    ImportCarbonGrams(double grid_power_w, Seconds dt, double ci_gpkwh);

    struct BatteryView
    {
        BatteryState state;
        BatterySpec spec;
    };

    struct BalanceResult
    {
        GridExchange grid;
        double battery_accepted_w = 0.0;
        /// Present when a battery took part.
        std::optional<BatteryUpdate> battery;
    };

    /// Single-bus lossless balance with battery-first dispatch. The battery
    /// is asked for (production - consumption + grid_charge); whatever it
    /// doesn't accept is closed by an uncapped grid connection.
    BalanceResult
    Balance(
        double production_w,
        double consumption_w,
        std::optional<BatteryView> const& battery,
        double ci_gpkwh,
        Seconds dt);

    /// Built-in pacing predicate: true iff the record shows no renewable
    /// excess (production <= consumption).
    bool
    ExcessLeZero(StepRecord const& record);

} // namespace gridloop
