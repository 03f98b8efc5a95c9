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

#include "gridloop/microgrid.hpp"

#include "gridloop/errors.hpp"

#include <algorithm>

#include <fmt/core.h>

namespace gridloop
{

    double
    ImportCarbonGrams(double grid_power_w, Seconds dt, double ci_gpkwh)
    {
        return std::max(grid_power_w, 0.0) * static_cast<double>(dt.count())
            / 3600.0 / 1000.0 * ci_gpkwh;
    }

    BalanceResult
    Balance(
        double production_w,
        double consumption_w,
        std::optional<BatteryView> const& battery,
        double ci_gpkwh,
        Seconds dt)
    {
        if (!(production_w >= 0.0) || !(consumption_w >= 0.0))
        {
            throw InputError(fmt::format(
                "balance needs production and consumption >= 0 (got {}, {})",
                production_w, consumption_w));
        }
        if (dt <= Seconds{0})
        {
            throw InputError("balance needs dt > 0");
        }

        BalanceResult out;
        if (battery)
        {
            double const request =
                production_w - consumption_w + battery->state.grid_charge_w;
            out.battery = UpdateBattery(battery->state, battery->spec, request, dt);
            out.battery_accepted_w = out.battery->accepted_power_w;
        }
        out.grid.grid_power_w = consumption_w + out.battery_accepted_w - production_w;
        out.grid.energy_kwh =
            out.grid.grid_power_w * static_cast<double>(dt.count()) / 3600.0 / 1000.0;
        out.grid.carbon_g = ImportCarbonGrams(out.grid.grid_power_w, dt, ci_gpkwh);
        return out;
    }

    bool
    ExcessLeZero(StepRecord const& record)
    {
        return record.production_w - record.consumption_w <= 0.0;
    }

} // namespace gridloop
