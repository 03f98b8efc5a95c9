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

#include "gridloop/storage.hpp"

#include "gridloop/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace gridloop
{
    namespace
    {
        constexpr double kJoulesPerKwh = 3.6e6;
    }

    void
    ValidateBatterySpec(BatterySpec const& spec)
    {
        if (!(spec.capacity_kwh > 0.0) || !std::isfinite(spec.capacity_kwh))
        {
            throw ConfigError(fmt::format(
                "battery capacity_kwh must be > 0 (got {})", spec.capacity_kwh));
        }
        if (!(spec.c_rate >= 0.0) || !std::isfinite(spec.c_rate))
        {
            throw ConfigError(
                fmt::format("battery c_rate must be >= 0 (got {})", spec.c_rate));
        }
        if (!(spec.charge_efficiency > 0.0 && spec.charge_efficiency <= 1.0))
        {
            throw ConfigError(fmt::format(
                "battery charge_efficiency must be in (0, 1] (got {})",
                spec.charge_efficiency));
        }
        if (!(spec.initial_soc_kwh >= 0.0 && spec.initial_soc_kwh <= spec.capacity_kwh))
        {
            throw ConfigError(fmt::format(
                "battery initial_soc_kwh must be in [0, {}] (got {})",
                spec.capacity_kwh, spec.initial_soc_kwh));
        }
    }

    BatteryUpdate
    UpdateBattery(
        BatteryState const& state,
        BatterySpec const& spec,
        double requested_power_w,
        Seconds dt)
    {
        if (dt <= Seconds{0})
        {
            throw InputError("battery update needs dt > 0");
        }
        double const dt_s = static_cast<double>(dt.count());
        double const max_w = spec.MaxPowerW();
        double const p = std::clamp(requested_power_w, -max_w, max_w);

        BatteryUpdate out;
        out.state = state;
        if (p > 0.0)
        {
            double const eta = spec.charge_efficiency;
            double const terminal_kwh = p * dt_s / kJoulesPerKwh;
            double const headroom = std::max(spec.capacity_kwh - state.soc_kwh, 0.0);
            double stored = terminal_kwh * eta;
            double accepted = p;
            if (stored >= headroom)
            {
                stored = headroom;
                accepted = stored / eta * kJoulesPerKwh / dt_s;
                out.state.soc_kwh = std::max(spec.capacity_kwh, state.soc_kwh);
            }
            else
            {
                out.state.soc_kwh = state.soc_kwh + stored;
            }
            out.accepted_power_w = accepted;
            out.stored_delta_kwh = out.state.soc_kwh - state.soc_kwh;
            out.loss_kwh = accepted * dt_s / kJoulesPerKwh - out.stored_delta_kwh;
        }
        else if (p < 0.0)
        {
            double const available = std::max(state.soc_kwh - state.min_soc_kwh, 0.0);
            double drawn = -p * dt_s / kJoulesPerKwh;
            double accepted = p;
            if (drawn >= available)
            {
                drawn = available;
                accepted = -drawn * kJoulesPerKwh / dt_s;
                out.state.soc_kwh = std::min(state.min_soc_kwh, state.soc_kwh);
            }
            else
            {
                out.state.soc_kwh = state.soc_kwh - drawn;
            }
            out.accepted_power_w = accepted;
            out.stored_delta_kwh = out.state.soc_kwh - state.soc_kwh;
        }
        return out;
    }

    void
    ValidateBatteryPolicy(
        BatterySpec const& spec,
        std::optional<double> min_soc_kwh,
        std::optional<double> grid_charge_w)
    {
        if (min_soc_kwh
            && !(*min_soc_kwh >= 0.0 && *min_soc_kwh <= spec.capacity_kwh))
        {
            throw ValidationError(fmt::format(
                "min_soc_kwh must be in [0, {}] (got {})", spec.capacity_kwh,
                *min_soc_kwh));
        }
        if (grid_charge_w && !(*grid_charge_w >= 0.0 && std::isfinite(*grid_charge_w)))
        {
            throw ValidationError(fmt::format(
                "grid_charge_w must be finite and >= 0 (got {})", *grid_charge_w));
        }
    }

    BatteryState
    SetBatteryPolicy(
        BatteryState const& state,
        BatterySpec const& spec,
        std::optional<double> min_soc_kwh,
        std::optional<double> grid_charge_w)
    {
        ValidateBatteryPolicy(spec, min_soc_kwh, grid_charge_w);
        BatteryState out = state;
        if (min_soc_kwh)
        {
            out.min_soc_kwh = *min_soc_kwh;
        }
        if (grid_charge_w)
        {
            out.grid_charge_w = *grid_charge_w;
        }
        return out;
    }

    BatterySubsystem::BatterySubsystem(std::string id, BatterySpec spec, double min_soc_kwh)
        : id_(std::move(id))
        , spec_(spec)
    {
        ValidateBatterySpec(spec_);
        try
        {
            ValidateBatteryPolicy(spec_, min_soc_kwh, std::nullopt);
        }
        catch (ValidationError const& e)
        {
            throw ConfigError(fmt::format("battery '{}': {}", id_, e.what()));
        }
        state_.soc_kwh = spec_.initial_soc_kwh;
        state_.min_soc_kwh = min_soc_kwh;
    }

    void
    BatterySubsystem::Apply(BatteryUpdate const& update, Seconds dt)
    {
        double const terminal_kwh = update.accepted_power_w
            * static_cast<double>(dt.count()) / kJoulesPerKwh;
        if (terminal_kwh > 0.0)
        {
            counters_.charged_kwh += terminal_kwh;
        }
        else
        {
            counters_.discharged_kwh -= terminal_kwh;
        }
        counters_.loss_kwh += update.loss_kwh;
        state_ = update.state;
    }

    void
    BatterySubsystem::SetPolicy(
        std::optional<double> min_soc_kwh, std::optional<double> grid_charge_w)
    {
        state_ = SetBatteryPolicy(state_, spec_, min_soc_kwh, grid_charge_w);
    }

} // namespace gridloop
