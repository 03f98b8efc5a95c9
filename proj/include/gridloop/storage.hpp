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

#include <optional>
#include <string>

namespace gridloop
{

    struct BatterySpec
    {
        double capacity_kwh = 10.0;
        /// Max |power| = c_rate * capacity (per hour).
        double c_rate = 1.0;
        /// Applied on charge only; discharge is lossless.
        double charge_efficiency = 1.0;
        double initial_soc_kwh = 0.0;

        [[nodiscard]] double
        MaxPowerW() const
        {
            return c_rate * capacity_kwh * 1000.0;
        }
    };

    /// Throws ConfigError.
    void
    ValidateBatterySpec(BatterySpec const& spec);

    struct BatteryState
    {
        double soc_kwh = 0.0;
        /// Discharge floor. soc may sit below it (e.g. initial configuration);
        /// it then only refuses further discharge.
        double min_soc_kwh = 0.0;
        /// Forced charge rate drawn from the grid on top of any surplus.
        double grid_charge_w = 0.0;

        friend bool
        operator==(BatteryState const&, BatteryState const&) = default;
    };

    struct BatteryUpdate
    {
        /// Terminal power actually exchanged, positive = charging.
        double accepted_power_w = 0.0;
        BatteryState state;
        /// new soc - old soc
        double stored_delta_kwh = 0.0;
        /// Terminal energy that did not reach storage (charge losses).
        double loss_kwh = 0.0;
    };

    /// Reference high-level battery step:
    ///  - the request is clamped to +/- c_rate * capacity;
    ///  - charging stores p * dt * efficiency, limited so soc <= capacity;
    ///  - discharging removes p * dt, limited so soc >= min_soc;
    ///  - accepted power is recomputed from the clamped energy.
    /// Never throws for out-of-range requests; dt must be positive.
    BatteryUpdate
    UpdateBattery(
        BatteryState const& state,
        BatterySpec const& spec,
        double requested_power_w,
        Seconds dt);

    /// Applies whichever fields are given. Throws ValidationError when
    /// min_soc is outside [0, capacity] or grid_charge is negative.
    BatteryState
    SetBatteryPolicy(
        BatteryState const& state,
        BatterySpec const& spec,
        std::optional<double> min_soc_kwh,
        std::optional<double> grid_charge_w);

    /// Validation half of SetBatteryPolicy, usable before a change is queued.
    void
    ValidateBatteryPolicy(
        BatterySpec const& spec,
        std::optional<double> min_soc_kwh,
        std::optional<double> grid_charge_w);

    /// Cumulative terminal throughput, for external aging models.
    struct BatteryCounters
    {
        double charged_kwh = 0.0;
        double discharged_kwh = 0.0;
        double loss_kwh = 0.0;
    };

    /// The storage unit registered with the kernel: owns the spec, the
    /// mutable state and the throughput counters.
    class BatterySubsystem
    {
      public:
        BatterySubsystem(std::string id, BatterySpec spec, double min_soc_kwh = 0.0);

        [[nodiscard]] std::string const&
        Id() const noexcept
        {
            return id_;
        }
        [[nodiscard]] BatterySpec const&
        Spec() const noexcept
        {
            return spec_;
        }
        [[nodiscard]] BatteryState const&
        State() const noexcept
        {
            return state_;
        }
        [[nodiscard]] BatteryCounters const&
        Counters() const noexcept
        {
            return counters_;
        }

        /// Commits an update computed by UpdateBattery against State().
        void
        Apply(BatteryUpdate const& update, Seconds dt);

        void
        SetPolicy(std::optional<double> min_soc_kwh, std::optional<double> grid_charge_w);

      private:
        std::string id_;
        BatterySpec spec_;
        BatteryState state_;
        BatteryCounters counters_;
    };

} // namespace gridloop
