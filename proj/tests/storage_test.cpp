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

#include "gridloop/errors.hpp"
#include "gridloop/storage.hpp"
#include "test_support.hpp"

using namespace gridloop;

namespace
{
    BatterySpec
    TenKwh(double eta = 0.9, double c_rate = 1.0, double soc = 5.0)
    {
        return BatterySpec{10.0, c_rate, eta, soc};
    }
} // namespace

TEST(BatteryTest, ChargeAppliesEfficiency)
{
    auto const u = UpdateBattery({5.0, 0.0, 0.0}, TenKwh(), 1000.0, Seconds{3600});
    EXPECT_DOUBLE_EQ(u.accepted_power_w, 1000.0);
    EXPECT_DOUBLE_EQ(u.state.soc_kwh, 5.9);
    EXPECT_NEAR(u.loss_kwh, 0.1, 1e-12);
}

TEST(BatteryTest, CRateClamp)
{
    auto const u = UpdateBattery({0.0, 0.0, 0.0}, TenKwh(1.0, 1.0, 0.0), 20'000.0, Seconds{60});
    EXPECT_EQ(u.accepted_power_w, 10'000.0);
    auto const d = UpdateBattery({10.0, 0.0, 0.0}, TenKwh(1.0, 1.0, 0.0), -20'000.0, Seconds{60});
    EXPECT_EQ(d.accepted_power_w, -10'000.0);
}

// accepted = -(soc - min_soc) * 1000 * 3600 / dt, cross-checked by
// integrating the same request in one-second sub-steps.
TEST(BatteryTest, DischargeFloorClamp)
{
    BatteryState const s{5.0, 4.8, 0.0};
    auto const u = UpdateBattery(s, TenKwh(), -1000.0, Seconds{3600});
    double const expected = -(5.0 - 4.8) * 1000.0 * 3600.0 / 3600.0;
    EXPECT_NEAR(u.accepted_power_w, expected, 1e-9);
    EXPECT_NEAR(u.accepted_power_w, -200.0, 1e-9);
    EXPECT_EQ(u.state.soc_kwh, 4.8);

    BatteryState sub = s;
    double energy_j = 0.0;
    for (int i = 0; i < 3600; ++i)
    {
        auto const step = UpdateBattery(sub, TenKwh(), -1000.0, Seconds{1});
        energy_j += step.accepted_power_w;
        sub = step.state;
    }
    EXPECT_NEAR(energy_j / 3600.0, u.accepted_power_w, 1e-9);
    EXPECT_EQ(sub.soc_kwh, u.state.soc_kwh);
}

TEST(BatteryTest, CapacityClampRecomputesAcceptedPower)
{
    auto const u = UpdateBattery({9.95, 0.0, 0.0}, TenKwh(0.5), 10'000.0, Seconds{3600});
    EXPECT_EQ(u.state.soc_kwh, 10.0);
    // 0.05 kWh stored needs 0.1 kWh at the terminals over one hour.
    EXPECT_NEAR(u.accepted_power_w, 100.0, 1e-9);
    EXPECT_NEAR(u.loss_kwh, 0.05, 1e-12);
}

TEST(BatteryTest, ZeroRequestIsAFixpoint)
{
    BatteryState const s{3.3, 1.0, 0.0};
    auto const u = UpdateBattery(s, TenKwh(), 0.0, Seconds{60});
    EXPECT_EQ(u.state, s);
    EXPECT_EQ(u.accepted_power_w, 0.0);
}

TEST(BatteryTest, FloorAboveSocRefusesDischargeOnly)
{
    BatteryState const s{2.0, 3.0, 0.0};
    auto const d = UpdateBattery(s, TenKwh(), -500.0, Seconds{60});
    EXPECT_EQ(d.accepted_power_w, 0.0);
    EXPECT_EQ(d.state.soc_kwh, 2.0);
    auto const c = UpdateBattery(s, TenKwh(), 600.0, Seconds{60});
    EXPECT_GT(c.state.soc_kwh, 2.0);
}

TEST(BatteryTest, NonPositiveDtRejected)
{
    EXPECT_THROW((void)UpdateBattery({}, TenKwh(), 1.0, Seconds{0}), InputError);
}

TEST(BatteryPolicyTest, Validation)
{
    auto const spec = TenKwh();
    EXPECT_THROW((void)SetBatteryPolicy({}, spec, 10.5, std::nullopt), ValidationError);
    EXPECT_THROW((void)SetBatteryPolicy({}, spec, -0.1, std::nullopt), ValidationError);
    EXPECT_THROW((void)SetBatteryPolicy({}, spec, std::nullopt, -1.0), ValidationError);
    auto const s = SetBatteryPolicy({5.0, 0.0, 0.0}, spec, 3.0, std::nullopt);
    EXPECT_EQ(s.min_soc_kwh, 3.0);
    EXPECT_EQ(s.grid_charge_w, 0.0);
    auto const s2 = SetBatteryPolicy(s, spec, std::nullopt, 500.0);
    EXPECT_EQ(s2.min_soc_kwh, 3.0);
    EXPECT_EQ(s2.grid_charge_w, 500.0);
}

TEST(BatteryPolicyTest, DischargesStopAtNewFloor)
{
    BatterySubsystem battery{"b", TenKwh(1.0, 1.0, 8.0)};
    battery.SetPolicy(3.0, std::nullopt);
    for (int i = 0; i < 100; ++i)
    {
        auto const u = UpdateBattery(battery.State(), battery.Spec(), -5000.0, Seconds{600});
        battery.Apply(u, Seconds{600});
    }
    EXPECT_EQ(battery.State().soc_kwh, 3.0);
    EXPECT_NEAR(battery.Counters().discharged_kwh, 5.0, 1e-9);
}

TEST(BatterySpecTest, Validation)
{
    EXPECT_THROW(ValidateBatterySpec({0.0, 1.0, 0.9, 0.0}), ConfigError);
    EXPECT_THROW(ValidateBatterySpec({10.0, -1.0, 0.9, 0.0}), ConfigError);
    EXPECT_THROW(ValidateBatterySpec({10.0, 1.0, 0.0, 0.0}), ConfigError);
    EXPECT_THROW(ValidateBatterySpec({10.0, 1.0, 1.1, 0.0}), ConfigError);
    EXPECT_THROW(ValidateBatterySpec({10.0, 1.0, 0.9, 11.0}), ConfigError);
    EXPECT_THROW(BatterySubsystem("b", TenKwh(), 11.0), ConfigError);
    EXPECT_DOUBLE_EQ(TenKwh(0.9, 0.5).MaxPowerW(), 5000.0);
}
