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

#include <memory>
#include <string>
#include <vector>

namespace gridloop
{

    struct SolarPanelSpec
    {
        double area_m2 = 1.0;
        /// Fraction of incident irradiance converted to electrical power.
        double efficiency = 0.18;
    };

    /// Typical commercial module efficiency range; values outside produce a
    /// configuration warning, not an error.
    inline constexpr double kTypicalSolarEfficiencyMin = 0.15;
    inline constexpr double kTypicalSolarEfficiencyMax = 0.20;

    /// Throws ConfigError for area <= 0 or efficiency outside (0, 1]. Returns
    /// warnings (efficiency outside the typical range).
    std::vector<std::string>
    ValidateSolarPanel(SolarPanelSpec const& spec);

    /// irradiance * area * efficiency. Irradiance is whatever component the
    /// trace provides (GHI or plane-of-array). Throws InputError if negative.
    double
    SolarPower(double irradiance_w_per_m2, SolarPanelSpec const& spec);

    struct PowerCurvePoint
    {
        double wind_speed_mps = 0.0;
        double power_w = 0.0;
    };

    struct WindTurbineSpec
    {
        std::vector<PowerCurvePoint> power_curve;
        double cut_in_mps = 3.0;
        double cut_out_mps = 25.0;
        double hub_height_m = 100.0;
        double reference_height_m = 100.0;
        /// Power-law wind shear exponent (1/7 for open terrain).
        double shear_exponent = 1.0 / 7.0;
    };

    /// Throws ConfigError on a malformed spec.
    void
    ValidateWindTurbine(WindTurbineSpec const& spec);

    /// v_ref * (hub / ref)^shear
    double
    HubHeightWindSpeed(double reference_speed_mps, WindTurbineSpec const& spec);

    /// Zero outside [cut_in, cut_out] (at hub height), otherwise linear
    /// interpolation on the power curve, held at the curve's end values.
    /// Throws InputError for negative wind speed.
    double
    WindPower(double reference_speed_mps, WindTurbineSpec const& spec);

    /// Reads `wind_speed_mps,power_w`.
    std::vector<PowerCurvePoint>
    LoadPowerCurve(std::filesystem::path const& path);

    class TraceProducer final : public Producer
    {
      public:
        TraceProducer(std::string id, TimeSeriesTrace trace, std::string category = "other");

        [[nodiscard]] std::string const&
        Id() const override
        {
            return id_;
        }
        [[nodiscard]] std::string const&
        Category() const override
        {
            return category_;
        }
        double
        PowerW(StepContext& ctx) override;

      private:
        std::string id_;
        std::string category_;
        TimeSeriesTrace trace_;
    };

    class SolarProducer final : public Producer
    {
      public:
        SolarProducer(std::string id, SolarPanelSpec spec, TimeSeriesTrace irradiance);

        [[nodiscard]] std::string const&
        Id() const override
        {
            return id_;
        }
        [[nodiscard]] std::string const&
        Category() const override
        {
            return category_;
        }
        double
        PowerW(StepContext& ctx) override;

      private:
        std::string id_;
        std::string category_{"solar"};
        SolarPanelSpec spec_;
        TimeSeriesTrace irradiance_;
    };

    class WindProducer final : public Producer
    {
      public:
        WindProducer(std::string id, WindTurbineSpec spec, TimeSeriesTrace wind_speed);

        [[nodiscard]] std::string const&
        Id() const override
        {
            return id_;
        }
        [[nodiscard]] std::string const&
        Category() const override
        {
            return category_;
        }
        double
        PowerW(StepContext& ctx) override;

      private:
        std::string id_;
        std::string category_{"wind"};
        WindTurbineSpec spec_;
        TimeSeriesTrace wind_speed_;
    };

} // namespace gridloop
