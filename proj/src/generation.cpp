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

#include "gridloop/generation.hpp"

#include "gridloop/csv.hpp"
#include "gridloop/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace gridloop
{
    namespace
    {
        void
        NoteStale(StepContext& ctx, Sample const& s, std::string const& trace_name)
        {
            if (s.stale)
            {
                ctx.diagnostics.push_back(fmt::format(
                    "trace '{}' past its last point at {}; holding last value",
                    trace_name, FormatTimestamp(ctx.time)));
            }
        }
    } // namespace

    std::vector<std::string>
    ValidateSolarPanel(SolarPanelSpec const& spec)
    {
        if (!(spec.area_m2 > 0.0) || !std::isfinite(spec.area_m2))
        {
            throw ConfigError(
                fmt::format("solar area_m2 must be > 0 (got {})", spec.area_m2));
        }
        if (!(spec.efficiency > 0.0 && spec.efficiency <= 1.0))
        {
            throw ConfigError(fmt::format(
                "solar efficiency must be in (0, 1] (got {})", spec.efficiency));
        }
        std::vector<std::string> warnings;
        if (spec.efficiency < kTypicalSolarEfficiencyMin
            || spec.efficiency > kTypicalSolarEfficiencyMax)
        {
            warnings.push_back(fmt::format(
                "solar efficiency {} is outside the typical range of 15-20%",
                spec.efficiency));
        }
        return warnings;
    }

    double
    SolarPower(double irradiance_w_per_m2, SolarPanelSpec const& spec)
    {
        if (!(irradiance_w_per_m2 >= 0.0))
        {
            throw InputError(fmt::format(
                "irradiance must be >= 0 W/m2 (got {})", irradiance_w_per_m2));
        }
        return irradiance_w_per_m2 * spec.area_m2 * spec.efficiency;
    }

    void
    ValidateWindTurbine(WindTurbineSpec const& spec)
    {
        if (spec.power_curve.empty())
        {
            throw ConfigError("wind power curve needs at least one point");
        }
        for (std::size_t i = 0; i < spec.power_curve.size(); ++i)
        {
            auto const& p = spec.power_curve[i];
            if (!std::isfinite(p.wind_speed_mps) || p.wind_speed_mps < 0.0
                || !std::isfinite(p.power_w) || p.power_w < 0.0)
            {
                throw ConfigError(fmt::format(
                    "wind power curve point {}: speed and power must be finite "
                    "and >= 0",
                    i + 1));
            }
            if (i > 0 && p.wind_speed_mps <= spec.power_curve[i - 1].wind_speed_mps)
            {
                throw ConfigError(fmt::format(
                    "wind power curve speeds must be strictly increasing (point {})",
                    i + 1));
            }
        }
        if (!(spec.cut_in_mps >= 0.0 && spec.cut_in_mps < spec.cut_out_mps))
        {
            throw ConfigError(fmt::format(
                "wind cut_in ({}) must be >= 0 and below cut_out ({})",
                spec.cut_in_mps, spec.cut_out_mps));
        }
        if (!(spec.hub_height_m > 0.0) || !(spec.reference_height_m > 0.0))
        {
            throw ConfigError("wind hub and reference heights must be > 0");
        }
        if (!std::isfinite(spec.shear_exponent))
        {
            throw ConfigError("wind shear exponent must be finite");
        }
    }

    double
    HubHeightWindSpeed(double reference_speed_mps, WindTurbineSpec const& spec)
    {
        if (spec.hub_height_m == spec.reference_height_m)
        {
            return reference_speed_mps;
        }
        return reference_speed_mps
            * std::pow(spec.hub_height_m / spec.reference_height_m, spec.shear_exponent);
    }

    double
    WindPower(double reference_speed_mps, WindTurbineSpec const& spec)
    {
        if (!(reference_speed_mps >= 0.0))
        {
            throw InputError(fmt::format(
                "wind speed must be >= 0 m/s (got {})", reference_speed_mps));
        }
        double const v = HubHeightWindSpeed(reference_speed_mps, spec);
        if (v < spec.cut_in_mps || v > spec.cut_out_mps)
        {
            return 0.0;
        }
        auto const& curve = spec.power_curve;
        if (v <= curve.front().wind_speed_mps)
        {
            return curve.front().power_w;
        }
        if (v >= curve.back().wind_speed_mps)
        {
            return curve.back().power_w;
        }
        auto hi = std::upper_bound(
            curve.begin(), curve.end(), v,
            [](double lhs, PowerCurvePoint const& p) { return lhs < p.wind_speed_mps; });
        auto lo = hi - 1;
        if (lo->wind_speed_mps == v)
        {
            return lo->power_w;
        }
        double const frac =
            (v - lo->wind_speed_mps) / (hi->wind_speed_mps - lo->wind_speed_mps);
        return lo->power_w + (hi->power_w - lo->power_w) * frac;
    }

    std::vector<PowerCurvePoint>
    LoadPowerCurve(std::filesystem::path const& path)
    {
        std::vector<PowerCurvePoint> curve;
        for (auto [speed, power] : LoadNumericPairs(path, "wind_speed_mps", "power_w"))
        {
            curve.push_back({speed, power});
        }
        return curve;
    }

    TraceProducer::TraceProducer(std::string id, TimeSeriesTrace trace, std::string category)
        : id_(std::move(id))
        , category_(std::move(category))
        , trace_(std::move(trace))
    {
    }

    double
    TraceProducer::PowerW(StepContext& ctx)
    {
        auto const s = trace_.SampleAt(ctx.time);
        NoteStale(ctx, s, trace_.Name());
        if (s.value < 0.0)
        {
            throw InputError(fmt::format(
                "trace '{}' yields negative power {} W at {}", trace_.Name(),
                s.value, FormatTimestamp(ctx.time)));
        }
        return s.value;
    }

    SolarProducer::SolarProducer(
        std::string id, SolarPanelSpec spec, TimeSeriesTrace irradiance)
        : id_(std::move(id))
        , spec_(spec)
        , irradiance_(std::move(irradiance))
    {
        ValidateSolarPanel(spec_);
    }

    double
    SolarProducer::PowerW(StepContext& ctx)
    {
        auto const s = irradiance_.SampleAt(ctx.time);
        NoteStale(ctx, s, irradiance_.Name());
        return SolarPower(s.value, spec_);
    }

    WindProducer::WindProducer(
        std::string id, WindTurbineSpec spec, TimeSeriesTrace wind_speed)
        : id_(std::move(id))
        , spec_(std::move(spec))
        , wind_speed_(std::move(wind_speed))
    {
        ValidateWindTurbine(spec_);
    }

    double
    WindProducer::PowerW(StepContext& ctx)
    {
        auto const s = wind_speed_.SampleAt(ctx.time);
        NoteStale(ctx, s, wind_speed_.Name());
        return WindPower(s.value, spec_);
    }

} // namespace gridloop
