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

#include "gridloop/consumers.hpp"

#include "gridloop/csv.hpp"
#include "gridloop/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace gridloop
{
    namespace
    {
        // Linear interpolation over (x, y) points with strictly increasing x,
        // held at the end values outside the covered range.
        double
        InterpolateClamped(std::vector<std::pair<double, double>> const& pts, double x)
        {
            if (x <= pts.front().first)
            {
                return pts.front().second;
            }
            if (x >= pts.back().first)
            {
                return pts.back().second;
            }
            auto hi = std::upper_bound(
                pts.begin(), pts.end(), x,
                [](double lhs, auto const& p) { return lhs < p.first; });
            auto lo = hi - 1;
            if (lo->first == x)
            {
                return lo->second;
            }
            double const frac = (x - lo->first) / (hi->first - lo->first);
            return lo->second + (hi->second - lo->second) * frac;
        }
    } // namespace

    void
    ValidatePowerModel(PowerModel const& model)
    {
        auto const& pts = model.load_points;
        if (pts.size() < 2)
        {
            throw ConfigError("power model needs load points at utilization 0 and 1");
        }
        if (pts.front().first != 0.0 || pts.back().first != 1.0)
        {
            throw ConfigError(fmt::format(
                "power model must start at utilization 0 and end at 1 (got {} .. {})",
                pts.front().first, pts.back().first));
        }
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            if (!std::isfinite(pts[i].second) || pts[i].second < 0.0)
            {
                throw ConfigError(fmt::format(
                    "power model point {}: power must be finite and >= 0", i + 1));
            }
            if (i > 0 && !(pts[i].first > pts[i - 1].first))
            {
                throw ConfigError(fmt::format(
                    "power model utilizations must be strictly increasing (point {})",
                    i + 1));
            }
        }
    }

    PowerModelSample
    EvaluatePowerModel(PowerModel const& model, double utilization)
    {
        bool const clamped = !(utilization >= 0.0 && utilization <= 1.0);
        double const u = std::isnan(utilization) ? 0.0 : std::clamp(utilization, 0.0, 1.0);
        return {InterpolateClamped(model.load_points, u), clamped};
    }

    PowerModel
    LoadPowerModel(std::filesystem::path const& path)
    {
        return PowerModel{LoadNumericPairs(path, "utilization", "power_w")};
    }

    void
    ValidateOverhead(OverheadModel const& model)
    {
        if (auto const* pue = std::get_if<ConstantPue>(&model))
        {
            if (!(pue->pue >= 1.0) || !std::isfinite(pue->pue))
            {
                throw ConfigError(fmt::format("PUE must be >= 1 (got {})", pue->pue));
            }
            return;
        }
        auto const& pts = std::get<OverheadTable>(model).points;
        if (pts.empty())
        {
            throw ConfigError("overhead table needs at least one point");
        }
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            auto const [it, total] = pts[i];
            if (!std::isfinite(it) || !std::isfinite(total) || it < 0.0)
            {
                throw ConfigError(fmt::format(
                    "overhead table point {}: values must be finite, IT power >= 0",
                    i + 1));
            }
            if (total < it)
            {
                throw ConfigError(fmt::format(
                    "overhead table point {}: total power {} below IT power {}", i + 1,
                    total, it));
            }
            if (i > 0 && !(it > pts[i - 1].first))
            {
                throw ConfigError(fmt::format(
                    "overhead table IT power must be strictly increasing (point {})",
                    i + 1));
            }
            if (i > 0 && total < pts[i - 1].second)
            {
                throw ConfigError(fmt::format(
                    "overhead table total power must be non-decreasing (point {})",
                    i + 1));
            }
        }
    }

    OverheadTable
    LoadOverheadTable(std::filesystem::path const& path)
    {
        return OverheadTable{LoadNumericPairs(path, "it_power_w", "total_power_w")};
    }

    double
    FacilityPower(OverheadModel const& model, double it_power_w)
    {
        if (auto const* pue = std::get_if<ConstantPue>(&model))
        {
            return it_power_w * pue->pue;
        }
        auto const& table = std::get<OverheadTable>(model);
        return std::max(InterpolateClamped(table.points, it_power_w), it_power_w);
    }

    std::string_view
    ToString(MeterKind kind)
    {
        switch (kind)
        {
            case MeterKind::Push:
                return "push";
            case MeterKind::Model:
                return "model";
            case MeterKind::Trace:
                return "trace";
        }
        return "?";
    }

    NodeMeter::NodeMeter(std::string id, MeterKind kind)
        : id_(std::move(id))
        , kind_(kind)
    {
        if (id_.empty())
        {
            throw ConfigError("node id must not be empty");
        }
    }

    std::shared_ptr<NodeMeter>
    NodeMeter::Push(std::string id, Seconds staleness_timeout, double initial_power_w)
    {
        if (staleness_timeout <= Seconds{0})
        {
            throw ConfigError(fmt::format(
                "node '{}': staleness_timeout must be > 0", id));
        }
        if (!(initial_power_w >= 0.0) || !std::isfinite(initial_power_w))
        {
            throw ConfigError(fmt::format(
                "node '{}': initial power must be finite and >= 0", id));
        }
        std::shared_ptr<NodeMeter> m{new NodeMeter(std::move(id), MeterKind::Push)};
        m->staleness_timeout_ = staleness_timeout;
        m->push_.power_w = initial_power_w;
        return m;
    }

    std::shared_ptr<NodeMeter>
    NodeMeter::Model(std::string id, PowerModel model, TimeSeriesTrace utilization)
    {
        ValidatePowerModel(model);
        std::shared_ptr<NodeMeter> m{new NodeMeter(std::move(id), MeterKind::Model)};
        m->model_ = std::move(model);
        m->trace_ = std::move(utilization);
        return m;
    }

    std::shared_ptr<NodeMeter>
    NodeMeter::Trace(std::string id, TimeSeriesTrace power)
    {
        std::shared_ptr<NodeMeter> m{new NodeMeter(std::move(id), MeterKind::Trace)};
        m->trace_ = std::move(power);
        return m;
    }

    void
    NodeMeter::PushMeasurement(double power_w, WallTime at)
    {
        if (kind_ != MeterKind::Push)
        {
            throw ConfigError(fmt::format(
                "node '{}' is a {} meter and does not accept pushed measurements",
                id_, ToString(kind_)));
        }
        if (!(power_w >= 0.0) || !std::isfinite(power_w))
        {
            throw ValidationError(fmt::format(
                "node '{}': pushed power must be finite and >= 0 (got {})", id_,
                power_w));
        }
        std::lock_guard lock{push_mutex_};
        push_.power_w = power_w;
        push_.at = at;
    }

    NodeReading
    NodeMeter::Read(Timestamp t, WallTime wall_now, std::vector<std::string>* diagnostics) const
    {
        NodeReading reading{id_, 0.0, false, cap_w_};
        switch (kind_)
        {
            case MeterKind::Push:
            {
                PushCell cell;
                {
                    std::lock_guard lock{push_mutex_};
                    cell = push_;
                }
                reading.power_w = cell.power_w;
                reading.stale = !cell.at || wall_now - *cell.at > staleness_timeout_;
                break;
            }
            case MeterKind::Model:
            {
                auto const u = trace_->SampleAt(t);
                auto const s = EvaluatePowerModel(*model_, u.value);
                if (s.clamped && diagnostics)
                {
                    diagnostics->push_back(fmt::format(
                        "node '{}': utilization {} outside [0, 1] at {}; clamped", id_,
                        u.value, FormatTimestamp(t)));
                }
                if (u.stale && diagnostics)
                {
                    diagnostics->push_back(fmt::format(
                        "trace '{}' past its last point at {}; holding last value",
                        trace_->Name(), FormatTimestamp(t)));
                }
                reading.power_w = s.power_w;
                break;
            }
            case MeterKind::Trace:
            {
                auto const s = trace_->SampleAt(t);
                if (s.stale && diagnostics)
                {
                    diagnostics->push_back(fmt::format(
                        "trace '{}' past its last point at {}; holding last value",
                        trace_->Name(), FormatTimestamp(t)));
                }
                if (s.value < 0.0)
                {
                    throw InputError(fmt::format(
                        "node '{}': trace '{}' yields negative power {} W at {}", id_,
                        trace_->Name(), s.value, FormatTimestamp(t)));
                }
                reading.power_w = s.value;
                break;
            }
        }
        if (cap_w_)
        {
            reading.power_w = std::min(reading.power_w, *cap_w_);
        }
        return reading;
    }

    void
    ValidateCap(std::optional<double> cap_w)
    {
        if (cap_w && !(*cap_w >= 0.0 && std::isfinite(*cap_w)))
        {
            throw ValidationError(
                fmt::format("power cap must be finite and >= 0 (got {})", *cap_w));
        }
    }

    void
    NodeMeter::SetCap(std::optional<double> cap_w)
    {
        ValidateCap(cap_w);
        cap_w_ = cap_w;
    }

    ConsumptionTotals
    TotalConsumption(std::span<NodeReading const> readings, OverheadModel const& overhead)
    {
        std::vector<double> powers;
        powers.reserve(readings.size());
        for (auto const& r : readings)
        {
            powers.push_back(r.power_w);
        }
        std::sort(powers.begin(), powers.end());
        ConsumptionTotals out;
        for (double p : powers)
        {
            out.it_power_w += p;
        }
        out.total_power_w = FacilityPower(overhead, out.it_power_w);
        return out;
    }

    ConsumptionTotals
    TotalConsumption(
        std::span<std::shared_ptr<NodeMeter> const> meters,
        OverheadModel const& overhead,
        Timestamp t,
        WallTime wall_now)
    {
        std::vector<NodeReading> readings;
        readings.reserve(meters.size());
        for (auto const& m : meters)
        {
            readings.push_back(m->Read(t, wall_now));
        }
        return TotalConsumption(std::span<NodeReading const>{readings}, overhead);
    }

    ComputeFacility::ComputeFacility(
        std::string id,
        std::vector<std::shared_ptr<NodeMeter>> meters,
        OverheadModel overhead,
        WallClockFn wall_clock)
        : id_(std::move(id))
        , meters_(std::move(meters))
        , overhead_(std::move(overhead))
        , wall_clock_(std::move(wall_clock))
    {
        ValidateOverhead(overhead_);
    }

    double
    ComputeFacility::PowerW(StepContext& ctx)
    {
        auto const wall_now = wall_clock_();
        auto const first = ctx.nodes.size();
        for (auto const& m : meters_)
        {
            ctx.nodes.push_back(m->Read(ctx.time, wall_now, &ctx.diagnostics));
        }
        std::span<NodeReading const> mine{ctx.nodes.data() + first, meters_.size()};
        return TotalConsumption(mine, overhead_).total_power_w;
    }

} // namespace gridloop
