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

#include "gridloop/scenario.hpp"

#include "gridloop/api.hpp"
#include "gridloop/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/core.h>

namespace gridloop
{
    namespace
    {
        namespace fs = std::filesystem;
        using nlohmann::json;

        std::string
        FormatIssues(std::vector<ScenarioIssue> const& issues)
        {
            std::string out = fmt::format("{} scenario issue(s)", issues.size());
            for (auto const& i : issues)
            {
                out += fmt::format("\n  {}: {}: {}", i.file, i.field.empty() ? "/" : i.field, i.reason);
            }
            return out;
        }

        class Issues
        {
          public:
            explicit Issues(std::string file)
                : file_(std::move(file))
            {
            }

            void
            Add(std::string field, std::string reason)
            {
                issues_.push_back({file_, std::move(field), std::move(reason)});
            }

            [[nodiscard]] bool
            Empty() const noexcept
            {
                return issues_.empty();
            }

            [[nodiscard]] std::size_t
            Count() const noexcept
            {
                return issues_.size();
            }

            std::vector<ScenarioIssue>
            Take()
            {
                return std::move(issues_);
            }

          private:
            std::string file_;
            std::vector<ScenarioIssue> issues_;
        };

        std::string
        Ptr(std::string const& base, std::string_view key)
        {
            return fmt::format("{}/{}", base, key);
        }

        std::string
        Ptr(std::string const& base, std::size_t index)
        {
            return fmt::format("{}/{}", base, index);
        }

        void
        CheckKeys(
            json const& obj,
            std::string const& ptr,
            std::initializer_list<std::string_view> allowed,
            Issues& issues)
        {
            for (auto const& [key, value] : obj.items())
            {
                if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                {
                    issues.Add(Ptr(ptr, key), "unknown field");
                }
            }
        }

        std::optional<double>
        Number(
            json const& obj,
            std::string_view key,
            std::string const& ptr,
            Issues& issues,
            std::optional<double> fallback = std::nullopt)
        {
            auto it = obj.find(key);
            if (it == obj.end())
            {
                if (!fallback)
                {
                    issues.Add(Ptr(ptr, key), "required number missing");
                }
                return fallback;
            }
            if (!it->is_number())
            {
                issues.Add(Ptr(ptr, key), "must be a number");
                return std::nullopt;
            }
            return it->get<double>();
        }

        std::optional<long long>
        Integer(
            json const& obj,
            std::string_view key,
            std::string const& ptr,
            Issues& issues,
            std::optional<long long> fallback = std::nullopt)
        {
            auto it = obj.find(key);
            if (it == obj.end())
            {
                if (!fallback)
                {
                    issues.Add(Ptr(ptr, key), "required integer missing");
                }
                return fallback;
            }
            if (!it->is_number_integer())
            {
                issues.Add(Ptr(ptr, key), "must be an integer");
                return std::nullopt;
            }
            return it->get<long long>();
        }

        std::optional<std::string>
        String(
            json const& obj,
            std::string_view key,
            std::string const& ptr,
            Issues& issues,
            std::optional<std::string> fallback = std::nullopt)
        {
            auto it = obj.find(key);
            if (it == obj.end())
            {
                if (!fallback)
                {
                    issues.Add(Ptr(ptr, key), "required string missing");
                }
                return fallback;
            }
            if (!it->is_string())
            {
                issues.Add(Ptr(ptr, key), "must be a string");
                return std::nullopt;
            }
            return it->get<std::string>();
        }

        std::optional<bool>
        Bool(json const& obj, std::string_view key, std::string const& ptr, Issues& issues, bool fallback)
        {
            auto it = obj.find(key);
            if (it == obj.end())
            {
                return fallback;
            }
            if (!it->is_boolean())
            {
                issues.Add(Ptr(ptr, key), "must be true or false");
                return std::nullopt;
            }
            return it->get<bool>();
        }

        std::optional<Timestamp>
        TimeValue(json const& v, std::string const& ptr, Issues& issues)
        {
            try
            {
                if (v.is_number_integer())
                {
                    return Timestamp{Seconds{v.get<long long>()}};
                }
                if (v.is_string())
                {
                    return ParseTimestamp(v.get<std::string>());
                }
            }
            catch (std::invalid_argument const& e)
            {
                issues.Add(ptr, e.what());
                return std::nullopt;
            }
            issues.Add(ptr, "must be an ISO-8601 string or integer epoch seconds");
            return std::nullopt;
        }

        std::optional<std::vector<std::pair<double, double>>>
        Pairs(json const& v, std::string const& ptr, Issues& issues)
        {
            if (!v.is_array() || v.empty())
            {
                issues.Add(ptr, "must be a non-empty array of [x, y] pairs");
                return std::nullopt;
            }
            std::vector<std::pair<double, double>> out;
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                auto const& p = v[i];
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                {
                    issues.Add(Ptr(ptr, i), "must be a [number, number] pair");
                    return std::nullopt;
                }
                out.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
            return out;
        }

        fs::path
        Resolve(fs::path const& base_dir, std::string const& file)
        {
            fs::path p{file};
            return p.is_absolute() ? p : base_dir / p;
        }

        /// Reads the shared trace options; returns nullopt (after recording
        /// issues) on any problem.
        std::optional<TraceOptions>
        ReadTraceOptions(
            json const& spec,
            std::string const& ptr,
            Unit expected_unit,
            Interpolation default_interpolation,
            Issues& issues)
        {
            std::size_t const before = issues.Count();
            TraceOptions options;
            options.unit = expected_unit;
            options.interpolation = default_interpolation;
            if (auto u = String(spec, "unit", ptr, issues, std::string{ToString(expected_unit)}))
            {
                try
                {
                    if (ParseUnit(*u) != expected_unit)
                    {
                        issues.Add(
                            Ptr(ptr, "unit"),
                            fmt::format("expected unit {} here, got '{}'", ToString(expected_unit), *u));
                    }
                }
                catch (std::invalid_argument const& e)
                {
                    issues.Add(Ptr(ptr, "unit"), e.what());
                }
            }
            if (auto i = String(spec, "interpolation", ptr, issues, std::string{ToString(default_interpolation)}))
            {
                try
                {
                    options.interpolation = ParseInterpolation(*i);
                }
                catch (std::invalid_argument const& e)
                {
                    issues.Add(Ptr(ptr, "interpolation"), e.what());
                }
            }
            if (auto s = Number(spec, "scale", ptr, issues, 1.0))
            {
                if (!(*s >= 0.0))
                {
                    issues.Add(Ptr(ptr, "scale"), "must be >= 0");
                }
                options.scale = *s;
            }
            if (auto r = Bool(spec, "repeat", ptr, issues, false))
            {
                options.repeat = *r;
            }
            if (issues.Count() != before)
            {
                return std::nullopt;
            }
            return options;
        }

        std::optional<ColumnRef>
        ReadColumn(json const& spec, std::string_view key, std::size_t fallback, std::string const& ptr, Issues& issues)
        {
            auto it = spec.find(key);
            if (it == spec.end())
            {
                return ColumnRef{fallback};
            }
            if (it->is_string())
            {
                return ColumnRef{it->get<std::string>()};
            }
            if (it->is_number_unsigned())
            {
                return ColumnRef{it->get<std::size_t>()};
            }
            issues.Add(Ptr(ptr, key), "must be a column name or 0-based index");
            return std::nullopt;
        }

        struct TraceRules
        {
            Unit unit;
            Interpolation interpolation;
            /// Reject negative sampled values at load time.
            bool non_negative = true;
        };

        /// Problems the run would otherwise only hit mid-way.
        std::optional<TimeSeriesTrace>
        CheckTrace(
            TimeSeriesTrace trace,
            std::string const& ptr,
            TraceRules const& rules,
            Timestamp start,
            Issues& issues)
        {
            if (!trace.Repeats() && trace.Points().front().time > start)
            {
                issues.Add(
                    ptr,
                    fmt::format(
                        "trace starts at {}, after the scenario start {}, and does not repeat",
                        FormatTimestamp(trace.Points().front().time), FormatTimestamp(start)));
                return std::nullopt;
            }
            if (rules.non_negative)
            {
                for (std::size_t i = 0; i < trace.Points().size(); ++i)
                {
                    if (trace.Points()[i].value * trace.Scale() < 0.0)
                    {
                        issues.Add(
                            ptr,
                            fmt::format(
                                "point {} has negative value {}", i + 1, trace.Points()[i].value));
                        return std::nullopt;
                    }
                }
            }
            return trace;
        }

        /// A trace given as a number (constant), {"constant": x},
        /// {"points": [[time, value], ...]} or {"file": ...}.
        std::optional<TimeSeriesTrace>
        ReadTrace(
            json const& spec,
            std::string const& ptr,
            fs::path const& base_dir,
            TraceRules const& rules,
            Timestamp start,
            Issues& issues)
        {
            std::size_t const before = issues.Count();
            if (spec.is_number())
            {
                return CheckTrace(
                    TimeSeriesTrace{
                        {{start, spec.get<double>()}}, rules.interpolation, 1.0, true, rules.unit, ptr},
                    ptr, rules, start, issues);
            }
            if (!spec.is_object())
            {
                issues.Add(ptr, "trace must be a number or an object");
                return std::nullopt;
            }
            CheckKeys(
                spec, ptr,
                {"file", "points", "constant", "time_column", "value_column", "unit",
                 "interpolation", "scale", "repeat"},
                issues);
            auto const options = ReadTraceOptions(spec, ptr, rules.unit, rules.interpolation, issues);
            int const sources =
                int(spec.contains("file")) + int(spec.contains("points")) + int(spec.contains("constant"));
            if (sources != 1)
            {
                issues.Add(ptr, "exactly one of 'file', 'points' or 'constant' is required");
                return std::nullopt;
            }

            std::optional<TimeSeriesTrace> trace;
            if (spec.contains("constant"))
            {
                auto v = Number(spec, "constant", ptr, issues);
                if (v && options)
                {
                    trace.emplace(
                        std::vector<TracePoint>{{start, *v}}, options->interpolation,
                        options->scale, true, rules.unit, ptr);
                }
            }
            else if (spec.contains("points"))
            {
                auto const& pts = spec["points"];
                std::vector<TracePoint> points;
                if (!pts.is_array() || pts.empty())
                {
                    issues.Add(Ptr(ptr, "points"), "must be a non-empty array of [time, value]");
                }
                else
                {
                    for (std::size_t i = 0; i < pts.size(); ++i)
                    {
                        auto const& p = pts[i];
                        if (!p.is_array() || p.size() != 2 || !p[1].is_number())
                        {
                            issues.Add(Ptr(Ptr(ptr, "points"), i), "must be [time, number]");
                            continue;
                        }
                        if (auto t = TimeValue(p[0], Ptr(Ptr(ptr, "points"), i), issues))
                        {
                            points.push_back({*t, p[1].get<double>()});
                        }
                    }
                }
                if (issues.Count() == before && options)
                {
                    try
                    {
                        trace.emplace(
                            std::move(points), options->interpolation, options->scale,
                            options->repeat, rules.unit, ptr);
                    }
                    catch (ConfigError const& e)
                    {
                        issues.Add(Ptr(ptr, "points"), e.what());
                    }
                }
            }
            else
            {
                auto file = String(spec, "file", ptr, issues);
                auto tcol = ReadColumn(spec, "time_column", 0, ptr, issues);
                auto vcol = ReadColumn(spec, "value_column", 1, ptr, issues);
                if (file)
                {
                    auto const path = Resolve(base_dir, *file);
                    if (!fs::exists(path))
                    {
                        issues.Add(Ptr(ptr, "file"), fmt::format("trace file not found: {}", path.string()));
                    }
                    else if (options && tcol && vcol)
                    {
                        try
                        {
                            trace = LoadTrace(path, ColumnSpec{*tcol, *vcol}, *options);
                        }
                        catch (Error const& e)
                        {
                            issues.Add(Ptr(ptr, "file"), e.what());
                        }
                    }
                }
            }
            if (!trace)
            {
                return std::nullopt;
            }
            return CheckTrace(std::move(*trace), ptr, rules, start, issues);
        }

        std::optional<ProducerConfig>
        ReadProducer(
            json const& p,
            std::string const& ptr,
            fs::path const& base_dir,
            Timestamp start,
            Issues& issues,
            std::vector<std::string>& warnings)
        {
            if (!p.is_object())
            {
                issues.Add(ptr, "producer must be an object");
                return std::nullopt;
            }
            std::size_t const before = issues.Count();
            auto id = String(p, "id", ptr, issues);
            auto type = String(p, "type", ptr, issues);
            auto hint = Integer(p, "order_hint", ptr, issues, 0);
            if (!id || !type)
            {
                return std::nullopt;
            }
            ProducerConfig cfg{*id, static_cast<int>(hint.value_or(0)), TraceSource{
                TimeSeriesTrace{{{start, 0.0}}, Interpolation::Hold}, "other"}};

            if (*type == "solar")
            {
                CheckKeys(p, ptr, {"id", "type", "order_hint", "area_m2", "efficiency", "irradiance"}, issues);
                auto area = Number(p, "area_m2", ptr, issues);
                auto eff = Number(p, "efficiency", ptr, issues);
                std::optional<TimeSeriesTrace> irr;
                if (!p.contains("irradiance"))
                {
                    issues.Add(Ptr(ptr, "irradiance"), "required trace missing");
                }
                else
                {
                    irr = ReadTrace(
                        p["irradiance"], Ptr(ptr, "irradiance"), base_dir,
                        {Unit::WattsPerSquareMeter, Interpolation::Linear}, start, issues);
                }
                if (area && eff)
                {
                    SolarPanelSpec panel{*area, *eff};
                    try
                    {
                        for (auto& w : ValidateSolarPanel(panel))
                        {
                            warnings.push_back(fmt::format("producer '{}': {}", *id, w));
                        }
                    }
                    catch (ConfigError const& e)
                    {
                        issues.Add(ptr, e.what());
                    }
                    if (irr)
                    {
                        cfg.source = SolarSource{panel, std::move(*irr)};
                    }
                }
            }
            else if (*type == "wind")
            {
                CheckKeys(
                    p, ptr,
                    {"id", "type", "order_hint", "power_curve", "power_curve_file", "cut_in_mps",
                     "cut_out_mps", "hub_height_m", "reference_height_m", "shear_exponent",
                     "wind_speed"},
                    issues);
                WindTurbineSpec turbine;
                if (p.contains("power_curve") == p.contains("power_curve_file"))
                {
                    issues.Add(ptr, "exactly one of 'power_curve' or 'power_curve_file' is required");
                }
                else if (p.contains("power_curve"))
                {
                    if (auto pairs = Pairs(p["power_curve"], Ptr(ptr, "power_curve"), issues))
                    {
                        for (auto [v, w] : *pairs)
                        {
                            turbine.power_curve.push_back({v, w});
                        }
                    }
                }
                else if (auto file = String(p, "power_curve_file", ptr, issues))
                {
                    auto const path = Resolve(base_dir, *file);
                    if (!fs::exists(path))
                    {
                        issues.Add(Ptr(ptr, "power_curve_file"), fmt::format("file not found: {}", path.string()));
                    }
                    else
                    {
                        try
                        {
                            turbine.power_curve = LoadPowerCurve(path);
                        }
                        catch (Error const& e)
                        {
                            issues.Add(Ptr(ptr, "power_curve_file"), e.what());
                        }
                    }
                }
                turbine.cut_in_mps = Number(p, "cut_in_mps", ptr, issues).value_or(0.0);
                turbine.cut_out_mps = Number(p, "cut_out_mps", ptr, issues).value_or(0.0);
                turbine.hub_height_m = Number(p, "hub_height_m", ptr, issues).value_or(0.0);
                turbine.reference_height_m =
                    Number(p, "reference_height_m", ptr, issues, turbine.hub_height_m).value_or(0.0);
                turbine.shear_exponent = Number(p, "shear_exponent", ptr, issues, 1.0 / 7.0).value_or(0.0);
                std::optional<TimeSeriesTrace> speed;
                if (!p.contains("wind_speed"))
                {
                    issues.Add(Ptr(ptr, "wind_speed"), "required trace missing");
                }
                else
                {
                    speed = ReadTrace(
                        p["wind_speed"], Ptr(ptr, "wind_speed"), base_dir,
                        {Unit::MetersPerSecond, Interpolation::Linear}, start, issues);
                }
                if (issues.Count() == before)
                {
                    try
                    {
                        ValidateWindTurbine(turbine);
                        cfg.source = WindSource{std::move(turbine), std::move(*speed)};
                    }
                    catch (ConfigError const& e)
                    {
                        issues.Add(ptr, e.what());
                    }
                }
            }
            else if (*type == "trace")
            {
                CheckKeys(p, ptr, {"id", "type", "order_hint", "trace", "category"}, issues);
                auto category = String(p, "category", ptr, issues, std::string{"other"});
                if (!p.contains("trace"))
                {
                    issues.Add(Ptr(ptr, "trace"), "required trace missing");
                }
                else if (auto tr = ReadTrace(
                             p["trace"], Ptr(ptr, "trace"), base_dir,
                             {Unit::Watts, Interpolation::Linear}, start, issues))
                {
                    cfg.source = TraceSource{std::move(*tr), category.value_or("other")};
                }
            }
            else
            {
                issues.Add(Ptr(ptr, "type"), fmt::format("unknown producer type '{}' (solar|wind|trace)", *type));
            }
            if (issues.Count() != before)
            {
                return std::nullopt;
            }
            return cfg;
        }

        std::optional<NodeConfig>
        ReadNode(
            json const& n,
            std::string const& ptr,
            fs::path const& base_dir,
            Timestamp start,
            Issues& issues,
            std::vector<std::string>& warnings)
        {
            if (!n.is_object())
            {
                issues.Add(ptr, "node must be an object");
                return std::nullopt;
            }
            std::size_t const before = issues.Count();
            auto id = String(n, "id", ptr, issues);
            auto type = String(n, "type", ptr, issues);
            if (!id || !type)
            {
                return std::nullopt;
            }
            if (id->empty() || id->find('/') != std::string::npos)
            {
                issues.Add(Ptr(ptr, "id"), "node id must be non-empty and must not contain '/'");
                return std::nullopt;
            }
            NodeConfig cfg{*id, PushNodeConfig{}};
            if (*type == "push")
            {
                CheckKeys(n, ptr, {"id", "type", "staleness_timeout_s", "initial_power_w"}, issues);
                auto timeout = Integer(n, "staleness_timeout_s", ptr, issues, 30);
                auto initial = Number(n, "initial_power_w", ptr, issues, 0.0);
                if (timeout && *timeout <= 0)
                {
                    issues.Add(Ptr(ptr, "staleness_timeout_s"), "must be > 0");
                }
                if (initial && !(*initial >= 0.0))
                {
                    issues.Add(Ptr(ptr, "initial_power_w"), "must be >= 0");
                }
                if (timeout && initial)
                {
                    cfg.meter = PushNodeConfig{Seconds{*timeout}, *initial};
                }
            }
            else if (*type == "model")
            {
                CheckKeys(n, ptr, {"id", "type", "power_model", "power_model_file", "utilization"}, issues);
                PowerModel model;
                if (n.contains("power_model") == n.contains("power_model_file"))
                {
                    issues.Add(ptr, "exactly one of 'power_model' or 'power_model_file' is required");
                }
                else if (n.contains("power_model"))
                {
                    if (auto pairs = Pairs(n["power_model"], Ptr(ptr, "power_model"), issues))
                    {
                        model.load_points = *pairs;
                    }
                }
                else if (auto file = String(n, "power_model_file", ptr, issues))
                {
                    auto const path = Resolve(base_dir, *file);
                    if (!fs::exists(path))
                    {
                        issues.Add(Ptr(ptr, "power_model_file"), fmt::format("file not found: {}", path.string()));
                    }
                    else
                    {
                        try
                        {
                            model = LoadPowerModel(path);
                        }
                        catch (Error const& e)
                        {
                            issues.Add(Ptr(ptr, "power_model_file"), e.what());
                        }
                    }
                }
                if (issues.Count() == before)
                {
                    try
                    {
                        ValidatePowerModel(model);
                    }
                    catch (ConfigError const& e)
                    {
                        issues.Add(ptr, e.what());
                    }
                }
                std::optional<TimeSeriesTrace> util;
                if (!n.contains("utilization"))
                {
                    issues.Add(Ptr(ptr, "utilization"), "required trace missing");
                }
                else
                {
                    util = ReadTrace(
                        n["utilization"], Ptr(ptr, "utilization"), base_dir,
                        {Unit::Fraction, Interpolation::Linear, false}, start, issues);
                }
                if (util)
                {
                    for (auto const& pt : util->Points())
                    {
                        double const u = pt.value * util->Scale();
                        if (u < 0.0 || u > 1.0)
                        {
                            warnings.push_back(fmt::format(
                                "node '{}': utilization trace leaves [0, 1] (e.g. {} at {}); values will be clamped",
                                *id, u, FormatTimestamp(pt.time)));
                            break;
                        }
                    }
                }
                if (issues.Count() == before)
                {
                    cfg.meter = ModelNodeConfig{std::move(model), std::move(*util)};
                }
            }
            else if (*type == "trace")
            {
                CheckKeys(n, ptr, {"id", "type", "trace"}, issues);
                if (!n.contains("trace"))
                {
                    issues.Add(Ptr(ptr, "trace"), "required trace missing");
                }
                else if (auto tr = ReadTrace(
                             n["trace"], Ptr(ptr, "trace"), base_dir,
                             {Unit::Watts, Interpolation::Linear}, start, issues))
                {
                    cfg.meter = TraceNodeConfig{std::move(*tr)};
                }
            }
            else
            {
                issues.Add(Ptr(ptr, "type"), fmt::format("unknown node type '{}' (push|model|trace)", *type));
            }
            if (issues.Count() != before)
            {
                return std::nullopt;
            }
            return cfg;
        }

        std::optional<OverheadModel>
        ReadOverhead(json const& o, std::string const& ptr, fs::path const& base_dir, Issues& issues)
        {
            if (!o.is_object())
            {
                issues.Add(ptr, "overhead must be an object");
                return std::nullopt;
            }
            CheckKeys(o, ptr, {"pue", "table", "table_file"}, issues);
            int const n = int(o.contains("pue")) + int(o.contains("table")) + int(o.contains("table_file"));
            if (n != 1)
            {
                issues.Add(ptr, "exactly one of 'pue', 'table' or 'table_file' is required");
                return std::nullopt;
            }
            OverheadModel model;
            if (o.contains("pue"))
            {
                auto pue = Number(o, "pue", ptr, issues);
                if (!pue)
                {
                    return std::nullopt;
                }
                model = ConstantPue{*pue};
            }
            else if (o.contains("table"))
            {
                auto pairs = Pairs(o["table"], Ptr(ptr, "table"), issues);
                if (!pairs)
                {
                    return std::nullopt;
                }
                model = OverheadTable{*pairs};
            }
            else
            {
                auto file = String(o, "table_file", ptr, issues);
                if (!file)
                {
                    return std::nullopt;
                }
                auto const path = Resolve(base_dir, *file);
                if (!fs::exists(path))
                {
                    issues.Add(Ptr(ptr, "table_file"), fmt::format("file not found: {}", path.string()));
                    return std::nullopt;
                }
                try
                {
                    model = LoadOverheadTable(path);
                }
                catch (Error const& e)
                {
                    issues.Add(Ptr(ptr, "table_file"), e.what());
                    return std::nullopt;
                }
            }
            try
            {
                ValidateOverhead(model);
            }
            catch (ConfigError const& e)
            {
                issues.Add(ptr, e.what());
                return std::nullopt;
            }
            return model;
        }
    } // namespace

    ScenarioError::ScenarioError(std::vector<ScenarioIssue> issues)
        : ConfigError(FormatIssues(issues))
        , issues_(std::move(issues))
    {
    }

    Scenario
    ParseScenario(json const& doc, fs::path const& base_dir, std::string const& source_name)
    {
        Issues issues{source_name};
        Scenario sc;
        sc.source = source_name;
        if (!doc.is_object())
        {
            issues.Add("", "scenario must be a JSON object");
            throw ScenarioError(issues.Take());
        }
        CheckKeys(
            doc, "",
            {"start", "step_size_s", "duration_s", "mode", "carbon_intensity", "forecasts",
             "producers", "consumers", "battery", "api", "output"},
            issues);

        bool timing_ok = true;
        if (!doc.contains("start"))
        {
            issues.Add("/start", "required timestamp missing");
            timing_ok = false;
        }
        else if (auto t = TimeValue(doc["start"], "/start", issues))
        {
            sc.start = *t;
        }
        else
        {
            timing_ok = false;
        }
        auto step = Integer(doc, "step_size_s", "", issues);
        auto duration = Integer(doc, "duration_s", "", issues);
        if (step && *step <= 0)
        {
            issues.Add("/step_size_s", "must be a positive integer");
            step.reset();
        }
        if (duration && *duration <= 0)
        {
            issues.Add("/duration_s", "must be a positive integer");
            duration.reset();
        }
        if (step && duration && *duration % *step != 0)
        {
            issues.Add(
                "/duration_s",
                fmt::format("{} is not a multiple of step_size_s {}", *duration, *step));
        }
        if (step)
        {
            sc.step_size = Seconds{*step};
        }
        if (duration)
        {
            sc.duration = Seconds{*duration};
        }
        if (auto mode = String(doc, "mode", "", issues, std::string{"fast"}))
        {
            try
            {
                sc.mode = ParseExecutionMode(*mode);
            }
            catch (ConfigError const& e)
            {
                issues.Add("/mode", e.what());
            }
        }
        if (!timing_ok)
        {
            // Traces are validated against the start time.
            throw ScenarioError(issues.Take());
        }

        // Subsystem ids share one namespace.
        std::map<std::string, std::string> subsystem_ids;
        auto claim_id = [&](std::string const& id, std::string const& where) {
            auto [it, inserted] = subsystem_ids.emplace(id, where);
            if (!inserted)
            {
                issues.Add(where, fmt::format("duplicate subsystem id '{}' (also defined at {})", id, it->second));
            }
        };

        if (doc.contains("carbon_intensity"))
        {
            auto const& ci = doc["carbon_intensity"];
            CarbonIntensityKind kind = CarbonIntensityKind::Average;
            json trace_spec = ci;
            if (ci.is_object() && ci.contains("kind"))
            {
                auto k = String(ci, "kind", "/carbon_intensity", issues);
                if (k && *k == "marginal")
                {
                    kind = CarbonIntensityKind::Marginal;
                }
                else if (k && *k != "average")
                {
                    issues.Add("/carbon_intensity/kind", "must be 'average' or 'marginal'");
                }
                trace_spec.erase("kind");
            }
            if (auto tr = ReadTrace(
                    trace_spec, "/carbon_intensity", base_dir,
                    {Unit::GramsPerKilowattHour, Interpolation::Hold}, sc.start, issues))
            {
                sc.carbon = CarbonConfig{std::move(*tr), kind};
                claim_id("carbon_intensity", "/carbon_intensity");
            }
        }

        if (doc.contains("forecasts"))
        {
            auto const& f = doc["forecasts"];
            std::string const ptr = "/forecasts";
            if (!f.is_object())
            {
                issues.Add(ptr, "must be an object");
            }
            else
            {
                CheckKeys(
                    f, ptr,
                    {"directory", "time_column", "value_column", "unit", "interpolation", "scale", "repeat"},
                    issues);
                auto dir = String(f, "directory", ptr, issues);
                auto tcol = ReadColumn(f, "time_column", 0, ptr, issues);
                auto vcol = ReadColumn(f, "value_column", 1, ptr, issues);
                auto options = ReadTraceOptions(f, ptr, Unit::GramsPerKilowattHour, Interpolation::Hold, issues);
                if (dir && tcol && vcol && options)
                {
                    auto const path = Resolve(base_dir, *dir);
                    if (!fs::is_directory(path))
                    {
                        issues.Add(Ptr(ptr, "directory"), fmt::format("forecast directory not found: {}", path.string()));
                    }
                    else
                    {
                        try
                        {
                            sc.forecasts = std::make_shared<ForecastSet const>(
                                LoadForecastSet(path, ColumnSpec{*tcol, *vcol}, *options));
                        }
                        catch (Error const& e)
                        {
                            issues.Add(Ptr(ptr, "directory"), e.what());
                        }
                    }
                }
            }
        }

        if (doc.contains("producers"))
        {
            auto const& ps = doc["producers"];
            if (!ps.is_array())
            {
                issues.Add("/producers", "must be an array");
            }
            else
            {
                for (std::size_t i = 0; i < ps.size(); ++i)
                {
                    auto const ptr = Ptr("/producers", i);
                    if (auto p = ReadProducer(ps[i], ptr, base_dir, sc.start, issues, sc.warnings))
                    {
                        claim_id(p->id, Ptr(ptr, "id"));
                        sc.producers.push_back(std::move(*p));
                    }
                }
            }
        }

        if (doc.contains("consumers"))
        {
            auto const& c = doc["consumers"];
            std::string const ptr = "/consumers";
            if (!c.is_object())
            {
                issues.Add(ptr, "must be an object");
            }
            else
            {
                CheckKeys(c, ptr, {"id", "nodes", "overhead"}, issues);
                ConsumersConfig cfg;
                cfg.id = String(c, "id", ptr, issues, std::string{"facility"}).value_or("facility");
                claim_id(cfg.id, Ptr(ptr, "id"));
                if (c.contains("overhead"))
                {
                    if (auto o = ReadOverhead(c["overhead"], Ptr(ptr, "overhead"), base_dir, issues))
                    {
                        cfg.overhead = std::move(*o);
                    }
                }
                std::map<std::string, std::string> node_ids;
                if (c.contains("nodes"))
                {
                    auto const& ns = c["nodes"];
                    if (!ns.is_array())
                    {
                        issues.Add(Ptr(ptr, "nodes"), "must be an array");
                    }
                    else
                    {
                        for (std::size_t i = 0; i < ns.size(); ++i)
                        {
                            auto const nptr = Ptr(Ptr(ptr, "nodes"), i);
                            if (ns[i].is_object() && ns[i].contains("id") && ns[i]["id"].is_string())
                            {
                                auto const id = ns[i]["id"].get<std::string>();
                                auto [it, inserted] = node_ids.emplace(id, Ptr(nptr, "id"));
                                if (!inserted)
                                {
                                    issues.Add(
                                        Ptr(nptr, "id"),
                                        fmt::format("duplicate node id '{}' (first defined at {})", id, it->second));
                                    continue;
                                }
                            }
                            if (auto n = ReadNode(ns[i], nptr, base_dir, sc.start, issues, sc.warnings))
                            {
                                cfg.nodes.push_back(std::move(*n));
                            }
                        }
                    }
                }
                sc.consumers = std::move(cfg);
            }
        }

        if (doc.contains("battery"))
        {
            auto const& b = doc["battery"];
            std::string const ptr = "/battery";
            if (!b.is_object())
            {
                issues.Add(ptr, "must be an object");
            }
            else
            {
                CheckKeys(
                    b, ptr,
                    {"id", "capacity_kwh", "c_rate", "charge_efficiency", "initial_soc_kwh", "min_soc_kwh"},
                    issues);
                std::size_t const before = issues.Count();
                BatteryConfig cfg;
                cfg.id = String(b, "id", ptr, issues, std::string{"battery"}).value_or("battery");
                cfg.spec.capacity_kwh = Number(b, "capacity_kwh", ptr, issues).value_or(0.0);
                cfg.spec.c_rate = Number(b, "c_rate", ptr, issues).value_or(0.0);
                cfg.spec.charge_efficiency = Number(b, "charge_efficiency", ptr, issues, 1.0).value_or(0.0);
                cfg.spec.initial_soc_kwh = Number(b, "initial_soc_kwh", ptr, issues, 0.0).value_or(0.0);
                cfg.min_soc_kwh = Number(b, "min_soc_kwh", ptr, issues, 0.0).value_or(0.0);
                if (issues.Count() == before)
                {
                    try
                    {
                        ValidateBatterySpec(cfg.spec);
                        ValidateBatteryPolicy(cfg.spec, cfg.min_soc_kwh, std::nullopt);
                        claim_id(cfg.id, Ptr(ptr, "id"));
                        sc.battery = cfg;
                    }
                    catch (Error const& e)
                    {
                        issues.Add(ptr, e.what());
                    }
                }
            }
        }

        if (doc.contains("api"))
        {
            auto const& a = doc["api"];
            if (!a.is_object())
            {
                issues.Add("/api", "must be an object");
            }
            else
            {
                CheckKeys(a, "/api", {"enabled", "listen"}, issues);
                sc.api.enabled = Bool(a, "enabled", "/api", issues, false).value_or(false);
                sc.api.listen = String(a, "listen", "/api", issues, sc.api.listen).value_or(sc.api.listen);
                try
                {
                    ParseListenAddress(sc.api.listen);
                }
                catch (ConfigError const& e)
                {
                    issues.Add("/api/listen", e.what());
                }
            }
        }

        if (doc.contains("output"))
        {
            auto const& o = doc["output"];
            if (!o.is_object())
            {
                issues.Add("/output", "must be an object");
            }
            else
            {
                CheckKeys(o, "/output", {"csv", "summary"}, issues);
                if (o.contains("csv"))
                {
                    if (auto csv = String(o, "csv", "/output", issues))
                    {
                        sc.output.csv = Resolve(base_dir, *csv);
                    }
                }
                sc.output.summary = Bool(o, "summary", "/output", issues, true).value_or(true);
            }
        }

        if (!issues.Empty())
        {
            throw ScenarioError(issues.Take());
        }
        return sc;
    }

    Scenario
    LoadScenario(fs::path const& path)
    {
        std::string const name = path.string();
        std::ifstream in{path};
        if (!in)
        {
            throw ScenarioError({{name, "", "cannot open scenario file"}});
        }
        json doc;
        try
        {
            doc = json::parse(in, nullptr, true, true);
        }
        catch (json::parse_error const& e)
        {
            throw ScenarioError({{name, "", fmt::format("invalid JSON: {}", e.what())}});
        }
        auto const base = path.has_parent_path() ? path.parent_path() : fs::path{"."};
        return ParseScenario(doc, base, name);
    }

    std::vector<SubsystemSummary>
    DescribeSubsystems(Scenario const& sc)
    {
        std::vector<SubsystemSummary> out;
        if (sc.carbon)
        {
            out.push_back(
                {"carbon_intensity", "signal",
                 fmt::format(
                     "{} carbon intensity, {} points, {}",
                     sc.carbon->kind == CarbonIntensityKind::Average ? "average" : "marginal",
                     sc.carbon->trace.Points().size(), ToString(sc.carbon->trace.GetInterpolation()))});
        }
        for (auto const& p : sc.producers)
        {
            std::visit(
                [&](auto const& src) {
                    using T = std::decay_t<decltype(src)>;
                    if constexpr (std::is_same_v<T, SolarSource>)
                    {
                        out.push_back(
                            {p.id, "producer",
                             fmt::format("solar {} m2 @ {} efficiency", src.panel.area_m2, src.panel.efficiency)});
                    }
                    else if constexpr (std::is_same_v<T, WindSource>)
                    {
                        out.push_back(
                            {p.id, "producer",
                             fmt::format(
                                 "wind, {}-point curve, cut-in {} m/s, cut-out {} m/s",
                                 src.turbine.power_curve.size(), src.turbine.cut_in_mps, src.turbine.cut_out_mps)});
                    }
                    else
                    {
                        out.push_back(
                            {p.id, "producer",
                             fmt::format("{} trace, {} points", src.category, src.power.Points().size())});
                    }
                },
                p.source);
        }
        if (sc.consumers)
        {
            std::string overhead = std::visit(
                [](auto const& m) -> std::string {
                    using T = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<T, ConstantPue>)
                    {
                        return fmt::format("PUE {}", m.pue);
                    }
                    else
                    {
                        return fmt::format("overhead table, {} points", m.points.size());
                    }
                },
                sc.consumers->overhead);
            out.push_back(
                {sc.consumers->id, "consumer",
                 fmt::format("{} node(s), {}", sc.consumers->nodes.size(), overhead)});
            for (auto const& n : sc.consumers->nodes)
            {
                std::string detail = std::visit(
                    [](auto const& m) -> std::string {
                        using T = std::decay_t<decltype(m)>;
                        if constexpr (std::is_same_v<T, PushNodeConfig>)
                        {
                            return fmt::format("push meter, stale after {} s", m.staleness_timeout.count());
                        }
                        else if constexpr (std::is_same_v<T, ModelNodeConfig>)
                        {
                            return fmt::format("power model, {} load points", m.model.load_points.size());
                        }
                        else
                        {
                            return fmt::format("power trace, {} points", m.power.Points().size());
                        }
                    },
                    n.meter);
                out.push_back({n.id, "node", std::move(detail)});
            }
        }
        if (sc.battery)
        {
            out.push_back(
                {sc.battery->id, "storage",
                 fmt::format(
                     "{} kWh, C-rate {}, efficiency {}, soc {} kWh, min soc {} kWh", sc.battery->spec.capacity_kwh,
                     sc.battery->spec.c_rate, sc.battery->spec.charge_efficiency,
                     sc.battery->spec.initial_soc_kwh, sc.battery->min_soc_kwh)});
        }
        return out;
    }

    std::unique_ptr<Simulation>
    BuildSimulation(Scenario const& sc, std::shared_ptr<PacingClock> clock)
    {
        auto sim = std::make_unique<Simulation>(sc.start, sc.step_size, std::move(clock));
        if (sc.carbon)
        {
            sim->RegisterSubsystem(std::shared_ptr<Signal>(
                std::make_shared<CarbonIntensitySignal>("carbon_intensity", sc.carbon->trace, sc.carbon->kind)));
        }
        for (auto const& p : sc.producers)
        {
            std::shared_ptr<Producer> producer = std::visit(
                [&](auto const& src) -> std::shared_ptr<Producer> {
                    using T = std::decay_t<decltype(src)>;
                    if constexpr (std::is_same_v<T, SolarSource>)
                    {
                        return std::make_shared<SolarProducer>(p.id, src.panel, src.irradiance);
                    }
                    else if constexpr (std::is_same_v<T, WindSource>)
                    {
                        return std::make_shared<WindProducer>(p.id, src.turbine, src.wind_speed);
                    }
                    else
                    {
                        return std::make_shared<TraceProducer>(p.id, src.power, src.category);
                    }
                },
                p.source);
            sim->RegisterSubsystem(producer, p.order_hint);
        }
        if (sc.consumers)
        {
            std::vector<std::shared_ptr<NodeMeter>> meters;
            for (auto const& n : sc.consumers->nodes)
            {
                meters.push_back(std::visit(
                    [&](auto const& m) -> std::shared_ptr<NodeMeter> {
                        using T = std::decay_t<decltype(m)>;
                        if constexpr (std::is_same_v<T, PushNodeConfig>)
                        {
                            return NodeMeter::Push(n.id, m.staleness_timeout, m.initial_power_w);
                        }
                        else if constexpr (std::is_same_v<T, ModelNodeConfig>)
                        {
                            return NodeMeter::Model(n.id, m.model, m.utilization);
                        }
                        else
                        {
                            return NodeMeter::Trace(n.id, m.power);
                        }
                    },
                    n.meter));
            }
            sim->RegisterSubsystem(std::shared_ptr<Consumer>(
                std::make_shared<ComputeFacility>(sc.consumers->id, std::move(meters), sc.consumers->overhead)));
        }
        if (sc.battery)
        {
            sim->RegisterSubsystem(
                std::make_shared<BatterySubsystem>(sc.battery->id, sc.battery->spec, sc.battery->min_soc_kwh));
        }
        return sim;
    }

} // namespace gridloop
