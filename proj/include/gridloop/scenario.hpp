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

#include "gridloop/consumers.hpp"
#include "gridloop/errors.hpp"
#include "gridloop/generation.hpp"
#include "gridloop/signals.hpp"
#include "gridloop/sim.hpp"
#include "gridloop/storage.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace gridloop
{

    struct ScenarioIssue
    {
        std::string file;
        /// JSON pointer of the offending field ("/producers/0/efficiency").
        std::string field;
        std::string reason;
    };

    /// Every problem found while loading a scenario.
    class ScenarioError : public ConfigError
    {
      public:
        explicit ScenarioError(std::vector<ScenarioIssue> issues);

        [[nodiscard]] std::vector<ScenarioIssue> const&
        Issues() const noexcept
        {
            return issues_;
        }

      private:
        std::vector<ScenarioIssue> issues_;
    };

    struct SolarSource
    {
        SolarPanelSpec panel;
        TimeSeriesTrace irradiance;
    };

    struct WindSource
    {
        WindTurbineSpec turbine;
        TimeSeriesTrace wind_speed;
    };

    struct TraceSource
    {
        TimeSeriesTrace power;
        std::string category = "other";
    };

    struct ProducerConfig
    {
        std::string id;
        int order_hint = 0;
        std::variant<SolarSource, WindSource, TraceSource> source;
    };

    struct PushNodeConfig
    {
        Seconds staleness_timeout{30};
        double initial_power_w = 0.0;
    };

    struct ModelNodeConfig
    {
        PowerModel model;
        TimeSeriesTrace utilization;
    };

    struct TraceNodeConfig
    {
        TimeSeriesTrace power;
    };

    struct NodeConfig
    {
        std::string id;
        std::variant<PushNodeConfig, ModelNodeConfig, TraceNodeConfig> meter;
    };

    struct ConsumersConfig
    {
        std::string id = "facility";
        std::vector<NodeConfig> nodes;
        OverheadModel overhead = ConstantPue{1.0};
    };

    struct BatteryConfig
    {
        std::string id = "battery";
        BatterySpec spec;
        double min_soc_kwh = 0.0;
    };

    struct CarbonConfig
    {
        TimeSeriesTrace trace;
        CarbonIntensityKind kind = CarbonIntensityKind::Average;
    };

    struct ApiConfig
    {
        bool enabled = false;
        std::string listen = "127.0.0.1:8080";
    };

    struct OutputConfig
    {
        std::optional<std::filesystem::path> csv;
        bool summary = true;
    };

    /// A fully loaded and validated scenario: every trace is in memory.
    struct Scenario
    {
        std::filesystem::path source;
        Timestamp start;
        Seconds step_size{60};
        Seconds duration{86400};
        ExecutionMode mode = FastMode{};
        std::optional<CarbonConfig> carbon;
        std::shared_ptr<ForecastSet const> forecasts;
        std::vector<ProducerConfig> producers;
        std::optional<ConsumersConfig> consumers;
        std::optional<BatteryConfig> battery;
        ApiConfig api;
        OutputConfig output;
        /// Non-fatal findings (e.g. unusual solar efficiency).
        std::vector<std::string> warnings;
    };

    /// Reads and validates a JSON scenario; relative paths resolve against
    /// the file's directory. Throws ScenarioError listing every issue.
    Scenario
    LoadScenario(std::filesystem::path const& path);

    Scenario
    ParseScenario(
        nlohmann::json const& document,
        std::filesystem::path const& base_dir,
        std::string const& source_name = "<scenario>");

    struct SubsystemSummary
    {
        std::string id;
        std::string kind;
        std::string detail;
    };

    /// One line per subsystem / node, for `validate`.
    std::vector<SubsystemSummary>
    DescribeSubsystems(Scenario const& scenario);

    /// A fresh kernel with fresh subsystem state for every call.
    std::unique_ptr<Simulation>
    BuildSimulation(
        Scenario const& scenario,
        std::shared_ptr<PacingClock> clock = std::make_shared<SteadyPacingClock>());

} // namespace gridloop
