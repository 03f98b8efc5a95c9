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

#include "gridloop/run_log.hpp"

#include <fmt/core.h>
#include <fmt/format.h>

namespace gridloop
{

    std::string
    FormatStepCsvRow(StepRecord const& r)
    {
        return fmt::format(
            "{},{},{},{},{},{},{},{},{}",
            FormatTimestamp(r.time),
            r.production_w,
            r.consumption_w,
            r.battery_power_w,
            r.battery_soc_kwh,
            r.grid_power_w,
            r.carbon_intensity_gpkwh,
            r.step_carbon_g,
            r.deadline_missed ? "true" : "false");
    }

    void
    WriteStepCsv(std::ostream& out, std::span<StepRecord const> records)
    {
        out << kStepCsvHeader << '\n';
        for (auto const& r : records)
        {
            out << FormatStepCsvRow(r) << '\n';
        }
    }

    void
    WriteSummary(std::ostream& out, RunSummary const& s, ExecutionMode const& mode)
    {
        auto line = [&out](std::string_view key, auto const& value) {
            out << fmt::format("{} = {}\n", key, value);
        };
        line("mode", ToString(mode));
        line("steps", s.steps);
        line("paced_steps", s.paced_steps);
        line("deadlines_missed", s.deadlines_missed);
        line("production_kwh", s.production_kwh);
        line("consumption_kwh", s.consumption_kwh);
        line("grid_import_kwh", s.grid_import_kwh);
        line("grid_export_kwh", s.grid_export_kwh);
        line("battery_charged_kwh", s.battery_charged_kwh);
        line("battery_discharged_kwh", s.battery_discharged_kwh);
        line("battery_loss_kwh", s.battery_loss_kwh);
        line("battery_stored_delta_kwh", s.battery_stored_delta_kwh);
        line("total_carbon_g", s.total_carbon_g);
        line("directives_received", s.directives_received);
        line("directives_applied", s.directives_applied);
        line("diagnostics", s.diagnostics);
        line("wall_seconds", s.wall_seconds);
    }

} // namespace gridloop
