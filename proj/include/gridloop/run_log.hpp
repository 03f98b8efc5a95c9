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

#include "gridloop/record.hpp"
#include "gridloop/sim.hpp"

#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace gridloop
{

    inline constexpr std::string_view kStepCsvHeader =
        "time,production_w,consumption_w,battery_power_w,battery_soc_kwh,"
        "grid_power_w,carbon_intensity_gpkwh,step_carbon_g,deadline_missed";

    /// One CSV row (no newline). Doubles use the shortest representation
    /// that round-trips, so identical runs give identical bytes.
    std::string
    FormatStepCsvRow(StepRecord const& record);

    void
    WriteStepCsv(std::ostream& out, std::span<StepRecord const> records);

    /// `key = value` lines, one per summary field.
    void
    WriteSummary(std::ostream& out, RunSummary const& summary, ExecutionMode const& mode);

} // namespace gridloop
