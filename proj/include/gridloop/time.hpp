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

#include <chrono>
#include <string>
#include <string_view>

namespace gridloop
{

    /// Absolute simulation time, UTC, whole seconds.
    using Timestamp = std::chrono::sys_seconds;
    using Seconds = std::chrono::seconds;

    /// Parses either integer epoch seconds ("1717200000") or ISO-8601 UTC
    /// ("2024-06-01T00:00:00Z", "2024-06-01 00:00:00", "+00:00" offsets,
    /// and the basic form "20240601T000000Z"). Throws std::invalid_argument.
    Timestamp
    ParseTimestamp(std::string_view text);

    /// "YYYY-MM-DDTHH:MM:SSZ"
    std::string
    FormatTimestamp(Timestamp t);

    inline double
    ToHours(Seconds dt)
    {
        return static_cast<double>(dt.count()) / 3600.0;
    }

} // namespace gridloop
