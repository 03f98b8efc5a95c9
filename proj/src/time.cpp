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

#include "gridloop/time.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>

#include <fmt/core.h>

namespace gridloop
{
    namespace
    {
        std::string_view
        Trim(std::string_view s)
        {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            {
                s.remove_prefix(1);
            }
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            {
                s.remove_suffix(1);
            }
            return s;
        }

        bool
        AllDigits(std::string_view s)
        {
            if (s.empty())
            {
                return false;
            }
            for (char c : s)
            {
                if (!std::isdigit(static_cast<unsigned char>(c)))
                {
                    return false;
                }
            }
            return true;
        }

        int
        ReadInt(std::string_view s, std::string_view whole)
        {
            int v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size() || !AllDigits(s))
            {
                throw std::invalid_argument(
                    fmt::format("invalid timestamp '{}'", whole));
            }
            return v;
        }

        [[noreturn]] void
        Bad(std::string_view whole)
        {
            throw std::invalid_argument(
                fmt::format("invalid timestamp '{}'", whole));
        }
    } // namespace

    Timestamp
    ParseTimestamp(std::string_view text)
    {
        using namespace std::chrono;
        std::string_view const whole = text;
        text = Trim(text);
        if (text.empty())
        {
            Bad(whole);
        }

        // Epoch seconds, optionally negative.
        {
            std::string_view digits = text;
            if (digits.front() == '-')
            {
                digits.remove_prefix(1);
            }
            if (AllDigits(digits))
            {
                long long v = 0;
                auto [p, ec] =
                    std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc{} || p != text.data() + text.size())
                {
                    Bad(whole);
                }
                return Timestamp{Seconds{v}};
            }
        }

        // Split off the zone designator.
        int offset_s = 0;
        if (text.back() == 'Z' || text.back() == 'z')
        {
            text.remove_suffix(1);
        }
        else if (text.size() > 6
                 && (text[text.size() - 6] == '+' || text[text.size() - 6] == '-')
                 && text[text.size() - 3] == ':')
        {
            auto zone = text.substr(text.size() - 6);
            int const sign = zone[0] == '-' ? -1 : 1;
            offset_s = sign
                * (ReadInt(zone.substr(1, 2), whole) * 3600
                   + ReadInt(zone.substr(4, 2), whole) * 60);
            text.remove_suffix(6);
        }

        int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
        if (text.size() == 19 && text[4] == '-' && text[7] == '-'
            && (text[10] == 'T' || text[10] == 't' || text[10] == ' ')
            && text[13] == ':' && text[16] == ':')
        {
            y = ReadInt(text.substr(0, 4), whole);
            mo = ReadInt(text.substr(5, 2), whole);
            d = ReadInt(text.substr(8, 2), whole);
            h = ReadInt(text.substr(11, 2), whole);
            mi = ReadInt(text.substr(14, 2), whole);
            s = ReadInt(text.substr(17, 2), whole);
        }
        else if (text.size() == 16 && text[4] == '-' && text[7] == '-'
                 && (text[10] == 'T' || text[10] == ' ') && text[13] == ':')
        {
            y = ReadInt(text.substr(0, 4), whole);
            mo = ReadInt(text.substr(5, 2), whole);
            d = ReadInt(text.substr(8, 2), whole);
            h = ReadInt(text.substr(11, 2), whole);
            mi = ReadInt(text.substr(14, 2), whole);
        }
        else if (text.size() == 15 && text[8] == 'T')
        {
            y = ReadInt(text.substr(0, 4), whole);
            mo = ReadInt(text.substr(4, 2), whole);
            d = ReadInt(text.substr(6, 2), whole);
            h = ReadInt(text.substr(9, 2), whole);
            mi = ReadInt(text.substr(11, 2), whole);
            s = ReadInt(text.substr(13, 2), whole);
        }
        else if (text.size() == 10 && text[4] == '-' && text[7] == '-')
        {
            y = ReadInt(text.substr(0, 4), whole);
            mo = ReadInt(text.substr(5, 2), whole);
            d = ReadInt(text.substr(8, 2), whole);
        }
        else
        {
            Bad(whole);
        }

        year_month_day const ymd{year{y}, month{static_cast<unsigned>(mo)},
                                 day{static_cast<unsigned>(d)}};
        if (!ymd.ok() || h > 23 || mi > 59 || s > 60)
        {
            Bad(whole);
        }
        return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + Seconds{s}
            - Seconds{offset_s};
    }

    std::string
    FormatTimestamp(Timestamp t)
    {
        using namespace std::chrono;
        auto const dp = floor<days>(t);
        year_month_day const ymd{dp};
        hh_mm_ss const hms{t - dp};
        return fmt::format(
            "{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z",
            static_cast<int>(ymd.year()),
            static_cast<unsigned>(ymd.month()),
            static_cast<unsigned>(ymd.day()),
            hms.hours().count(),
            hms.minutes().count(),
            hms.seconds().count());
    }

} // namespace gridloop
