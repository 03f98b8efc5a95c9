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

#include "gridloop/csv.hpp"
#include "gridloop/errors.hpp"
#include "test_support.hpp"

using namespace gridloop;
using gridloop::testing::Epoch;

TEST(TimeTest, ParsesCommonForms)
{
    EXPECT_EQ(ParseTimestamp("0"), Epoch(0));
    EXPECT_EQ(ParseTimestamp("3600"), Epoch(3600));
    EXPECT_EQ(ParseTimestamp("1970-01-01T01:00:00Z"), Epoch(3600));
    EXPECT_EQ(ParseTimestamp("1970-01-01 01:00:00"), Epoch(3600));
    EXPECT_EQ(ParseTimestamp("19700101T010000Z"), Epoch(3600));
    EXPECT_EQ(ParseTimestamp("1970-01-01T02:00:00+01:00"), Epoch(3600));
    EXPECT_EQ(ParseTimestamp("1970-01-01T00:00:00-00:30"), Epoch(1800));
    EXPECT_EQ(ParseTimestamp("1970-01-02"), Epoch(86400));
}

TEST(TimeTest, RejectsGarbage)
{
    EXPECT_THROW(ParseTimestamp(""), std::invalid_argument);
    EXPECT_THROW(ParseTimestamp("yesterday"), std::invalid_argument);
    EXPECT_THROW(ParseTimestamp("2026-13-01T00:00:00Z"), std::invalid_argument);
    EXPECT_THROW(ParseTimestamp("2026-01-01T25:00:00Z"), std::invalid_argument);
}

TEST(TimeTest, FormatRoundTrips)
{
    auto const t = ParseTimestamp("2026-06-01T12:34:56Z");
    EXPECT_EQ(FormatTimestamp(t), "2026-06-01T12:34:56Z");
    EXPECT_EQ(ParseTimestamp(FormatTimestamp(t)), t);
    EXPECT_DOUBLE_EQ(ToHours(Seconds{5400}), 1.5);
}

TEST(CsvTest, HeaderRowsAndLines)
{
    auto const table = ParseCsv("\xEF\xBB\xBFt,v\n\n0,1\r\n60,\"2\"\n");
    ASSERT_EQ(table.header.size(), 2u);
    EXPECT_EQ(table.header[0], "t");
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[1][1], "2");
    EXPECT_EQ(table.lines[0], 3u);
    EXPECT_EQ(table.lines[1], 4u);
    EXPECT_EQ(table.FindColumn("v"), std::optional<std::size_t>{1});
    EXPECT_FALSE(table.FindColumn("w").has_value());
}

TEST(CsvTest, QuotedCommas)
{
    auto const table = ParseCsv("a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(table.rows[0][0], "x,y");
    EXPECT_EQ(table.rows[0][1], "say \"hi\"");
}

TEST(CsvTest, EmptyInputIsAnError)
{
    EXPECT_THROW(ParseCsv(""), IngestionError);
    EXPECT_THROW(ParseCsv("\n\n"), IngestionError);
}

TEST(CsvTest, FiniteDoublesOnly)
{
    EXPECT_EQ(ParseFiniteDouble("1.5"), std::optional<double>{1.5});
    EXPECT_EQ(ParseFiniteDouble(" -2e3 "), std::optional<double>{-2000.0});
    EXPECT_FALSE(ParseFiniteDouble("NaN").has_value());
    EXPECT_FALSE(ParseFiniteDouble("inf").has_value());
    EXPECT_FALSE(ParseFiniteDouble("").has_value());
    EXPECT_FALSE(ParseFiniteDouble("1.5x").has_value());
}

TEST(CsvTest, NumericPairsByName)
{
    gridloop::testing::TempDir dir;
    auto p = dir.Write("curve.csv", "wind_speed_mps,power_w\n3,0\n12,3000000\n");
    auto pairs = LoadNumericPairs(p, "wind_speed_mps", "power_w");
    ASSERT_EQ(pairs.size(), 2u);
    EXPECT_EQ(pairs[1], (std::pair<double, double>{12.0, 3e6}));
    EXPECT_THROW(LoadNumericPairs(p, "speed", "power_w"), IngestionError);
}
