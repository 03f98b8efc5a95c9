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
#include "gridloop/run_log.hpp"
#include "gridloop/scenario.hpp"
#include "test_support.hpp"

#include <cstdio>
#include <sstream>
#include <sys/wait.h>

using namespace gridloop;
using gridloop::testing::TempDir;
using nlohmann::json;

namespace
{
    struct CommandResult
    {
        int exit_code = -1;
        std::string out;
    };

    CommandResult
    RunCli(std::string const& args)
    {
        std::string const cmd = std::string{GRIDLOOP_CLI_PATH} + " " + args + " 2>&1";
        CommandResult result;
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe)
        {
            return result;
        }
        char buf[4096];
        std::size_t n = 0;
        while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        {
            result.out.append(buf, n);
        }
        int const status = pclose(pipe);
        result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return result;
    }

    std::string
    Slurp(std::filesystem::path const& p)
    {
        std::ifstream in{p, std::ios::binary};
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    json
    Minimal()
    {
        return json{
            {"start", "2026-06-01T00:00:00Z"},
            {"step_size_s", 60},
            {"duration_s", 3600},
        };
    }

    std::vector<ScenarioIssue>
    IssuesOf(json const& doc, std::filesystem::path const& dir = ".")
    {
        try
        {
            (void)ParseScenario(doc, dir, "test.json");
        }
        catch (ScenarioError const& e)
        {
            return e.Issues();
        }
        return {};
    }

    bool
    HasIssue(std::vector<ScenarioIssue> const& issues, std::string const& field, std::string const& needle = "")
    {
        for (auto const& i : issues)
        {
            if (i.field == field && i.reason.find(needle) != std::string::npos)
            {
                return true;
            }
        }
        return false;
    }

    std::filesystem::path const kSolarDay =
        std::filesystem::path{GRIDLOOP_SCENARIO_DIR} / "solar_day" / "scenario.json";
} // namespace

TEST(ScenarioTest, MinimalScenario)
{
    auto const sc = ParseScenario(Minimal(), ".", "m.json");
    EXPECT_EQ(sc.step_size, Seconds{60});
    EXPECT_EQ(sc.duration, Seconds{3600});
    EXPECT_TRUE(std::holds_alternative<FastMode>(sc.mode));
    EXPECT_TRUE(sc.producers.empty());
    auto sim = BuildSimulation(sc);
    EXPECT_EQ(sim->Run(sc.duration, sc.mode).steps, 60u);
}

TEST(ScenarioTest, TimingValidation)
{
    auto doc = Minimal();
    doc["duration_s"] = 90;
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/duration_s", "multiple"));
    doc = Minimal();
    doc["step_size_s"] = 0;
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/step_size_s"));
    doc = Minimal();
    doc.erase("start");
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/start"));
    doc = Minimal();
    doc["mode"] = "warp";
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/mode"));
    doc = Minimal();
    doc["colour"] = "blue";
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/colour", "unknown"));
}

TEST(ScenarioTest, EfficiencyWarning)
{
    auto doc = Minimal();
    doc["producers"] = json::array(
        {{{"id", "pv"}, {"type", "solar"}, {"area_m2", 10}, {"efficiency", 0.35}, {"irradiance", 500}}});
    auto const sc = ParseScenario(doc, ".", "t.json");
    ASSERT_EQ(sc.warnings.size(), 1u);
    EXPECT_NE(sc.warnings[0].find("15-20%"), std::string::npos);
    EXPECT_NE(sc.warnings[0].find("pv"), std::string::npos);
}

TEST(ScenarioTest, DuplicateNodeNamesBothDefinitions)
{
    auto doc = Minimal();
    doc["consumers"] = {
        {"nodes", json::array({{{"id", "n1"}, {"type", "push"}}, {{"id", "n1"}, {"type", "push"}}})}};
    auto const issues = IssuesOf(doc);
    ASSERT_EQ(issues.size(), 1u);
    EXPECT_EQ(issues[0].field, "/consumers/nodes/1/id");
    EXPECT_NE(issues[0].reason.find("/consumers/nodes/0/id"), std::string::npos) << issues[0].reason;
}

TEST(ScenarioTest, DuplicateSubsystemIds)
{
    auto doc = Minimal();
    doc["producers"] = json::array({{{"id", "x"}, {"type", "trace"}, {"trace", 1}}, {{"id", "x"}, {"type", "trace"}, {"trace", 2}}});
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/producers/1/id", "/producers/0/id"));
}

TEST(ScenarioTest, MissingFilesListedExhaustively)
{
    TempDir dir;
    auto doc = Minimal();
    doc["carbon_intensity"] = {{"file", "missing_ci.csv"}};
    doc["producers"] = json::array({
        {{"id", "pv"}, {"type", "solar"}, {"area_m2", 1}, {"efficiency", 0.2}, {"irradiance", {{"file", "missing_irr.csv"}}}},
        {{"id", "wt"}, {"type", "wind"}, {"power_curve_file", "missing_curve.csv"}, {"cut_in_mps", 3}, {"cut_out_mps", 25},
         {"hub_height_m", 80}, {"wind_speed", {{"file", "missing_wind.csv"}}}},
    });
    auto const issues = IssuesOf(doc, dir.Path());
    EXPECT_TRUE(HasIssue(issues, "/carbon_intensity/file", "missing_ci.csv"));
    EXPECT_TRUE(HasIssue(issues, "/producers/0/irradiance/file", "missing_irr.csv"));
    EXPECT_TRUE(HasIssue(issues, "/producers/1/power_curve_file", "missing_curve.csv"));
    EXPECT_TRUE(HasIssue(issues, "/producers/1/wind_speed/file", "missing_wind.csv"));
}

TEST(ScenarioTest, StaticRuntimeHazardsCaughtUpFront)
{
    auto doc = Minimal();
    // Trace begins after the start and does not repeat.
    doc["carbon_intensity"] = {{"points", json::array({json::array({"2026-06-01T01:00:00Z", 300})})}};
    doc["producers"] = json::array({{{"id", "neg"}, {"type", "trace"}, {"trace", -5}}});
    auto const issues = IssuesOf(doc);
    EXPECT_TRUE(HasIssue(issues, "/carbon_intensity", "after the scenario start"));
    EXPECT_TRUE(HasIssue(issues, "/producers/0/trace", "negative"));
}

TEST(ScenarioTest, UnitMismatchRejected)
{
    auto doc = Minimal();
    doc["carbon_intensity"] = {{"constant", 300}, {"unit", "W"}};
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/carbon_intensity/unit"));
}

TEST(ScenarioTest, BatteryValidation)
{
    auto doc = Minimal();
    doc["battery"] = {{"capacity_kwh", 10}, {"c_rate", 0.5}, {"min_soc_kwh", 12}};
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/battery", "min_soc"));
    doc["battery"] = {{"c_rate", 0.5}};
    EXPECT_TRUE(HasIssue(IssuesOf(doc), "/battery/capacity_kwh"));
}

TEST(ScenarioTest, OverheadVariants)
{
    TempDir dir;
    dir.Write("overhead.csv", "it_power_w,total_power_w\n0,20000\n100000,150000\n");
    auto doc = Minimal();
    doc["consumers"] = {
        {"overhead", {{"table_file", "overhead.csv"}}},
        {"nodes", json::array({{{"id", "it"}, {"type", "trace"}, {"trace", 50000}}})}};
    auto const sc = ParseScenario(doc, dir.Path(), "t.json");
    auto sim = BuildSimulation(sc);
    EXPECT_DOUBLE_EQ(sim->Step().consumption_w, 85'000.0);

    doc["consumers"]["overhead"] = {{"pue", 1.5}, {"table", json::array()}};
    EXPECT_TRUE(HasIssue(IssuesOf(doc, dir.Path()), "/consumers/overhead", "exactly one"));
}

TEST(ScenarioTest, BuildIsFreshEachTime)
{
    auto const sc = LoadScenario(kSolarDay);
    auto a = BuildSimulation(sc);
    a->Run(Seconds{3600}, FastMode{});
    auto b = BuildSimulation(sc);
    b->Run(Seconds{3600}, FastMode{});
    ASSERT_EQ(a->Log().size(), b->Log().size());
    for (std::size_t i = 0; i < a->Log().size(); ++i)
    {
        EXPECT_TRUE(SameSimulatedValues(a->Log()[i], b->Log()[i]));
    }
}

TEST(ScenarioTest, DescribeListsEverySubsystem)
{
    auto const rows = DescribeSubsystems(LoadScenario(kSolarDay));
    std::vector<std::string> ids;
    for (auto const& r : rows)
    {
        ids.push_back(r.id);
    }
    EXPECT_EQ(ids, (std::vector<std::string>{"carbon_intensity", "pv", "facility", "node-1", "node-2", "battery"}));
}

TEST(CliTest, ValidatePrintsOkAndTable)
{
    auto const r = RunCli("validate " + kSolarDay.string());
    EXPECT_EQ(r.exit_code, 0) << r.out;
    EXPECT_EQ(r.out.substr(0, 3), "OK\n");
    EXPECT_NE(r.out.find("pv"), std::string::npos);
    EXPECT_NE(r.out.find("storage"), std::string::npos);
}

TEST(CliTest, ValidateReportsProblems)
{
    TempDir dir;
    auto doc = Minimal();
    doc["consumers"] = {
        {"nodes", json::array({{{"id", "n1"}, {"type", "push"}}, {{"id", "n1"}, {"type", "push"}}})}};
    auto p = dir.Write("bad.json", doc.dump());
    auto const r = RunCli("validate " + p.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.out.find("bad.json"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("/consumers/nodes/1/id"), std::string::npos);
    EXPECT_NE(r.out.find("/consumers/nodes/0/id"), std::string::npos);

    EXPECT_EQ(RunCli("validate " + (dir.Path() / "nope.json").string()).exit_code, 1);
    auto g = dir.Write("garbage.json", "{ not json");
    EXPECT_EQ(RunCli("validate " + g.string()).exit_code, 1);
}

TEST(CliTest, ValidateWarnsOnEfficiency)
{
    TempDir dir;
    auto doc = Minimal();
    doc["producers"] = json::array(
        {{{"id", "pv"}, {"type", "solar"}, {"area_m2", 10}, {"efficiency", 0.35}, {"irradiance", 500}}});
    auto p = dir.Write("s.json", doc.dump());
    auto const r = RunCli("validate " + p.string());
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("warning"), std::string::npos);
    EXPECT_NE(r.out.find("15-20%"), std::string::npos);
}

TEST(CliTest, RunWritesOneRowPerStep)
{
    TempDir dir;
    auto const csv = dir.Path() / "run.csv";
    auto const r = RunCli("run " + kSolarDay.string() + " --out " + csv.string());
    ASSERT_EQ(r.exit_code, 0) << r.out;
    auto const table = ParseCsv(Slurp(csv));
    EXPECT_EQ(table.rows.size(), 1440u);
    std::string header;
    for (std::size_t i = 0; i < table.header.size(); ++i)
    {
        header += (i ? "," : "") + table.header[i];
    }
    EXPECT_EQ(header, kStepCsvHeader);
    EXPECT_NE(r.out.find("steps = 1440"), std::string::npos);
}

TEST(CliTest, UntilMustBeAMultiple)
{
    auto const r = RunCli("run " + kSolarDay.string() + " --until 90");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.out.find("multiple"), std::string::npos) << r.out;
}

TEST(CliTest, BadModeFlag)
{
    EXPECT_EQ(RunCli("run " + kSolarDay.string() + " --mode warp --until 60").exit_code, 1);
    EXPECT_EQ(RunCli("frobnicate").exit_code, 1);
}

TEST(CliTest, SummaryCarbonEqualsColumnSum)
{
    TempDir dir;
    auto const csv = dir.Path() / "run.csv";
    auto const r = RunCli("run " + kSolarDay.string() + " --out " + csv.string());
    ASSERT_EQ(r.exit_code, 0);
    auto const table = ParseCsv(Slurp(csv));
    auto const col = *table.FindColumn("step_carbon_g");
    double column_sum = 0.0;
    for (auto const& row : table.rows)
    {
        column_sum += std::stod(row[col]);
    }
    auto const pos = r.out.find("total_carbon_g = ");
    ASSERT_NE(pos, std::string::npos);
    double const summary = std::stod(r.out.substr(pos + 17));
    EXPECT_TRUE(gridloop::testing::NearRel(summary, column_sum, 1e-9)) << summary << " vs " << column_sum;
}

TEST(CliTest, CsvIsReadableAsATrace)
{
    TempDir dir;
    auto const csv = dir.Path() / "run.csv";
    ASSERT_EQ(RunCli("run " + kSolarDay.string() + " --until 3600 --out " + csv.string()).exit_code, 0);
    auto const trace = LoadTrace(csv, ColumnSpec{std::string{"time"}, std::string{"grid_power_w"}}, {});
    EXPECT_EQ(trace.Points().size(), 60u);
}

TEST(CliTest, FastRunsAreByteIdentical)
{
    TempDir dir;
    auto const a = dir.Path() / "a.csv";
    auto const b = dir.Path() / "b.csv";
    ASSERT_EQ(RunCli("run " + kSolarDay.string() + " --out " + a.string()).exit_code, 0);
    ASSERT_EQ(RunCli("run " + kSolarDay.string() + " --out " + b.string()).exit_code, 0);
    EXPECT_EQ(Slurp(a), Slurp(b));
}

TEST(CliTest, RuntimeErrorExitsTwo)
{
    TempDir dir;
    auto doc = Minimal();
    // Valid statically, but the output path cannot be created.
    doc["output"] = {{"csv", "no/such/dir/out.csv"}};
    auto p = dir.Write("s.json", doc.dump());
    EXPECT_EQ(RunCli("run " + p.string()).exit_code, 2);
}
