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

#include "gridloop/api.hpp"
#include "gridloop/run_log.hpp"
#include "gridloop/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace
{
    constexpr int kExitOk = 0;
    constexpr int kExitValidation = 1;
    constexpr int kExitRuntime = 2;

    using namespace gridloop;

    void
    PrintIssues(ScenarioError const& e)
    {
        std::cerr << "scenario is invalid:\n";
        for (auto const& i : e.Issues())
        {
            std::cerr << fmt::format(
                "  {}: {}: {}\n", i.file, i.field.empty() ? "/" : i.field, i.reason);
        }
    }

    void
    PrintWarnings(Scenario const& sc)
    {
        for (auto const& w : sc.warnings)
        {
            std::cerr << "warning: " << w << "\n";
        }
    }

    int
    Validate(std::string const& path)
    {
        Scenario sc;
        try
        {
            sc = LoadScenario(path);
        }
        catch (ScenarioError const& e)
        {
            PrintIssues(e);
            return kExitValidation;
        }
        auto const rows = DescribeSubsystems(sc);
        std::size_t id_w = 2;
        std::size_t kind_w = 4;
        for (auto const& r : rows)
        {
            id_w = std::max(id_w, r.id.size());
            kind_w = std::max(kind_w, r.kind.size());
        }
        std::cout << "OK\n";
        std::cout << fmt::format(
            "start {}, step {} s, duration {} s, mode {}\n", FormatTimestamp(sc.start),
            sc.step_size.count(), sc.duration.count(), ToString(sc.mode));
        std::cout << fmt::format("{:<{}}  {:<{}}  {}\n", "id", id_w, "kind", kind_w, "detail");
        for (auto const& r : rows)
        {
            std::cout << fmt::format("{:<{}}  {:<{}}  {}\n", r.id, id_w, r.kind, kind_w, r.detail);
        }
        for (auto const& w : sc.warnings)
        {
            std::cout << "warning: " << w << "\n";
        }
        return kExitOk;
    }

    struct RunOptions
    {
        std::string scenario;
        std::optional<std::string> mode;
        std::optional<long long> until;
        std::optional<std::string> listen;
        std::optional<std::string> out;
    };

    int
    Run(RunOptions const& opts)
    {
        Scenario sc;
        ExecutionMode mode;
        Seconds until{0};
        std::optional<std::pair<std::string, int>> listen;
        try
        {
            sc = LoadScenario(opts.scenario);
            mode = opts.mode ? ParseExecutionMode(*opts.mode) : sc.mode;
            until = opts.until ? Seconds{*opts.until} : sc.duration;
            if (until.count() <= 0 || until.count() % sc.step_size.count() != 0)
            {
                throw ConfigError(fmt::format(
                    "--until {} is not a positive multiple of the step size {} s", until.count(),
                    sc.step_size.count()));
            }
            if (opts.out)
            {
                sc.output.csv = *opts.out;
            }
            if (opts.listen)
            {
                listen = ParseListenAddress(*opts.listen);
            }
            else if (sc.api.enabled)
            {
                listen = ParseListenAddress(sc.api.listen);
            }
        }
        catch (ScenarioError const& e)
        {
            PrintIssues(e);
            return kExitValidation;
        }
        catch (ConfigError const& e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return kExitValidation;
        }
        PrintWarnings(sc);

        try
        {
            auto sim = BuildSimulation(sc);
            std::ofstream csv;
            if (sc.output.csv)
            {
                csv.open(*sc.output.csv, std::ios::binary | std::ios::trunc);
                if (!csv)
                {
                    std::cerr << "error: cannot write " << sc.output.csv->string() << "\n";
                    return kExitRuntime;
                }
                csv << kStepCsvHeader << '\n';
                sim->SetStepObserver([&csv](StepRecord const& r) { csv << FormatStepCsvRow(r) << '\n'; });
            }

            ApiService service{*sim, sc.forecasts};
            std::optional<ApiServer> server;
            if (listen)
            {
                server.emplace(service);
                int const port = server->Start(listen->first, listen->second);
                std::cerr << fmt::format("api listening on {}:{}\n", listen->first, port);
            }
            RunSummary const summary = sim->Run(until, mode);
            if (server)
            {
                server->Stop();
            }
            csv.close();
            if (sc.output.summary)
            {
                WriteSummary(std::cout, summary, mode);
            }
        }
        catch (ConfigError const& e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return kExitValidation;
        }
        catch (std::exception const& e)
        {
            std::cerr << "runtime error: " << e.what() << "\n";
            return kExitRuntime;
        }
        return kExitOk;
    }
} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"gridloop: microgrid co-simulation testbed"};
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", validate_path, "Scenario file (JSON)")->required();

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run a scenario");
    run->add_option("scenario", run_opts.scenario, "Scenario file (JSON)")->required();
    run->add_option("--mode", run_opts.mode, "fast | real | scaled:<f> | conditional:<pred>:<f>");
    run->add_option("--until", run_opts.until, "Simulated seconds from the scenario start");
    run->add_option("--listen", run_opts.listen, "Serve the REST API on host:port");
    run->add_option("--out", run_opts.out, "Step CSV output path");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    if (validate->parsed())
    {
        return Validate(validate_path);
    }
    return Run(run_opts);
}
