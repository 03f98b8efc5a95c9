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
#include "gridloop/directives.hpp"
#include "gridloop/published_state.hpp"
#include "gridloop/record.hpp"
#include "gridloop/storage.hpp"
#include "gridloop/subsystem.hpp"
#include "gridloop/time.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gridloop
{

    /// As fast as the host allows.
    struct FastMode
    {
    };

    /// Simulated time advances `factor` times faster than wall-clock time;
    /// factor 1 is strict real time.
    struct PacedMode
    {
        double factor = 1.0;
    };

    /// Fast while `predicate` holds for the previous committed record,
    /// Paced(factor) otherwise.
    struct ConditionalMode
    {
        std::string predicate;
        double factor = 1.0;
    };

    using ExecutionMode = std::variant<FastMode, PacedMode, ConditionalMode>;

    /// fast | real | scaled:<f> | conditional:<predicate>:<f>.
    /// Throws ConfigError.
    ExecutionMode
    ParseExecutionMode(std::string_view text);

    std::string
    ToString(ExecutionMode const& mode);

    using StepPredicate = std::function<bool(StepRecord const&)>;

    /// Name of the built-in predicate wrapping ExcessLeZero.
    inline constexpr std::string_view kExcessLeZero = "excess_le_zero";

    /// Wall-clock source for pacing; replaceable in tests.
    class PacingClock
    {
      public:
        virtual ~PacingClock() = default;
        [[nodiscard]] virtual WallTime
        Now() = 0;
        virtual void
        SleepUntil(WallTime t) = 0;
    };

    class SteadyPacingClock final : public PacingClock
    {
      public:
        WallTime
        Now() override;
        void
        SleepUntil(WallTime t) override;
    };

    struct SubsystemId
    {
        std::string name;
        SubsystemKind kind = SubsystemKind::Signal;
    };

    struct RunSummary
    {
        std::uint64_t steps = 0;
        std::uint64_t deadlines_missed = 0;
        std::uint64_t paced_steps = 0;
        /// Per executed step: whether it was paced.
        std::vector<bool> paced;
        double production_kwh = 0.0;
        double consumption_kwh = 0.0;
        double grid_import_kwh = 0.0;
        double grid_export_kwh = 0.0;
        double battery_charged_kwh = 0.0;
        double battery_discharged_kwh = 0.0;
        double battery_loss_kwh = 0.0;
        double battery_stored_delta_kwh = 0.0;
        double total_carbon_g = 0.0;
        std::uint64_t directives_received = 0;
        std::uint64_t directives_applied = 0;
        std::uint64_t diagnostics = 0;
        double wall_seconds = 0.0;
    };

    /// The co-simulation kernel.
    ///
    /// Single-threaded with respect to simulation state. API threads may
    /// only call Submit/PushNodePower and read Published(); everything else
    /// belongs to the thread that drives Step()/Run().
    ///
    /// Within a step: drain directives, then signals, producers, consumers
    /// (each class ordered by order_hint, then registration order), then the
    /// storage/grid balance, then commit and publish.
    class Simulation
    {
      public:
        Simulation(
            Timestamp start_epoch,
            Seconds step_size,
            std::shared_ptr<PacingClock> clock = std::make_shared<SteadyPacingClock>());

        Simulation(Simulation const&) = delete;
        Simulation&
        operator=(Simulation const&) = delete;

        /// Throws ConfigError after the first step, on duplicate ids, on a
        /// second storage unit or on duplicate node ids.
        SubsystemId
        RegisterSubsystem(SubsystemHandle subsystem, int order_hint = 0);

        void
        RegisterPredicate(std::string id, StepPredicate predicate);

        /// Executes one step without pacing. Throws SubsystemError when a
        /// subsystem fails; the clock is then left where it was.
        StepRecord
        Step();

        /// Runs until `until` seconds after the start epoch. Throws
        /// ConfigError when `until` is not a multiple of the step size or
        /// lies behind the clock, or the mode is malformed.
        RunSummary
        Run(Seconds until, ExecutionMode const& mode);

        /// Called on the kernel thread after every committed step.
        void
        SetStepObserver(std::function<void(StepRecord const&)> observer);

        /// Validates against the target and queues a directive. Thread-safe.
        /// Returns the effective simulation time. Throws ValidationError or
        /// NotFoundError.
        Timestamp
        Submit(ControlDirective directive);

        /// Validates every directive first, then queues them together.
        Timestamp
        Submit(std::vector<ControlDirective> directives);

        /// Push-meter ingest. Thread-safe. Throws NotFoundError (unknown
        /// node), ValidationError (bad value or not a push meter).
        void
        PushNodePower(std::string const& node_id, double power_w);

        [[nodiscard]] StateStore const&
        Published() const noexcept
        {
            return published_;
        }

        [[nodiscard]] Timestamp
        StartEpoch() const noexcept
        {
            return start_;
        }
        [[nodiscard]] Timestamp
        Now() const noexcept
        {
            return start_ + elapsed_;
        }
        [[nodiscard]] Seconds
        Elapsed() const noexcept
        {
            return elapsed_;
        }
        [[nodiscard]] Seconds
        StepSize() const noexcept
        {
            return step_;
        }
        [[nodiscard]] std::vector<StepRecord> const&
        Log() const noexcept
        {
            return log_;
        }
        [[nodiscard]] std::vector<std::string> const&
        Diagnostics() const noexcept
        {
            return diagnostics_;
        }
        [[nodiscard]] std::shared_ptr<BatterySubsystem const>
        Battery() const
        {
            return battery_;
        }
        [[nodiscard]] std::shared_ptr<NodeMeter>
        FindNode(std::string const& id) const;
        [[nodiscard]] std::vector<std::string>
        NodeIds() const;
        /// Subsystem ids in evaluation order.
        [[nodiscard]] std::vector<std::string>
        EvaluationOrder() const;
        /// Directives applied by the most recent step.
        [[nodiscard]] std::size_t
        LastAppliedDirectives() const noexcept
        {
            return last_applied_;
        }

      private:
        struct Entry
        {
            SubsystemHandle handle;
            SubsystemKind kind;
            std::string id;
            int order_hint;
            std::size_t registration;
        };

        void
        Freeze();
        void
        ValidateDirective(ControlDirective const& directive) const;
        void
        ApplyDirectives(DrainedDirectives const& drained, std::vector<std::string>& notes);
        StepRecord
        Compute(StepContext& ctx);
        void
        Commit(StepRecord const& record, StepContext&& ctx);

        Timestamp start_;
        Seconds step_;
        Seconds elapsed_{0};
        std::shared_ptr<PacingClock> clock_;

        std::vector<Entry> entries_;
        bool frozen_ = false;
        std::shared_ptr<BatterySubsystem> battery_;
        std::optional<BatterySpec> battery_spec_;
        std::map<std::string, std::shared_ptr<NodeMeter>, std::less<>> nodes_;
        std::map<std::string, StepPredicate, std::less<>> predicates_;

        DirectiveBuffer directives_;
        StateStore published_;
        std::vector<StepRecord> log_;
        std::vector<std::string> diagnostics_;
        std::function<void(StepRecord const&)> observer_;

        std::size_t last_applied_ = 0;
        std::size_t last_received_ = 0;
    };

} // namespace gridloop
