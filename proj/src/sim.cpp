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

#include "gridloop/sim.hpp"

#include "gridloop/errors.hpp"
#include "gridloop/microgrid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <thread>

#include <fmt/core.h>

namespace gridloop
{
    namespace
    {
        double
        ParseFactor(std::string_view text, std::string_view mode)
        {
            double f = 0.0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), f);
            if (ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(f)
                || !(f > 0.0))
            {
                throw ConfigError(fmt::format(
                    "execution mode '{}': factor must be a positive number", mode));
            }
            return f;
        }

        std::string const&
        HandleId(SubsystemHandle const& h)
        {
            return std::visit(
                [](auto const& p) -> std::string const& {
                    if (!p)
                    {
                        throw ConfigError("cannot register a null subsystem");
                    }
                    return p->Id();
                },
                h);
        }
    } // namespace

    ExecutionMode
    ParseExecutionMode(std::string_view text)
    {
        if (text == "fast")
        {
            return FastMode{};
        }
        if (text == "real")
        {
            return PacedMode{1.0};
        }
        if (text.substr(0, 7) == "scaled:")
        {
            return PacedMode{ParseFactor(text.substr(7), text)};
        }
        if (text.substr(0, 12) == "conditional:")
        {
            auto const rest = text.substr(12);
            auto const colon = rest.rfind(':');
            if (colon == std::string_view::npos || colon == 0)
            {
                throw ConfigError(fmt::format(
                    "execution mode '{}': expected conditional:<predicate>:<factor>",
                    text));
            }
            return ConditionalMode{
                std::string{rest.substr(0, colon)},
                ParseFactor(rest.substr(colon + 1), text)};
        }
        throw ConfigError(fmt::format(
            "unknown execution mode '{}' (expected fast|real|scaled:<f>|"
            "conditional:<predicate>:<f>)",
            text));
    }

    std::string
    ToString(ExecutionMode const& mode)
    {
        if (std::holds_alternative<FastMode>(mode))
        {
            return "fast";
        }
        if (auto const* p = std::get_if<PacedMode>(&mode))
        {
            return p->factor == 1.0 ? std::string{"real"}
                                    : fmt::format("scaled:{}", p->factor);
        }
        auto const& c = std::get<ConditionalMode>(mode);
        return fmt::format("conditional:{}:{}", c.predicate, c.factor);
    }

    WallTime
    SteadyPacingClock::Now()
    {
        return std::chrono::steady_clock::now();
    }

    void
    SteadyPacingClock::SleepUntil(WallTime t)
    {
        std::this_thread::sleep_until(t);
    }

    Simulation::Simulation(
        Timestamp start_epoch, Seconds step_size, std::shared_ptr<PacingClock> clock)
        : start_(start_epoch)
        , step_(step_size)
        , clock_(std::move(clock))
        , directives_(start_epoch)
    {
        if (step_ <= Seconds{0})
        {
            throw ConfigError(
                fmt::format("step size must be a positive number of seconds (got {})",
                            step_.count()));
        }
        if (!clock_)
        {
            throw ConfigError("pacing clock must not be null");
        }
        predicates_.emplace(std::string{kExcessLeZero}, ExcessLeZero);
    }

    SubsystemId
    Simulation::RegisterSubsystem(SubsystemHandle subsystem, int order_hint)
    {
        if (frozen_)
        {
            throw ConfigError("subsystems must be registered before the run starts");
        }
        std::string const id = HandleId(subsystem);
        if (id.empty())
        {
            throw ConfigError("subsystem id must not be empty");
        }
        for (auto const& e : entries_)
        {
            if (e.id == id)
            {
                throw ConfigError(fmt::format("duplicate subsystem id '{}'", id));
            }
        }
        auto const kind = static_cast<SubsystemKind>(subsystem.index());
        if (kind == SubsystemKind::Storage)
        {
            if (battery_)
            {
                throw ConfigError(fmt::format(
                    "storage '{}': only one storage unit is supported (already have "
                    "'{}')",
                    id, battery_->Id()));
            }
            battery_ = std::get<std::shared_ptr<BatterySubsystem>>(subsystem);
            battery_spec_ = battery_->Spec();
        }
        if (kind == SubsystemKind::Consumer)
        {
            auto const& consumer = std::get<std::shared_ptr<Consumer>>(subsystem);
            auto const meters = consumer->NodeMeters();
            for (auto const& m : meters)
            {
                if (nodes_.count(m->Id()) != 0)
                {
                    throw ConfigError(fmt::format("duplicate node id '{}'", m->Id()));
                }
            }
            for (auto const& m : meters)
            {
                nodes_.emplace(m->Id(), m);
            }
        }
        entries_.push_back(
            Entry{std::move(subsystem), kind, id, order_hint, entries_.size()});
        return SubsystemId{id, kind};
    }

    void
    Simulation::RegisterPredicate(std::string id, StepPredicate predicate)
    {
        if (!predicate)
        {
            throw ConfigError(fmt::format("predicate '{}' is empty", id));
        }
        predicates_.insert_or_assign(std::move(id), std::move(predicate));
    }

    void
    Simulation::SetStepObserver(std::function<void(StepRecord const&)> observer)
    {
        observer_ = std::move(observer);
    }

    void
    Simulation::Freeze()
    {
        if (frozen_)
        {
            return;
        }
        std::stable_sort(entries_.begin(), entries_.end(), [](Entry const& a, Entry const& b) {
            if (a.kind != b.kind)
            {
                return a.kind < b.kind;
            }
            if (a.order_hint != b.order_hint)
            {
                return a.order_hint < b.order_hint;
            }
            return a.registration < b.registration;
        });
        frozen_ = true;
    }

    std::vector<std::string>
    Simulation::EvaluationOrder() const
    {
        auto copy = entries_;
        std::stable_sort(copy.begin(), copy.end(), [](Entry const& a, Entry const& b) {
            if (a.kind != b.kind)
            {
                return a.kind < b.kind;
            }
            if (a.order_hint != b.order_hint)
            {
                return a.order_hint < b.order_hint;
            }
            return a.registration < b.registration;
        });
        std::vector<std::string> ids;
        for (auto const& e : copy)
        {
            ids.push_back(e.id);
        }
        return ids;
    }

    std::shared_ptr<NodeMeter>
    Simulation::FindNode(std::string const& id) const
    {
        auto it = nodes_.find(id);
        return it == nodes_.end() ? nullptr : it->second;
    }

    std::vector<std::string>
    Simulation::NodeIds() const
    {
        std::vector<std::string> ids;
        for (auto const& [id, m] : nodes_)
        {
            ids.push_back(id);
        }
        return ids;
    }

    void
    Simulation::ValidateDirective(ControlDirective const& directive) const
    {
        switch (directive.target)
        {
            case DirectiveTarget::BatteryMinSoc:
            case DirectiveTarget::BatteryGridCharge:
            {
                if (!battery_spec_)
                {
                    throw NotFoundError("no battery configured");
                }
                if (!directive.value)
                {
                    throw ValidationError(
                        fmt::format("{} requires a value", directive.Key()));
                }
                bool const min_soc = directive.target == DirectiveTarget::BatteryMinSoc;
                ValidateBatteryPolicy(
                    *battery_spec_,
                    min_soc ? directive.value : std::nullopt,
                    min_soc ? std::nullopt : directive.value);
                break;
            }
            case DirectiveTarget::NodePowerCap:
                if (nodes_.count(directive.node_id) == 0)
                {
                    throw NotFoundError(
                        fmt::format("unknown node '{}'", directive.node_id));
                }
                ValidateCap(directive.value);
                break;
        }
    }

    Timestamp
    Simulation::Submit(ControlDirective directive)
    {
        ValidateDirective(directive);
        return directives_.Enqueue(std::move(directive));
    }

    Timestamp
    Simulation::Submit(std::vector<ControlDirective> directives)
    {
        for (auto const& d : directives)
        {
            ValidateDirective(d);
        }
        return directives_.Enqueue(std::move(directives));
    }

    void
    Simulation::PushNodePower(std::string const& node_id, double power_w)
    {
        auto node = FindNode(node_id);
        if (!node)
        {
            throw NotFoundError(fmt::format("unknown node '{}'", node_id));
        }
        if (node->Kind() != MeterKind::Push)
        {
            throw ValidationError(fmt::format(
                "node '{}' is a {} meter and does not accept pushed measurements",
                node_id, ToString(node->Kind())));
        }
        // Same clock the facility reads staleness against.
        node->PushMeasurement(power_w, std::chrono::steady_clock::now());
    }

    void
    Simulation::ApplyDirectives(
        DrainedDirectives const& drained, std::vector<std::string>& notes)
    {
        last_applied_ = 0;
        last_received_ = drained.received;
        for (auto const& d : drained.directives)
        {
            try
            {
                switch (d.target)
                {
                    case DirectiveTarget::BatteryMinSoc:
                        battery_->SetPolicy(d.value, std::nullopt);
                        break;
                    case DirectiveTarget::BatteryGridCharge:
                        battery_->SetPolicy(std::nullopt, d.value);
                        break;
                    case DirectiveTarget::NodePowerCap:
                        nodes_.at(d.node_id)->SetCap(d.value);
                        break;
                }
                ++last_applied_;
            }
            catch (Error const& e)
            {
                notes.push_back(
                    fmt::format("directive {} rejected at commit: {}", d.Key(), e.what()));
            }
        }
    }

    StepRecord
    Simulation::Compute(StepContext& ctx)
    {
        ctx.time = Now();
        ctx.dt = step_;

        ApplyDirectives(directives_.Drain(Now() + step_), ctx.diagnostics);

        double production = 0.0;
        double consumption = 0.0;
        for (auto const& e : entries_)
        {
            try
            {
                switch (e.kind)
                {
                    case SubsystemKind::Signal:
                        std::get<std::shared_ptr<Signal>>(e.handle)->Sample(ctx);
                        break;
                    case SubsystemKind::Producer:
                    {
                        auto const& p = std::get<std::shared_ptr<Producer>>(e.handle);
                        double const w = p->PowerW(ctx);
                        if (!(w >= 0.0) || !std::isfinite(w))
                        {
                            throw InputError(fmt::format("produced {} W", w));
                        }
                        ctx.producers.push_back({e.id, p->Category(), w});
                        production += w;
                        break;
                    }
                    case SubsystemKind::Consumer:
                    {
                        auto const& c = std::get<std::shared_ptr<Consumer>>(e.handle);
                        double const w = c->PowerW(ctx);
                        if (!(w >= 0.0) || !std::isfinite(w))
                        {
                            throw InputError(fmt::format("consumed {} W", w));
                        }
                        consumption += w;
                        break;
                    }
                    case SubsystemKind::Storage:
                        break;
                }
            }
            catch (SubsystemError const&)
            {
                throw;
            }
            catch (std::exception const& ex)
            {
                throw SubsystemError(e.id, ex.what());
            }
        }

        std::optional<BatteryView> view;
        if (battery_)
        {
            view = BatteryView{battery_->State(), battery_->Spec()};
        }
        BalanceResult balance;
        try
        {
            balance = Balance(production, consumption, view, ctx.carbon_intensity_gpkwh, step_);
        }
        catch (std::exception const& ex)
        {
            throw SubsystemError(battery_ ? battery_->Id() : "microgrid", ex.what());
        }
        if (battery_)
        {
            battery_->Apply(*balance.battery, step_);
        }

        StepRecord r;
        r.time = ctx.time;
        r.production_w = production;
        r.consumption_w = consumption;
        r.battery_power_w = balance.battery_accepted_w;
        r.battery_soc_kwh = battery_ ? battery_->State().soc_kwh : 0.0;
        r.grid_power_w = balance.grid.grid_power_w;
        r.carbon_intensity_gpkwh = ctx.carbon_intensity_gpkwh;
        r.step_carbon_g = balance.grid.carbon_g;
        return r;
    }

    void
    Simulation::Commit(StepRecord const& record, StepContext&& ctx)
    {
        log_.push_back(record);
        elapsed_ += step_;
        for (auto& d : ctx.diagnostics)
        {
            diagnostics_.push_back(std::move(d));
        }

        auto state = std::make_shared<PublishedState>();
        state->step_index = log_.size() - 1;
        state->record = record;
        state->producers = std::move(ctx.producers);
        state->nodes = std::move(ctx.nodes);
        if (battery_)
        {
            auto const& s = battery_->State();
            auto const& c = battery_->Counters();
            state->battery = BatterySnapshot{
                s.soc_kwh, battery_->Spec().capacity_kwh, s.min_soc_kwh, s.grid_charge_w,
                battery_->Spec().MaxPowerW(), c.charged_kwh, c.discharged_kwh};
        }
        state->step_committed_at = std::chrono::system_clock::now();
        state->next_commit = directives_.NextCommit();
        published_.Publish(std::move(state));

        if (observer_)
        {
            observer_(record);
        }
    }

    StepRecord
    Simulation::Step()
    {
        Freeze();
        StepContext ctx;
        auto record = Compute(ctx);
        Commit(record, std::move(ctx));
        return record;
    }

    RunSummary
    Simulation::Run(Seconds until, ExecutionMode const& mode)
    {
        if (until <= Seconds{0} || until.count() % step_.count() != 0)
        {
            throw ConfigError(fmt::format(
                "run length {} s must be a positive multiple of the step size {} s",
                until.count(), step_.count()));
        }
        if (until < elapsed_)
        {
            throw ConfigError(fmt::format(
                "run target {} s lies behind the clock ({} s)", until.count(),
                elapsed_.count()));
        }
        double factor = 0.0;
        StepPredicate const* predicate = nullptr;
        if (auto const* p = std::get_if<PacedMode>(&mode))
        {
            factor = p->factor;
        }
        else if (auto const* c = std::get_if<ConditionalMode>(&mode))
        {
            factor = c->factor;
            auto it = predicates_.find(c->predicate);
            if (it == predicates_.end())
            {
                throw ConfigError(
                    fmt::format("unknown pacing predicate '{}'", c->predicate));
            }
            predicate = &it->second;
        }
        if (!std::holds_alternative<FastMode>(mode) && !(factor > 0.0 && std::isfinite(factor)))
        {
            throw ConfigError(fmt::format("pacing factor must be > 0 (got {})", factor));
        }
        Freeze();

        RunSummary summary;
        BatteryCounters const counters_before =
            battery_ ? battery_->Counters() : BatteryCounters{};
        double const soc_before = battery_ ? battery_->State().soc_kwh : 0.0;
        std::size_t const diagnostics_before = diagnostics_.size();
        double const dt_h = ToHours(step_);

        auto const wall_start = clock_->Now();
        bool prev_paced = false;
        WallTime anchor_wall{};
        Seconds anchor_sim{0};

        auto const steps = static_cast<std::uint64_t>((until - elapsed_) / step_);
        summary.paced.reserve(steps);
        for (std::uint64_t i = 0; i < steps; ++i)
        {
            bool paced = false;
            if (std::holds_alternative<PacedMode>(mode))
            {
                paced = true;
            }
            else if (predicate != nullptr)
            {
                // Evaluated on the previous committed record; the first step
                // of a run without history is not paced.
                paced = !log_.empty() && !(*predicate)(log_.back());
            }
            if (paced && !prev_paced)
            {
                anchor_wall = clock_->Now();
                anchor_sim = elapsed_;
            }

            StepContext ctx;
            auto record = Compute(ctx);

            WallTime deadline{};
            if (paced)
            {
                double const budget_s =
                    static_cast<double>((elapsed_ + step_ - anchor_sim).count()) / factor;
                deadline = anchor_wall
                    + std::chrono::duration_cast<WallTime::duration>(
                               std::chrono::duration<double>(budget_s));
                record.deadline_missed = clock_->Now() > deadline;
            }
            Commit(record, std::move(ctx));

            summary.steps += 1;
            summary.paced.push_back(paced);
            summary.paced_steps += paced ? 1 : 0;
            summary.deadlines_missed += record.deadline_missed ? 1 : 0;
            summary.production_kwh += record.production_w * dt_h / 1000.0;
            summary.consumption_kwh += record.consumption_w * dt_h / 1000.0;
            summary.grid_import_kwh += std::max(record.grid_power_w, 0.0) * dt_h / 1000.0;
            summary.grid_export_kwh += std::max(-record.grid_power_w, 0.0) * dt_h / 1000.0;
            summary.total_carbon_g += record.step_carbon_g;
            summary.directives_received += last_received_;
            summary.directives_applied += last_applied_;

            if (paced)
            {
                clock_->SleepUntil(deadline);
            }
            prev_paced = paced;
        }

        if (battery_)
        {
            auto const& c = battery_->Counters();
            summary.battery_charged_kwh = c.charged_kwh - counters_before.charged_kwh;
            summary.battery_discharged_kwh = c.discharged_kwh - counters_before.discharged_kwh;
            summary.battery_loss_kwh = c.loss_kwh - counters_before.loss_kwh;
            summary.battery_stored_delta_kwh = battery_->State().soc_kwh - soc_before;
        }
        summary.diagnostics = diagnostics_.size() - diagnostics_before;
        summary.wall_seconds =
            std::chrono::duration<double>(clock_->Now() - wall_start).count();
        return summary;
    }

} // namespace gridloop
