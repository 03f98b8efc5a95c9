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

#include "gridloop/directives.hpp"

#include <utility>

namespace gridloop
{

    std::string
    ControlDirective::Key() const
    {
        switch (target)
        {
            case DirectiveTarget::BatteryMinSoc:
                return "battery.min_soc";
            case DirectiveTarget::BatteryGridCharge:
                return "battery.grid_charge_w";
            case DirectiveTarget::NodePowerCap:
                return "node." + node_id + ".power_cap_w";
        }
        return {};
    }

    DirectiveBuffer::DirectiveBuffer(Timestamp first_commit)
        : next_commit_(first_commit)
    {
    }

    Timestamp
    DirectiveBuffer::Enqueue(ControlDirective directive)
    {
        std::vector<ControlDirective> one;
        one.push_back(std::move(directive));
        return Enqueue(std::move(one));
    }

    Timestamp
    DirectiveBuffer::Enqueue(std::vector<ControlDirective> directives)
    {
        std::lock_guard lock{mutex_};
        for (auto& d : directives)
        {
            auto key = d.Key();
            pending_.insert_or_assign(std::move(key), std::move(d));
            ++received_;
        }
        return next_commit_;
    }

    DrainedDirectives
    DirectiveBuffer::Drain(Timestamp next_commit)
    {
        std::map<std::string, ControlDirective> taken;
        DrainedDirectives out;
        {
            std::lock_guard lock{mutex_};
            taken.swap(pending_);
            out.commit_time = next_commit_;
            out.received = received_;
            received_ = 0;
            next_commit_ = next_commit;
        }
        out.directives.reserve(taken.size());
        for (auto& [key, d] : taken)
        {
            out.directives.push_back(std::move(d));
        }
        return out;
    }

    Timestamp
    DirectiveBuffer::NextCommit() const
    {
        std::lock_guard lock{mutex_};
        return next_commit_;
    }

    std::size_t
    DirectiveBuffer::Pending() const
    {
        std::lock_guard lock{mutex_};
        return pending_.size();
    }

} // namespace gridloop
