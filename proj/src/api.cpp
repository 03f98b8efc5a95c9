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

#include "gridloop/errors.hpp"

#include <charconv>
#include <chrono>
#include <vector>

#include <fmt/core.h>
#include <httplib.h>

namespace gridloop
{
    namespace
    {
        using nlohmann::json;

        ApiResponse
        ErrorResponse(int status, std::string message)
        {
            return {status, json{{"error", std::move(message)}}};
        }

        ApiResponse
        NotCommittedYet()
        {
            return ErrorResponse(503, "no step committed yet");
        }

        std::string
        FormatWallTime(std::chrono::system_clock::time_point t)
        {
            using namespace std::chrono;
            auto const secs = floor<seconds>(t);
            auto const ms = duration_cast<milliseconds>(t - secs).count();
            auto const base = FormatTimestamp(Timestamp{secs.time_since_epoch()});
            // "...SSZ" -> "...SS.mmmZ"
            return fmt::format("{}.{:03d}Z", base.substr(0, base.size() - 1), ms);
        }

        json
        Envelope(PublishedState const& s)
        {
            return json{
                {"sim_time", FormatTimestamp(s.SimTime())},
                {"step_index", s.step_index},
                {"step_committed_at", FormatWallTime(s.step_committed_at)},
            };
        }

        std::vector<std::string>
        SplitPath(std::string_view path)
        {
            std::vector<std::string> parts;
            std::size_t pos = 0;
            while (pos < path.size())
            {
                auto next = path.find('/', pos);
                if (next == std::string_view::npos)
                {
                    next = path.size();
                }
                if (next > pos)
                {
                    parts.emplace_back(path.substr(pos, next - pos));
                }
                pos = next + 1;
            }
            return parts;
        }

        /// Parses a JSON object body; on failure returns the 400 response.
        std::optional<ApiResponse>
        ParseObject(std::string const& body, json& out)
        {
            try
            {
                out = json::parse(body.empty() ? std::string{"{}"} : body);
            }
            catch (json::parse_error const& e)
            {
                return ErrorResponse(400, fmt::format("invalid JSON body: {}", e.what()));
            }
            if (!out.is_object())
            {
                return ErrorResponse(400, "request body must be a JSON object");
            }
            return std::nullopt;
        }

        std::optional<ApiResponse>
        RejectUnknownFields(json const& body, std::initializer_list<std::string_view> allowed)
        {
            for (auto const& [key, value] : body.items())
            {
                bool known = false;
                for (auto a : allowed)
                {
                    known = known || key == a;
                }
                if (!known)
                {
                    return ErrorResponse(400, fmt::format("unknown field '{}'", key));
                }
            }
            return std::nullopt;
        }

        json
        NullableNumber(std::optional<double> v)
        {
            return v ? json(*v) : json(nullptr);
        }
    } // namespace

    ApiService::ApiService(Simulation& sim, std::shared_ptr<ForecastSet const> forecasts)
        : sim_(sim)
        , forecasts_(std::move(forecasts))
    {
    }

    ApiResponse
    ApiService::Handle(ApiRequest const& request) const
    {
        auto const parts = SplitPath(request.path);
        if (parts.size() < 3 || parts[0] != "api" || parts[1] != "v1")
        {
            return ErrorResponse(404, fmt::format("no such endpoint '{}'", request.path));
        }
        bool const get = request.method == "GET";
        bool const put = request.method == "PUT";
        auto method_not_allowed = [&] {
            return ErrorResponse(
                405, fmt::format("{} not allowed on {}", request.method, request.path));
        };
        try
        {
            if (parts.size() == 3 && parts[2] == "carbon-intensity")
            {
                return get ? GetCarbonIntensity(request) : method_not_allowed();
            }
            if (parts.size() == 3 && parts[2] == "solar")
            {
                return get ? GetSolar() : method_not_allowed();
            }
            if (parts.size() == 3 && parts[2] == "battery")
            {
                if (get)
                {
                    return GetBattery();
                }
                return put ? PutBattery(request) : method_not_allowed();
            }
            if (parts.size() == 5 && parts[2] == "nodes")
            {
                auto const& node = parts[3];
                if (parts[4] == "power")
                {
                    if (get)
                    {
                        return GetNodePower(node);
                    }
                    return put ? PutNodePower(node, request) : method_not_allowed();
                }
                if (parts[4] == "power-cap")
                {
                    if (get)
                    {
                        return GetNodeCap(node);
                    }
                    return put ? PutNodeCap(node, request) : method_not_allowed();
                }
            }
        }
        catch (ValidationError const& e)
        {
            return ErrorResponse(400, e.what());
        }
        catch (InputError const& e)
        {
            return ErrorResponse(400, e.what());
        }
        catch (NotFoundError const& e)
        {
            return ErrorResponse(404, e.what());
        }
        catch (NoForecastError const& e)
        {
            return ErrorResponse(503, e.what());
        }
        return ErrorResponse(404, fmt::format("no such endpoint '{}'", request.path));
    }

    ApiResponse
    ApiService::GetCarbonIntensity(ApiRequest const& request) const
    {
        auto const state = sim_.Published().Load();
        auto horizon_it = request.query.find("forecast_horizon_s");
        if (horizon_it != request.query.end())
        {
            if (!forecasts_)
            {
                return ErrorResponse(404, "no forecast set configured");
            }
            long long horizon = 0;
            auto const& text = horizon_it->second;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), horizon);
            if (ec != std::errc{} || p != text.data() + text.size() || horizon < 0)
            {
                return ErrorResponse(
                    400, "forecast_horizon_s must be a non-negative integer");
            }
            if (!state)
            {
                return NotCommittedYet();
            }
            auto const slice = forecasts_->Forecast(state->SimTime(), Seconds{horizon});
            json series = json::array();
            for (auto const& pt : slice.points)
            {
                series.push_back(
                    {{"target_time", FormatTimestamp(pt.time)}, {"value_gpkwh", pt.value}});
            }
            auto body = Envelope(*state);
            body["issue_time"] = FormatTimestamp(slice.issue_time);
            body["horizon_s"] = horizon;
            body["forecast"] = std::move(series);
            return {200, std::move(body)};
        }
        if (!state)
        {
            return NotCommittedYet();
        }
        auto body = Envelope(*state);
        body["value_gpkwh"] = state->record.carbon_intensity_gpkwh;
        return {200, std::move(body)};
    }

    ApiResponse
    ApiService::GetSolar() const
    {
        auto const state = sim_.Published().Load();
        if (!state)
        {
            return NotCommittedYet();
        }
        double solar = 0.0;
        json producers = json::array();
        for (auto const& p : state->producers)
        {
            if (p.category == "solar")
            {
                solar += p.power_w;
            }
            producers.push_back(
                {{"id", p.id}, {"category", p.category}, {"power_w", p.power_w}});
        }
        auto const& r = state->record;
        auto body = Envelope(*state);
        body["solar_w"] = solar;
        body["production_w"] = r.production_w;
        body["consumption_w"] = r.consumption_w;
        body["excess_w"] = r.production_w - r.consumption_w;
        body["producers"] = std::move(producers);
        return {200, std::move(body)};
    }

    ApiResponse
    ApiService::GetBattery() const
    {
        if (!sim_.Battery())
        {
            return ErrorResponse(404, "no battery configured");
        }
        auto const state = sim_.Published().Load();
        if (!state)
        {
            return NotCommittedYet();
        }
        auto const& b = *state->battery;
        auto body = Envelope(*state);
        body["soc_kwh"] = b.soc_kwh;
        body["capacity_kwh"] = b.capacity_kwh;
        body["min_soc_kwh"] = b.min_soc_kwh;
        body["grid_charge_w"] = b.grid_charge_w;
        body["max_power_w"] = b.max_power_w;
        body["power_w"] = state->record.battery_power_w;
        body["charged_kwh_total"] = b.charged_kwh_total;
        body["discharged_kwh_total"] = b.discharged_kwh_total;
        return {200, std::move(body)};
    }

    ApiResponse
    ApiService::PutBattery(ApiRequest const& request) const
    {
        if (!sim_.Battery())
        {
            return ErrorResponse(404, "no battery configured");
        }
        json body;
        if (auto err = ParseObject(request.body, body))
        {
            return *err;
        }
        if (auto err = RejectUnknownFields(body, {"min_soc_kwh", "grid_charge_w"}))
        {
            return *err;
        }
        std::optional<double> min_soc;
        std::optional<double> grid_charge;
        for (auto [key, slot] : {std::pair{"min_soc_kwh", &min_soc},
                                 std::pair{"grid_charge_w", &grid_charge}})
        {
            if (!body.contains(key))
            {
                continue;
            }
            if (!body[key].is_number())
            {
                return ErrorResponse(400, fmt::format("'{}' must be a number", key));
            }
            *slot = body[key].get<double>();
        }
        if (!min_soc && !grid_charge)
        {
            return ErrorResponse(400, "expected min_soc_kwh and/or grid_charge_w");
        }
        // Both fields are validated, then queued for the same commit.
        auto const now = std::chrono::system_clock::now();
        std::vector<ControlDirective> directives;
        if (min_soc)
        {
            directives.push_back({DirectiveTarget::BatteryMinSoc, {}, min_soc, now});
        }
        if (grid_charge)
        {
            directives.push_back({DirectiveTarget::BatteryGridCharge, {}, grid_charge, now});
        }
        Timestamp const effective = sim_.Submit(std::move(directives));
        return {202, json{{"effective_at", FormatTimestamp(effective)}}};
    }

    ApiResponse
    ApiService::GetNodePower(std::string const& node_id) const
    {
        auto const node = sim_.FindNode(node_id);
        if (!node)
        {
            return ErrorResponse(404, fmt::format("unknown node '{}'", node_id));
        }
        auto const state = sim_.Published().Load();
        if (!state)
        {
            return NotCommittedYet();
        }
        for (auto const& n : state->nodes)
        {
            if (n.id == node_id)
            {
                auto body = Envelope(*state);
                body["node_id"] = n.id;
                body["kind"] = ToString(node->Kind());
                body["power_w"] = n.power_w;
                body["stale"] = n.stale;
                body["cap_w"] = NullableNumber(n.cap_w);
                return {200, std::move(body)};
            }
        }
        return ErrorResponse(404, fmt::format("node '{}' has no committed reading", node_id));
    }

    ApiResponse
    ApiService::PutNodePower(std::string const& node_id, ApiRequest const& request) const
    {
        json body;
        if (auto err = ParseObject(request.body, body))
        {
            return *err;
        }
        if (auto err = RejectUnknownFields(body, {"power_w"}))
        {
            return *err;
        }
        if (!body.contains("power_w") || !body["power_w"].is_number())
        {
            return ErrorResponse(400, "'power_w' must be a number");
        }
        sim_.PushNodePower(node_id, body["power_w"].get<double>());
        return {200, json{{"node_id", node_id}, {"accepted", true}}};
    }

    ApiResponse
    ApiService::GetNodeCap(std::string const& node_id) const
    {
        if (!sim_.FindNode(node_id))
        {
            return ErrorResponse(404, fmt::format("unknown node '{}'", node_id));
        }
        auto const state = sim_.Published().Load();
        json body = state ? Envelope(*state) : json::object();
        body["node_id"] = node_id;
        body["cap_w"] = nullptr;
        if (state)
        {
            for (auto const& n : state->nodes)
            {
                if (n.id == node_id)
                {
                    body["cap_w"] = NullableNumber(n.cap_w);
                }
            }
        }
        return {200, std::move(body)};
    }

    ApiResponse
    ApiService::PutNodeCap(std::string const& node_id, ApiRequest const& request) const
    {
        json body;
        if (auto err = ParseObject(request.body, body))
        {
            return *err;
        }
        if (auto err = RejectUnknownFields(body, {"cap_w"}))
        {
            return *err;
        }
        if (!body.contains("cap_w") || !(body["cap_w"].is_number() || body["cap_w"].is_null()))
        {
            return ErrorResponse(400, "'cap_w' must be a number or null");
        }
        std::optional<double> cap;
        if (body["cap_w"].is_number())
        {
            cap = body["cap_w"].get<double>();
        }
        auto const effective = sim_.Submit(
            {DirectiveTarget::NodePowerCap, node_id, cap, std::chrono::system_clock::now()});
        return {202, json{{"effective_at", FormatTimestamp(effective)}}};
    }

    std::pair<std::string, int>
    ParseListenAddress(std::string_view text)
    {
        std::string host = "127.0.0.1";
        std::string_view port_text = text;
        if (auto colon = text.rfind(':'); colon != std::string_view::npos)
        {
            if (colon > 0)
            {
                host = std::string{text.substr(0, colon)};
            }
            port_text = text.substr(colon + 1);
        }
        int port = -1;
        auto [p, ec] =
            std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (ec != std::errc{} || p != port_text.data() + port_text.size() || port < 0
            || port > 65535)
        {
            throw ConfigError(fmt::format(
                "invalid listen address '{}' (expected host:port)", text));
        }
        return {host, port};
    }

    ApiServer::ApiServer(ApiService const& service)
        : service_(service)
        , server_(std::make_unique<httplib::Server>())
    {
        auto handler = [this](httplib::Request const& req, httplib::Response& res) {
            ApiRequest request{req.method, req.path, {}, req.body};
            for (auto const& [k, v] : req.params)
            {
                request.query.emplace(k, v);
            }
            auto response = service_.Handle(request);
            res.status = response.status;
            res.set_content(response.body.dump(), "application/json");
        };
        // Every method reaches the service so unsupported ones get a 405.
        server_->Get(".*", handler);
        server_->Put(".*", handler);
        server_->Post(".*", handler);
        server_->Delete(".*", handler);
        server_->Patch(".*", handler);
    }

    ApiServer::~ApiServer()
    {
        Stop();
    }

    int
    ApiServer::Start(std::string const& host, int port)
    {
        if (thread_.joinable())
        {
            throw ConfigError("API server already started");
        }
        // Small JSON replies; don't let Nagle hold them back.
        server_->set_tcp_nodelay(true);
        if (port == 0)
        {
            port_ = server_->bind_to_any_port(host.c_str());
        }
        else
        {
            port_ = server_->bind_to_port(host.c_str(), port) ? port : -1;
        }
        if (port_ < 0)
        {
            throw ConfigError(fmt::format("cannot listen on {}:{}", host, port));
        }
        thread_ = std::thread([this] { server_->listen_after_bind(); });
        return port_;
    }

    void
    ApiServer::Stop()
    {
        if (thread_.joinable())
        {
            server_->stop();
            thread_.join();
        }
    }

} // namespace gridloop
