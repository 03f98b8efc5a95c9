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

#include "gridloop/signals.hpp"
#include "gridloop/sim.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include <json.hpp>

namespace httplib
{
    class Server;
}

namespace gridloop
{

    struct ApiRequest
    {
        std::string method;
        std::string path;
        std::map<std::string, std::string> query;
        std::string body;
    };

    struct ApiResponse
    {
        int status = 200;
        nlohmann::json body;
    };

    /// The /api/v1 control plane, independent of the HTTP transport.
    ///
    /// Reads are served from the last published snapshot; writes are
    /// validated and queued on the kernel's directive buffer. Handle() is
    /// safe to call from any number of threads once the simulation's
    /// subsystems are registered.
    ///
    ///   GET /api/v1/carbon-intensity[?forecast_horizon_s=N]
    ///   GET /api/v1/solar
    ///   GET /api/v1/battery
    ///   PUT /api/v1/battery                  {min_soc_kwh?, grid_charge_w?}
    ///   GET /api/v1/nodes/<id>/power
    ///   PUT /api/v1/nodes/<id>/power         {power_w}
    ///   GET /api/v1/nodes/<id>/power-cap
    ///   PUT /api/v1/nodes/<id>/power-cap     {cap_w | null}
    class ApiService
    {
      public:
        explicit ApiService(
            Simulation& sim, std::shared_ptr<ForecastSet const> forecasts = nullptr);

        [[nodiscard]] ApiResponse
        Handle(ApiRequest const& request) const;

      private:
        ApiResponse
        GetCarbonIntensity(ApiRequest const& request) const;
        ApiResponse
        GetSolar() const;
        ApiResponse
        GetBattery() const;
        ApiResponse
        PutBattery(ApiRequest const& request) const;
        ApiResponse
        GetNodePower(std::string const& node_id) const;
        ApiResponse
        PutNodePower(std::string const& node_id, ApiRequest const& request) const;
        ApiResponse
        GetNodeCap(std::string const& node_id) const;
        ApiResponse
        PutNodeCap(std::string const& node_id, ApiRequest const& request) const;

        Simulation& sim_;
        std::shared_ptr<ForecastSet const> forecasts_;
    };

    /// "host:port" or ":port" or "port"; throws ConfigError.
    std::pair<std::string, int>
    ParseListenAddress(std::string_view text);

    /// Serves an ApiService over HTTP/1.1 on a background thread.
    class ApiServer
    {
      public:
        explicit ApiServer(ApiService const& service);
        ~ApiServer();

        ApiServer(ApiServer const&) = delete;
        ApiServer&
        operator=(ApiServer const&) = delete;

        /// Binds and starts serving; port 0 picks a free port. Returns the
        /// bound port. Throws ConfigError when binding fails.
        int
        Start(std::string const& host, int port);

        void
        Stop();

        [[nodiscard]] int
        Port() const noexcept
        {
            return port_;
        }

      private:
        ApiService const& service_;
        std::unique_ptr<httplib::Server> server_;
        std::thread thread_;
        int port_ = 0;
    };

} // namespace gridloop
