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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace gridloop
{

    /// Base for every error raised by the library.
    class Error : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    /// Invalid scenario or kernel set-up (bad step size, duplicate ids,
    /// registration after start, ...).
    class ConfigError : public Error
    {
      public:
        using Error::Error;
    };

    /// A physical input outside its domain (negative irradiance, ...).
    class InputError : public Error
    {
      public:
        using Error::Error;
    };

    /// A control value rejected by the target subsystem.
    class ValidationError : public Error
    {
      public:
        using Error::Error;
    };

    class NotFoundError : public Error
    {
      public:
        using Error::Error;
    };

    /// Trace sampled before its first point with repeat disabled.
    class OutOfRangeError : public Error
    {
      public:
        using Error::Error;
    };

    /// No forecast issue exists at or before the request time.
    class NoForecastError : public Error
    {
      public:
        using Error::Error;
    };

    /// CSV ingestion failure. `row` is the 1-based data row (0 for
    /// file-level problems such as a missing header).
    class IngestionError : public Error
    {
      public:
        IngestionError(std::string const& what, std::size_t row)
            : Error(what)
            , row_(row)
        {
        }

        [[nodiscard]] std::size_t row() const noexcept { return row_; }

      private:
        std::size_t row_;
    };

    /// A subsystem failed while a step was being computed.
    class SubsystemError : public Error
    {
      public:
        SubsystemError(std::string subsystem, std::string const& what)
            : Error("subsystem '" + subsystem + "': " + what)
            , subsystem_(std::move(subsystem))
        {
        }

        [[nodiscard]] std::string const& subsystem() const noexcept
        {
            return subsystem_;
        }

      private:
        std::string subsystem_;
    };

} // namespace gridloop
