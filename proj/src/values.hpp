// Copyright 2026 The nlapi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "clock.hpp"

namespace nlapi {

using Date = std::chrono::year_month_day;

struct TimeOfDay {
  int hour = 0;
  int minute = 0;
  bool operator==(const TimeOfDay&) const = default;
};

// A bound parameter value: number, integer, text (string/location/enum),
// calendar date or time of day.
using Value = std::variant<double, std::int64_t, std::string, Date, TimeOfDay>;

// Accepts integer, decimal and scientific notation with an optional sign.
// Rejects non-finite values and trailing garbage.
std::optional<double> ParseNumber(std::string_view s);

// "YYYY-MM-DD" with a valid calendar day.
std::optional<Date> ParseIsoDate(std::string_view s);
std::string FormatDate(Date d);
Date DateOf(TimePoint t);  // UTC calendar date

// "HH:MM" (24h) or "H[:MM]am|pm".
std::optional<TimeOfDay> ParseTime(std::string_view s);
std::string FormatTime(TimeOfDay t);

std::string FormatTimestamp(TimePoint t);  // ISO-8601 UTC, seconds precision

nlohmann::json ToJson(const Value& v);

}  // namespace nlapi
