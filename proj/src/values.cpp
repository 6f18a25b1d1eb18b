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
#include "values.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "text.hpp"

namespace nlapi {

std::optional<double> ParseNumber(std::string_view s) {
  std::string t = text::Trim(s);
  std::string_view v = t;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  if (v.empty()) return std::nullopt;
  // from_chars also accepts "inf"/"nan" spellings; only digits and '.' may lead.
  const char lead = v.front() == '-' && v.size() > 1 ? v[1] : v.front();
  if (!((lead >= '0' && lead <= '9') || lead == '.')) return std::nullopt;
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, std::chars_format::general);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) return std::nullopt;
  return out;
}

std::optional<Date> ParseIsoDate(std::string_view s) {
  const std::string t = text::Trim(s);
  if (t.size() != 10 || t[4] != '-' || t[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto digits = [&](std::size_t pos, std::size_t len, auto& out) {
    auto [ptr, ec] = std::from_chars(t.data() + pos, t.data() + pos + len, out);
    return ec == std::errc() && ptr == t.data() + pos + len;
  };
  if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string FormatDate(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

Date DateOf(TimePoint t) { return Date{std::chrono::floor<std::chrono::days>(t)}; }

std::optional<TimeOfDay> ParseTime(std::string_view s) {
  std::string t = text::ToLower(text::Trim(s));
  int offset = -1;
  if (t.size() > 2 && (t.ends_with("am") || t.ends_with("pm"))) {
    offset = t.ends_with("pm") ? 12 : 0;
    t = text::Trim(std::string_view(t).substr(0, t.size() - 2));
  }
  int hour = 0;
  int minute = 0;
  const std::size_t colon = t.find(':');
  const std::string hs = t.substr(0, colon);
  auto parse_int = [](const std::string& str, int& out) {
    if (str.empty() || str.size() > 2) return false;
    auto [ptr, ec] = std::from_chars(str.data(), str.data() + str.size(), out);
    return ec == std::errc() && ptr == str.data() + str.size();
  };
  if (!parse_int(hs, hour)) return std::nullopt;
  if (colon != std::string::npos) {
    const std::string ms = t.substr(colon + 1);
    if (ms.size() != 2 || !parse_int(ms, minute)) return std::nullopt;
  } else if (offset < 0) {
    return std::nullopt;  // a bare number is only a time with am/pm
  }
  if (offset >= 0) {
    if (hour < 1 || hour > 12) return std::nullopt;
    hour = hour % 12 + offset;
  }
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59) return std::nullopt;
  return TimeOfDay{hour, minute};
}

std::string FormatTime(TimeOfDay t) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", t.hour, t.minute);
  return buf;
}

std::string FormatTimestamp(TimePoint t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::hh_mm_ss tod{std::chrono::floor<std::chrono::seconds>(t - day)};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", FormatDate(Date{day}).c_str(),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

nlohmann::json ToJson(const Value& v) {
  struct Visitor {
    nlohmann::json operator()(double d) const { return d; }
    nlohmann::json operator()(std::int64_t i) const { return i; }
    nlohmann::json operator()(const std::string& s) const { return s; }
    nlohmann::json operator()(Date d) const { return FormatDate(d); }
    nlohmann::json operator()(TimeOfDay t) const { return FormatTime(t); }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace nlapi
