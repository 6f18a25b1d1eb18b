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
#include "weather.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace nlapi {

using nlohmann::json;

namespace {

// Same rows as data/weather_fixture.json.
constexpr std::string_view kDefaultFixture = R"fixture([
    {"location": "Boston", "date": "2024-01-15", "summary": "windy", "temp_c": 5.6, "aqi": 131},
    {"location": "Boston", "date": "2024-07-01", "summary": "windy", "temp_c": 25.6, "aqi": 111},
    {"location": "Paris", "date": "2024-01-15", "summary": "snow", "temp_c": 3.9, "aqi": 114},
    {"location": "Paris", "date": "2024-07-01", "summary": "light rain", "temp_c": 26.3, "aqi": 78},
    {"location": "London", "date": "2024-01-15", "summary": "sunny", "temp_c": 0.0, "aqi": 75},
    {"location": "London", "date": "2024-07-01", "summary": "fog", "temp_c": 26.8, "aqi": 83},
    {"location": "Tokyo", "date": "2024-01-15", "summary": "light rain", "temp_c": 4.3, "aqi": 78},
    {"location": "Tokyo", "date": "2024-07-01", "summary": "partly cloudy", "temp_c": 22.1, "aqi": 76},
    {"location": "New York", "date": "2024-01-15", "summary": "clear", "temp_c": -0.5, "aqi": 70},
    {"location": "New York", "date": "2024-07-01", "summary": "light rain", "temp_c": 26.3, "aqi": 118},
    {"location": "San Francisco", "date": "2024-01-15", "summary": "snow", "temp_c": -0.1, "aqi": 34},
    {"location": "San Francisco", "date": "2024-07-01", "summary": "sunny", "temp_c": 25.0, "aqi": 65},
    {"location": "Chicago", "date": "2024-01-15", "summary": "light rain", "temp_c": 0.3, "aqi": 118},
    {"location": "Chicago", "date": "2024-07-01", "summary": "showers", "temp_c": 25.4, "aqi": 29},
    {"location": "Seattle", "date": "2024-01-15", "summary": "partly cloudy", "temp_c": 3.1, "aqi": 26},
    {"location": "Seattle", "date": "2024-07-01", "summary": "showers", "temp_c": 27.4, "aqi": 49},
    {"location": "Berlin", "date": "2024-01-15", "summary": "light rain", "temp_c": -1.7, "aqi": 98},
    {"location": "Berlin", "date": "2024-07-01", "summary": "clear", "temp_c": 23.9, "aqi": 134},
    {"location": "Madrid", "date": "2024-01-15", "summary": "cloudy", "temp_c": -0.8, "aqi": 27},
    {"location": "Madrid", "date": "2024-07-01", "summary": "showers", "temp_c": 20.4, "aqi": 99},
    {"location": "Rome", "date": "2024-01-15", "summary": "showers", "temp_c": -0.6, "aqi": 29},
    {"location": "Rome", "date": "2024-07-01", "summary": "clear", "temp_c": 24.9, "aqi": 64},
    {"location": "Sydney", "date": "2024-01-15", "summary": "showers", "temp_c": 26.4, "aqi": 59},
    {"location": "Sydney", "date": "2024-07-01", "summary": "clear", "temp_c": 11.5, "aqi": 110},
    {"location": "Toronto", "date": "2024-01-15", "summary": "clear", "temp_c": 4.5, "aqi": 80},
    {"location": "Toronto", "date": "2024-07-01", "summary": "fog", "temp_c": 21.8, "aqi": 33},
    {"location": "Mumbai", "date": "2024-01-15", "summary": "partly cloudy", "temp_c": 29.1, "aqi": 126},
    {"location": "Mumbai", "date": "2024-07-01", "summary": "clear", "temp_c": 28.9, "aqi": 44},
    {"location": "Singapore", "date": "2024-01-15", "summary": "cloudy", "temp_c": 32.2, "aqi": 77},
    {"location": "Singapore", "date": "2024-07-01", "summary": "clear", "temp_c": 28.9, "aqi": 124},
    {"location": "Dubai", "date": "2024-01-15", "summary": "sunny", "temp_c": 33.0, "aqi": 85},
    {"location": "Dubai", "date": "2024-07-01", "summary": "fog", "temp_c": 33.8, "aqi": 53},
    {"location": "Los Angeles", "date": "2024-01-15", "summary": "fog", "temp_c": 1.8, "aqi": 93},
    {"location": "Los Angeles", "date": "2024-07-01", "summary": "showers", "temp_c": 24.4, "aqi": 19},
    {"location": "Hong Kong", "date": "2024-01-15", "summary": "clear", "temp_c": 5.5, "aqi": 90},
    {"location": "Hong Kong", "date": "2024-07-01", "summary": "light rain", "temp_c": 23.3, "aqi": 48},
    {"location": "Cairo", "date": "2024-01-15", "summary": "clear", "temp_c": 18.9, "aqi": 64},
    {"location": "Cairo", "date": "2024-07-01", "summary": "overcast", "temp_c": 35.7, "aqi": 72},
    {"location": "Lima", "date": "2024-01-15", "summary": "light rain", "temp_c": 24.3, "aqi": 118},
    {"location": "Lima", "date": "2024-07-01", "summary": "fog", "temp_c": 11.8, "aqi": 113}
])fixture";

constexpr std::array<std::string_view, 8> kSummaries = {
    "sunny", "partly cloudy", "cloudy", "light rain", "showers", "clear", "windy", "overcast"};

}  // namespace

std::string_view DefaultWeatherFixture() { return kDefaultFixture; }

json WeatherRecord::ToJson() const {
  return {{"location", location}, {"date", FormatDate(date)}, {"summary", summary}, {"temp_c", temp_c}, {"aqi", aqi}};
}

FixtureWeatherProvider FixtureWeatherProvider::FromJson(const json& rows) {
  if (!rows.is_array()) throw Error(ErrorCode::kInvalidArgument, "weather fixture must be a JSON array");
  FixtureWeatherProvider provider;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& r = rows[i];
    const std::string where = "weather fixture row " + std::to_string(i);
    try {
      WeatherRecord rec;
      rec.location = r.at("location").get<std::string>();
      auto date = ParseIsoDate(r.at("date").get<std::string>());
      if (!date) throw Error(ErrorCode::kInvalidArgument, where + ": bad date");
      rec.date = *date;
      rec.summary = r.at("summary").get<std::string>();
      rec.temp_c = r.at("temp_c").get<double>();
      rec.aqi = r.at("aqi").get<int>();
      const std::string key = text::NormalizeQuery(rec.location);
      provider.display_names_.emplace(key, rec.location);
      provider.rows_[{key, FormatDate(rec.date)}] = std::move(rec);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, where + ": " + e.what());
    }
  }
  return provider;
}

FixtureWeatherProvider FixtureWeatherProvider::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open weather fixture " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json doc = json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kInvalidArgument, path.string() + " is not JSON");
  return FromJson(doc);
}

std::shared_ptr<const FixtureWeatherProvider> FixtureWeatherProvider::Default() {
  static const auto instance =
      std::make_shared<const FixtureWeatherProvider>(FromJson(json::parse(kDefaultFixture)));
  return instance;
}

std::optional<WeatherRecord> FixtureWeatherProvider::Lookup(std::string_view location, Date date) const {
  const std::string key = text::NormalizeQuery(location);
  auto name = display_names_.find(key);
  if (name == display_names_.end()) return std::nullopt;
  if (auto row = rows_.find({key, FormatDate(date)}); row != rows_.end()) return row->second;

  const std::uint64_t h = text::Fnv1a64(key + "|" + FormatDate(date));
  const int day_of_year = (std::chrono::sys_days{date} -
                           std::chrono::sys_days{Date{date.year(), std::chrono::January, std::chrono::day{1}}})
                              .count();
  const double seasonal = 14.0 - 11.0 * std::cos(2.0 * 3.14159265358979 * (day_of_year - 15) / 365.0);
  WeatherRecord rec;
  rec.location = name->second;
  rec.date = date;
  rec.summary = std::string(kSummaries[h % kSummaries.size()]);
  rec.temp_c = std::round((seasonal + static_cast<double>(h % 80) / 10.0 - 4.0) * 10.0) / 10.0;
  rec.aqi = 15 + static_cast<int>((h >> 8) % 120);
  return rec;
}

}  // namespace nlapi
