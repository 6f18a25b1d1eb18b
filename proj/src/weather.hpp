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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "values.hpp"

namespace nlapi {

struct WeatherRecord {
  std::string location;
  Date date;
  std::string summary;
  double temp_c = 0;
  int aqi = 0;

  bool operator==(const WeatherRecord&) const = default;
  nlohmann::json ToJson() const;
};

class WeatherProvider {
 public:
  virtual ~WeatherProvider() = default;
  // nullopt means the location is unknown.
  virtual std::optional<WeatherRecord> Lookup(std::string_view location, Date date) const = 0;
};

// Deterministic provider backed by a fixture table. Exact (location, date)
// rows are served verbatim; other dates for a known location are synthesized
// from a hash of the pair, so repeated lookups always agree.
class FixtureWeatherProvider final : public WeatherProvider {
 public:
  static FixtureWeatherProvider FromJson(const nlohmann::json& rows);
  static FixtureWeatherProvider FromFile(const std::filesystem::path& path);
  static std::shared_ptr<const FixtureWeatherProvider> Default();

  std::optional<WeatherRecord> Lookup(std::string_view location, Date date) const override;

  std::size_t size() const { return rows_.size(); }
  bool operator==(const FixtureWeatherProvider&) const = default;

 private:
  std::map<std::string, std::string> display_names_;  // lowercase -> as written
  std::map<std::pair<std::string, std::string>, WeatherRecord> rows_;
};

// Fixture table compiled into the library.
std::string_view DefaultWeatherFixture();

}  // namespace nlapi
