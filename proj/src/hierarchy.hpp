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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace nlapi {

enum class ParamKind { kNumber, kInteger, kString, kDate, kTime, kLocation, kEnum };

std::string_view ToString(ParamKind kind);
std::optional<ParamKind> ParseParamKind(std::string_view s);

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::kString;
  bool required = true;
  std::vector<std::string> enum_values;  // non-empty iff kind == kEnum

  bool operator==(const ParamSpec&) const = default;
};

struct ApiFunction {
  std::string name;
  std::vector<ParamSpec> params;  // required params first
  std::string description;

  const ParamSpec* FindParam(std::string_view param) const;
  bool operator==(const ApiFunction&) const = default;
};

struct ApiModule {
  std::string name;
  std::string description;
  std::vector<ApiFunction> functions;

  const ApiFunction* FindFunction(std::string_view function) const;
  bool operator==(const ApiModule&) const = default;
};

struct Label {
  std::string module;
  std::string function;

  std::string ToString() const { return module + "." + function; }
  bool operator==(const Label&) const = default;
  auto operator<=>(const Label&) const = default;
};

inline constexpr std::string_view kInvalidModule = "routes_not_exist";
inline constexpr std::string_view kInvalidFunction = "return_invalid_error";

inline Label InvalidLabel() { return {std::string(kInvalidModule), std::string(kInvalidFunction)}; }
inline bool IsInvalidLabel(const Label& l) {
  return l.module == kInvalidModule && l.function == kInvalidFunction;
}

// The module -> function -> parameter hierarchy. Immutable once constructed;
// share it as std::shared_ptr<const Registry>.
class Registry {
 public:
  // Built-in seven-module hierarchy (version 1).
  static Registry Default();

  // Parse and validate a registry document. Throws Error naming the offending
  // path (e.g. "modules[1].functions[0].name") on any violation.
  static Registry FromJson(const nlohmann::json& document);
  static Registry FromJsonText(std::string_view document);
  static Registry FromFile(const std::filesystem::path& path);

  nlohmann::json ToJson() const;

  std::int64_t version() const { return version_; }
  const std::vector<ApiModule>& modules() const { return modules_; }
  std::size_t function_count() const;

  const ApiModule* FindModule(std::string_view module) const;
  const ApiFunction* FindFunction(const Label& label) const;

  bool operator==(const Registry&) const = default;

 private:
  Registry(std::int64_t version, std::vector<ApiModule> modules);
  void Validate() const;

  std::int64_t version_ = 1;
  std::vector<ApiModule> modules_;
};

// Normalizes both components (lowercase, trim, spaces to underscores) and
// returns the canonical label when it names a registered function.
std::optional<Label> ValidateLabel(const Label& label, const Registry& registry);

// One line per function, "module.function(param:kind, ...) - description",
// in registry order. Optional parameters carry a trailing '?'.
std::string RegistryDigest(const Registry& registry);

}  // namespace nlapi
