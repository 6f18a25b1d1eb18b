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
#include "hierarchy.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace nlapi {

using nlohmann::json;

std::string_view ToString(ParamKind kind) {
  switch (kind) {
    case ParamKind::kNumber: return "number";
    case ParamKind::kInteger: return "integer";
    case ParamKind::kString: return "string";
    case ParamKind::kDate: return "date";
    case ParamKind::kTime: return "time";
    case ParamKind::kLocation: return "location";
    case ParamKind::kEnum: return "enum";
  }
  return "string";
}

std::optional<ParamKind> ParseParamKind(std::string_view s) {
  for (auto k : {ParamKind::kNumber, ParamKind::kInteger, ParamKind::kString, ParamKind::kDate,
                 ParamKind::kTime, ParamKind::kLocation, ParamKind::kEnum}) {
    if (ToString(k) == s) return k;
  }
  return std::nullopt;
}

const ParamSpec* ApiFunction::FindParam(std::string_view param) const {
  for (const auto& p : params) {
    if (p.name == param) return &p;
  }
  return nullptr;
}

const ApiFunction* ApiModule::FindFunction(std::string_view function) const {
  for (const auto& f : functions) {
    if (f.name == function) return &f;
  }
  return nullptr;
}

namespace {

ParamSpec Req(std::string name, ParamKind kind) { return {std::move(name), kind, true, {}}; }
ParamSpec Opt(std::string name, ParamKind kind) { return {std::move(name), kind, false, {}}; }

ApiFunction Fn(std::string name, std::vector<ParamSpec> params, std::string description) {
  return {std::move(name), std::move(params), std::move(description)};
}

[[noreturn]] void Malformed(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, "malformed registry document at " + path + ": " + what);
}

const json& Field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) Malformed(path + "." + key, "missing field");
  return *it;
}

std::string StringField(const json& obj, const char* key, const std::string& path,
                        bool optional = false) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (optional) return {};
    Malformed(path + "." + key, "missing field");
  }
  if (!it->is_string()) Malformed(path + "." + key, "expected string");
  return it->get<std::string>();
}

ParamSpec ParseParam(const json& p, const std::string& path) {
  if (!p.is_object()) Malformed(path, "expected object");
  ParamSpec spec;
  spec.name = StringField(p, "name", path);
  const std::string kind = StringField(p, "kind", path);
  auto parsed = ParseParamKind(kind);
  if (!parsed) Malformed(path + ".kind", "unknown kind '" + kind + "'");
  spec.kind = *parsed;
  const json& required = Field(p, "required", path);
  if (!required.is_boolean()) Malformed(path + ".required", "expected boolean");
  spec.required = required.get<bool>();
  if (auto it = p.find("enum_values"); it != p.end()) {
    if (!it->is_array()) Malformed(path + ".enum_values", "expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) {
        Malformed(path + ".enum_values[" + std::to_string(i) + "]", "expected string");
      }
      spec.enum_values.push_back((*it)[i].get<std::string>());
    }
  }
  return spec;
}

}  // namespace

Registry::Registry(std::int64_t version, std::vector<ApiModule> modules)
    : version_(version), modules_(std::move(modules)) {
  Validate();
}

Registry Registry::Default() {
  using K = ParamKind;
  std::vector<ApiModule> modules;

  modules.push_back(
      {"calculator",
       "Arithmetic and elementary functions",
       {
           Fn("add", {Req("a", K::kNumber), Req("b", K::kNumber)}, "sum of a and b"),
           Fn("subtract", {Req("a", K::kNumber), Req("b", K::kNumber)}, "a minus b"),
           Fn("multiply", {Req("a", K::kNumber), Req("b", K::kNumber)}, "product of a and b"),
           Fn("divide", {Req("a", K::kNumber), Req("b", K::kNumber)}, "a divided by b"),
           Fn("power", {Req("a", K::kNumber), Req("b", K::kNumber)}, "a raised to the power b"),
           Fn("log", {Req("x", K::kNumber), Opt("base", K::kNumber)},
              "logarithm of x, natural unless base is given"),
           Fn("factorial", {Req("n", K::kInteger)}, "n! for integers 0..20"),
           Fn("sin", {Req("x", K::kNumber)}, "sine of x in radians"),
           Fn("cos", {Req("x", K::kNumber)}, "cosine of x in radians"),
           Fn("tan", {Req("x", K::kNumber)}, "tangent of x in radians"),
       }});

  modules.push_back(
      {"weather",
       "Weather conditions by location",
       {
           Fn("get_today_weather", {Req("location", K::kLocation), Opt("date", K::kDate)},
              "current conditions for a location"),
           Fn("get_weekly_forecast", {Req("location", K::kLocation), Opt("date", K::kDate)},
              "seven-day forecast starting at date"),
           Fn("get_air_pollution", {Req("location", K::kLocation), Opt("date", K::kDate)},
              "air quality index for a location"),
       }});

  modules.push_back(
      {"notes",
       "Personal notes",
       {
           Fn("create", {Req("content", K::kString), Opt("title", K::kString)}, "create a note"),
           Fn("get_all_notes", {}, "list all notes"),
           Fn("delete_note", {Req("id", K::kString)}, "delete a note by id"),
           Fn("update_note", {Req("id", K::kString), Opt("content", K::kString), Opt("title", K::kString)},
              "change the content or title of a note"),
       }});

  modules.push_back(
      {"notification",
       "In-app notifications",
       {
           Fn("send_notification", {Req("message", K::kString), Opt("recipient", K::kString)},
              "send a notification"),
           Fn("view_notification", {Opt("id", K::kString)}, "show one notification or all of them"),
           Fn("mark_as_read", {Req("id", K::kString)}, "mark a notification as read"),
           Fn("delete_notification", {Req("id", K::kString)}, "delete a notification"),
       }});

  modules.push_back(
      {"email",
       "Email drafts and mailbox",
       {
           Fn("compose_email",
              {Req("to", K::kString), Opt("subject", K::kString), Opt("body", K::kString)},
              "create a draft email"),
           Fn("send_email", {Req("id", K::kString)}, "send a draft"),
           Fn("read_email", {Opt("id", K::kString)}, "read one email or list the mailbox"),
           Fn("reply_email", {Req("id", K::kString), Opt("body", K::kString)},
              "reply to an email"),
           Fn("delete_email", {Req("id", K::kString)}, "delete an email"),
       }});

  modules.push_back(
      {"calendar",
       "Calendar events",
       {
           Fn("add_event", {Req("title", K::kString), Req("date", K::kDate), Opt("time", K::kTime)},
              "add an event"),
           Fn("remove_event", {Req("id", K::kString)}, "remove an event"),
           Fn("update_event",
              {Req("id", K::kString), Opt("title", K::kString), Opt("date", K::kDate),
               Opt("time", K::kTime)},
              "change an event's title, date or time"),
           Fn("view_event", {Opt("date", K::kDate)}, "list events, optionally on one date"),
       }});

  modules.push_back({std::string(kInvalidModule),
                     "Queries that match no supported route",
                     {Fn(std::string(kInvalidFunction), {}, "no matching API route")}});

  return Registry(1, std::move(modules));
}

Registry Registry::FromJson(const json& document) {
  if (!document.is_object()) Malformed("$", "expected object");
  std::int64_t version = 1;
  if (auto it = document.find("version"); it != document.end()) {
    if (!it->is_number_integer()) Malformed("version", "expected integer");
    version = it->get<std::int64_t>();
  }
  const json& mods = Field(document, "modules", "$");
  if (!mods.is_array()) Malformed("modules", "expected array");

  std::vector<ApiModule> modules;
  for (std::size_t mi = 0; mi < mods.size(); ++mi) {
    const std::string mpath = "modules[" + std::to_string(mi) + "]";
    const json& m = mods[mi];
    if (!m.is_object()) Malformed(mpath, "expected object");
    ApiModule module;
    module.name = StringField(m, "name", mpath);
    module.description = StringField(m, "description", mpath, true);
    const json& fns = Field(m, "functions", mpath);
    if (!fns.is_array()) Malformed(mpath + ".functions", "expected array");
    for (std::size_t fi = 0; fi < fns.size(); ++fi) {
      const std::string fpath = mpath + ".functions[" + std::to_string(fi) + "]";
      const json& f = fns[fi];
      if (!f.is_object()) Malformed(fpath, "expected object");
      ApiFunction fn;
      fn.name = StringField(f, "name", fpath);
      fn.description = StringField(f, "description", fpath, true);
      if (auto it = f.find("params"); it != f.end()) {
        if (!it->is_array()) Malformed(fpath + ".params", "expected array");
        for (std::size_t pi = 0; pi < it->size(); ++pi) {
          fn.params.push_back(ParseParam((*it)[pi], fpath + ".params[" + std::to_string(pi) + "]"));
        }
      }
      module.functions.push_back(std::move(fn));
    }
    modules.push_back(std::move(module));
  }
  return Registry(version, std::move(modules));
}

Registry Registry::FromJsonText(std::string_view document) {
  json parsed;
  try {
    parsed = json::parse(document);
  } catch (const json::parse_error& e) {
    Malformed("$", e.what());
  }
  return FromJson(parsed);
}

Registry Registry::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open registry file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJsonText(ss.str());
}

json Registry::ToJson() const {
  json mods = json::array();
  for (const auto& m : modules_) {
    json fns = json::array();
    for (const auto& f : m.functions) {
      json params = json::array();
      for (const auto& p : f.params) {
        json jp = {{"name", p.name}, {"kind", std::string(nlapi::ToString(p.kind))}, {"required", p.required}};
        if (!p.enum_values.empty()) jp["enum_values"] = p.enum_values;
        params.push_back(std::move(jp));
      }
      fns.push_back({{"name", f.name}, {"description", f.description}, {"params", std::move(params)}});
    }
    mods.push_back({{"name", m.name}, {"description", m.description}, {"functions", std::move(fns)}});
  }
  return {{"version", version_}, {"modules", std::move(mods)}};
}

std::size_t Registry::function_count() const {
  std::size_t n = 0;
  for (const auto& m : modules_) n += m.functions.size();
  return n;
}

const ApiModule* Registry::FindModule(std::string_view module) const {
  for (const auto& m : modules_) {
    if (m.name == module) return &m;
  }
  return nullptr;
}

const ApiFunction* Registry::FindFunction(const Label& label) const {
  const ApiModule* m = FindModule(label.module);
  return m ? m->FindFunction(label.function) : nullptr;
}

void Registry::Validate() const {
  std::set<std::string> module_names;
  int reserved = 0;
  for (const auto& m : modules_) {
    if (!text::IsIdentifier(m.name)) {
      throw Error(ErrorCode::kInvalidRegistry, "invalid module name '" + m.name + "'");
    }
    if (!module_names.insert(m.name).second) {
      throw Error(ErrorCode::kDuplicateName, "duplicate module " + m.name);
    }
    if (m.functions.empty()) {
      throw Error(ErrorCode::kInvalidRegistry, "module " + m.name + " has no functions");
    }
    std::set<std::string> fn_names;
    for (const auto& f : m.functions) {
      const std::string where = m.name + "." + f.name;
      if (!text::IsIdentifier(f.name)) {
        throw Error(ErrorCode::kInvalidRegistry, "invalid function name '" + where + "'");
      }
      if (!fn_names.insert(f.name).second) {
        throw Error(ErrorCode::kDuplicateName, "duplicate function " + where);
      }
      std::set<std::string> param_names;
      bool seen_optional = false;
      for (const auto& p : f.params) {
        if (!text::IsIdentifier(p.name)) {
          throw Error(ErrorCode::kInvalidRegistry, "invalid parameter name '" + p.name + "' in " + where);
        }
        if (!param_names.insert(p.name).second) {
          throw Error(ErrorCode::kDuplicateName, "duplicate parameter " + where + "." + p.name);
        }
        if ((p.kind == ParamKind::kEnum) != !p.enum_values.empty()) {
          throw Error(ErrorCode::kInvalidRegistry,
                      "parameter " + where + "." + p.name + ": enum_values must be given iff kind is enum");
        }
        if (p.required && seen_optional) {
          throw Error(ErrorCode::kInvalidRegistry,
                      "required parameter " + where + "." + p.name + " follows an optional one");
        }
        seen_optional = seen_optional || !p.required;
      }
      if (m.name == kInvalidModule && f.name == kInvalidFunction) {
        ++reserved;
        if (!f.params.empty()) {
          throw Error(ErrorCode::kInvalidRegistry, "reserved label " + where + " must have no parameters");
        }
      }
    }
  }
  if (reserved == 0) {
    throw Error(ErrorCode::kMissingReservedLabel,
                "missing reserved label " + InvalidLabel().ToString());
  }
}

std::optional<Label> ValidateLabel(const Label& label, const Registry& registry) {
  Label normalized{text::NormalizeIdentifier(label.module), text::NormalizeIdentifier(label.function)};
  if (registry.FindFunction(normalized) == nullptr) return std::nullopt;
  return normalized;
}

std::string RegistryDigest(const Registry& registry) {
  std::string out;
  for (const auto& m : registry.modules()) {
    for (const auto& f : m.functions) {
      out += m.name;
      out += '.';
      out += f.name;
      out += '(';
      for (std::size_t i = 0; i < f.params.size(); ++i) {
        const auto& p = f.params[i];
        if (i) out += ", ";
        out += p.name;
        out += ':';
        out += ToString(p.kind);
        if (p.kind == ParamKind::kEnum) {
          out += '[';
          for (std::size_t k = 0; k < p.enum_values.size(); ++k) {
            if (k) out += '|';
            out += p.enum_values[k];
          }
          out += ']';
        }
        if (!p.required) out += '?';
      }
      out += ')';
      if (!f.description.empty()) {
        out += " - ";
        out += f.description;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace nlapi
