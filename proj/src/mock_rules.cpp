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
#include "mock_rules.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace nlapi {

using nlohmann::json;

namespace {

// Shared pattern fragments, substituted into the rule table below.
constexpr std::string_view kNum = R"re([-+]?\d+(?:\.\d+)?(?:e[-+]?\d+)?)re";
constexpr std::string_view kDate = R"re(\d{4}-\d{2}-\d{2}|today)re";
constexpr std::string_view kTime = R"re(\d{1,2}:\d{2})re";
// A one- or two-word place name; the second word may not be a filler word.
constexpr std::string_view kLoc =
    R"re((?<location>(?!(?:the|my|me|a)\b)[a-z][a-z'-]*(?:\s+(?!(?:today|on|please|thanks|for|now|this|next|tomorrow|starting|right)\b)[a-z][a-z'-]*)?))re";

std::string Expand(std::string_view pattern) {
  std::string out(pattern);
  auto replace_all = [&out](std::string_view key, std::string_view value) {
    for (std::size_t pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
      out.replace(pos, key.size(), value);
    }
  };
  replace_all("{NUM}", kNum);
  replace_all("{DATE}", kDate);
  replace_all("{TIME}", kTime);
  replace_all("{LOC}", kLoc);
  return out;
}

MockRule R(std::string module, std::string function, std::string_view pattern,
           std::vector<std::string> params = {}) {
  MockRule rule{Expand(pattern), {std::move(module), std::move(function)}, {}};
  for (auto& p : params) rule.param_groups.emplace(p, p);
  return rule;
}

// Order matters: modules whose keywords are most specific come first, and
// calculator rules (which key on bare numbers) come last.
std::vector<MockRule> DefaultRules() {
  return {
      // weather
      R("weather", "get_air_pollution",
        R"re(\b(?:air quality|air pollution|pollution|aqi|smog|air clean)\b.*?\b(?:in|for|at)\s+{LOC}(?:\s+on\s+(?<date>{DATE}))?)re",
        {"location", "date"}),
      R("weather", "get_air_pollution", R"re(\b(?:in|for)\s+{LOC}\b.*?\b(?:air quality|pollution|aqi)\b)re",
        {"location"}),
      R("weather", "get_weekly_forecast",
        R"re(\b(?:forecast|weekly|this week|next 7 days|7-day|coming days)\b.*?\b(?:in|for|at)\s+{LOC}(?:.*?\bstarting\s+(?<date>{DATE}))?)re",
        {"location", "date"}),
      R("weather", "get_weekly_forecast", R"re(\b(?:in|for)\s+{LOC}\b.*?\b(?:this week|weekly|forecast)\b)re",
        {"location"}),
      R("weather", "get_today_weather",
        R"re(\b(?:weather|temperature|rain(?:ing)?)\b.*?\b(?:in|for|at)\s+{LOC}(?:\s+on\s+(?<date>{DATE}))?)re",
        {"location", "date"}),
      R("weather", "get_today_weather", R"re(\b(?:how hot|how cold|sunny|snowing)\b.*?\bin\s+{LOC})re",
        {"location"}),

      // calendar
      R("calendar", "update_event",
        R"re(\b(?:move|reschedule|update|change|shift|push)\b.*?\b(?:event|meeting|appointment)\s*(?:number|#)?\s*#?(?<id>\d+)\b.*?\bto\s+(?<date>{DATE})(?:\s+at\s+(?<time>{TIME}))?)re",
        {"id", "date", "time"}),
      R("calendar", "update_event",
        R"re(\brename\b.*?\b(?:event|meeting|appointment)\s*(?:number|#)?\s*#?(?<id>\d+)\s+to\s+"(?<title>[^"]+)")re",
        {"id", "title"}),
      R("calendar", "update_event",
        R"re(\b(?:move|reschedule|update|change|shift|push)\b.*?\b(?:event|meeting|appointment)\s*(?:number|#)?\s*#?(?<id>\d+)\b.*?\bto\s+(?<time>{TIME}))re",
        {"id", "time"}),
      R("calendar", "update_event",
        R"re(\b(?:move|reschedule|update|change|rename|shift|push)\b.*?\b(?:event|meeting|appointment)\s*(?:number|#)?\s*#?(?<id>\d+))re",
        {"id"}),
      R("calendar", "remove_event",
        R"re(\b(?:remove|cancel|delete|drop|take)\b.*?\b(?:event|meeting|appointment)\b\s*(?:number|#|with id|id)?\s*#?(?<id>\d+))re",
        {"id"}),
      R("calendar", "remove_event",
        R"re(\b(?:event|meeting|appointment)\s*#?(?<id>\d+)\b.*?\b(?:off|cancel(?:led)?|remove)\b)re", {"id"}),
      R("calendar", "add_event",
        R"re(\b(?:add|schedule|create|book|set up)\b.*?\b(?:event|meeting|appointment)\b\s*(?:called\s+)?"(?<title>[^"]+)"\s+(?:on|for)\s+(?<date>{DATE})(?:\s+at\s+(?<time>{TIME}))?)re",
        {"title", "date", "time"}),
      R("calendar", "add_event",
        R"re(\bput\s+"(?<title>[^"]+)"\s+on\s+(?:my\s+)?calendar\s+(?:on|for)\s+(?<date>{DATE})(?:\s+at\s+(?<time>{TIME}))?)re",
        {"title", "date", "time"}),
      R("calendar", "add_event", R"re(\b(?:add|schedule|create|book|set up)\b.*?\b(?:event|meeting|appointment)s?\b)re"),
      R("calendar", "view_event",
        R"re(\b(?:what's on|show|list|view|see|display|check|any|what)\b.*?\b(?:calendar|events?|meetings?|appointments?|schedule)\b(?:.*?\b(?:on|for)\s+(?<date>{DATE}))?)re",
        {"date"}),
      R("calendar", "view_event", R"re(\bmy\s+(?:calendar|schedule)\b)re"),

      // email
      R("email", "reply_email",
        R"re(\b(?:reply|respond|write back|answer)\b.*?\be-?mail\s*(?:number|#)?\s*#?(?<id>\d+)(?:.*?"(?<body>[^"]+)")?)re",
        {"id", "body"}),
      R("email", "reply_email", R"re(\be-?mail\s*#?(?<id>\d+)\b.*?\b(?:reply|respond)\b)re", {"id"}),
      R("email", "delete_email",
        R"re(\b(?:delete|trash|remove|erase|get rid of|discard)\b.*?\be-?mail\b\s*(?:number|#|with id|id)?\s*#?(?<id>\d+))re",
        {"id"}),
      R("email", "delete_email", R"re(\be-?mail\s*#?(?<id>\d+)\b.*?\b(?:delete|trash|remove)\b)re", {"id"}),
      R("email", "send_email",
        R"re(\b(?:send|dispatch)\b.*?\be-?mail\s*(?:draft\s*)?(?:number|#)?\s*#?(?<id>\d+))re", {"id"}),
      R("email", "send_email", R"re(\bsend\b.*?\bdraft\s*#?(?<id>\d+))re", {"id"}),
      R("email", "read_email",
        R"re(\b(?:read|open|show|view|display|check)\b.*?\be-?mail\s*(?:number|#)?\s*#?(?<id>\d+))re", {"id"}),
      R("email", "read_email", R"re(\be-?mail\s*#?(?<id>\d+)\s+say\b)re", {"id"}),
      R("email", "read_email", R"re(\b(?:read|check|open|show|view)\b.*?\b(?:inbox|e-?mails)\b)re"),
      R("email", "compose_email",
        R"re(\b(?:compose|draft|write|start|prepare|create)\b.*?\be-?mail\b.*?\b(?:to|for)\s+(?<to>[a-z0-9._@-]+).*?\b(?:about|subject)\s+"(?<subject>[^"]+)")re",
        {"to", "subject"}),
      R("email", "compose_email",
        R"re(\b(?:compose|draft|write|start|prepare|create)\b.*?\be-?mail\b.*?\b(?:to|for)\s+(?<to>[a-z0-9._@-]+).*?\bsaying\s+"(?<body>[^"]+)")re",
        {"to", "body"}),
      R("email", "compose_email",
        R"re(\b(?:compose|draft|write|start|prepare|create)\b.*?\be-?mail\b.*?\b(?:to|for)\s+(?<to>[a-z0-9._@-]+))re",
        {"to"}),

      // notification
      R("notification", "delete_notification",
        R"re(\b(?:delete|remove|dismiss|clear|get rid of|erase)\b.*?\bnotification\s*(?:number|#)?\s*#?(?<id>\d+))re",
        {"id"}),
      R("notification", "delete_notification",
        R"re(\bnotification\s*#?(?<id>\d+)\b.*?\b(?:delete|remove|dismiss)\b)re", {"id"}),
      R("notification", "mark_as_read",
        R"re(\b(?:mark|flag|set)\b.*?\bnotification\s*(?:number|#)?\s*#?(?<id>\d+)\b.*?\b(?:read|seen)\b)re",
        {"id"}),
      R("notification", "mark_as_read",
        R"re(\b(?:mark|flag|set)\b.*?\b(?:as|to)\s+(?:read|seen)\b.*?\bnotification\s*#?(?<id>\d+))re", {"id"}),
      R("notification", "mark_as_read", R"re(\bi(?:'ve| have) (?:read|seen) notification\s*#?(?<id>\d+))re",
        {"id"}),
      R("notification", "send_notification",
        R"re(\b(?:send|push)\b.*?\bnotification\b.*?\bto\s+(?<recipient>[a-z]+)\b.*?"(?<message>[^"]+)")re",
        {"recipient", "message"}),
      R("notification", "send_notification",
        R"re(\bsend\s+(?<recipient>[a-z]+)\s+a\s+notification\b.*?"(?<message>[^"]+)")re",
        {"recipient", "message"}),
      R("notification", "send_notification",
        R"re(\b(?:notify|alert)\s+(?<recipient>[a-z]+)\b.*?"(?<message>[^"]+)")re", {"recipient", "message"}),
      R("notification", "send_notification",
        R"re(\b(?:notify|alert)\s+(?<recipient>[a-z]+)\s+(?:that\s+)?(?<message>.+)$)re",
        {"recipient", "message"}),
      R("notification", "view_notification",
        R"re(\b(?:view|open|show|see|check|read|display)\b.*?\bnotification\s*(?:number|#)?\s*#?(?<id>\d+))re",
        {"id"}),
      R("notification", "view_notification",
        R"re(\b(?:view|show|list|see|check|display|any|open)\b.*?\bnotifications?\b)re"),

      // notes
      R("notes", "update_note",
        R"re(\b(?:update|change|edit|modify|rewrite)\b.*?\bnote\b\s*(?:number|#)?\s*#?(?<id>\d+)(?:.*?"(?<content>[^"]+)")?)re",
        {"id", "content"}),
      R("notes", "update_note", R"re(\bnote\s*#?(?<id>\d+)\b.*?\b(?:update|change|edit)\b)re", {"id"}),
      R("notes", "delete_note",
        R"re(\b(?:delete|remove|erase|trash|get rid of|discard)\b.*?\bnote\b\s*(?:number|#|with id|id)?\s*#?(?<id>\d+))re",
        {"id"}),
      R("notes", "delete_note", R"re(\bnote\s*#?(?<id>\d+)\b.*?\b(?:delete|remove|erase)\b)re", {"id"}),
      R("notes", "create",
        R"re(\bnote\s+titled\s+(?<title>[a-z0-9 ]+?)\s+that says\s+"(?<content>[^"]+)")re", {"title", "content"}),
      R("notes", "create",
        R"re(\b(?:create|make|write|save|add|jot down|new)\b.*?\bnote\b.*?"(?<content>[^"]+)")re", {"content"}),
      R("notes", "create", R"re(\bjot down\s+"(?<content>[^"]+)")re", {"content"}),
      R("notes", "create",
        R"re(\b(?:create|make|write|save|add)\s+(?:a\s+)?(?:new\s+)?note\s+(?:saying|that says|:)?\s*(?<content>.+)$)re",
        {"content"}),
      R("notes", "get_all_notes", R"re(\b(?:show|list|display|get|read|view|see)\b.*?\b(?:all|every|my)\b.*?\bnotes?\b)re"),
      R("notes", "get_all_notes", R"re(\bwhat notes\b)re"),

      // calculator
      R("calculator", "factorial", R"re(\bfactorial\s+(?:of\s+|for\s+)?(?<n>{NUM}))re", {"n"}),
      R("calculator", "factorial", R"re((?<n>{NUM})\s*(?:!|\s+factorial\b))re", {"n"}),
      R("calculator", "log", R"re(\blog(?:arithm)?\s+base\s+(?<base>{NUM})\s+of\s+(?<x>{NUM}))re", {"base", "x"}),
      R("calculator", "log",
        R"re(\blog(?:arithm)?\s+of\s+(?<x>{NUM})\s+(?:with\s+|in\s+)?base\s+(?<base>{NUM}))re", {"x", "base"}),
      R("calculator", "log", R"re(\blog(?:arithm)?\s+(?:of\s+)?(?<x>{NUM}))re", {"x"}),
      R("calculator", "power", R"re((?<a>{NUM})\s*(?:\^|\*\*)\s*(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "power",
        R"re((?<a>{NUM})\s+(?:to the power(?: of)?|raised to(?: the power of)?)\s+(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "power", R"re(\bexponentiate\s+(?<a>{NUM})\s+by\s+(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "sin", R"re(\bsine?\s*(?:of\s+)?\(?\s*(?<x>{NUM}))re", {"x"}),
      R("calculator", "sin", R"re(\bsine\b.*?(?<x>{NUM}))re", {"x"}),
      R("calculator", "cos", R"re(\bcos(?:ine)?\s*(?:of\s+)?\(?\s*(?<x>{NUM}))re", {"x"}),
      R("calculator", "cos", R"re(\bcosine\b.*?(?<x>{NUM}))re", {"x"}),
      R("calculator", "tan", R"re(\btan(?:gent)?\s*(?:of\s+)?\(?\s*(?<x>{NUM}))re", {"x"}),
      R("calculator", "tan", R"re(\btangent\b.*?(?<x>{NUM}))re", {"x"}),
      R("calculator", "divide", R"re(\bdivide\s+(?<a>{NUM})\s+(?:by|into)\s+(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "divide", R"re((?<a>{NUM})\s*(?:divided by|/|over)\s*(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "divide", R"re(\bquotient of\s+(?<a>{NUM})\s+and\s+(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "multiply", R"re(\bmultiply\s+(?<a>{NUM})\s+(?:by|and|with)\s+(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "multiply",
        R"re((?<a>{NUM})\s*(?:times|\*|x|multiplied by)\s*(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "multiply", R"re(\bproduct of\s+(?<a>{NUM})\s+and\s+(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "subtract",
        R"re(\b(?:subtract|take)\s+(?<b>{NUM})\s+(?:from|away from)\s+(?<a>{NUM}))re", {"a", "b"}),
      R("calculator", "subtract", R"re(\bdifference between\s+(?<a>{NUM})\s+and\s+(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "subtract", R"re((?<a>{NUM})\s*(?:minus|-)\s*(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "add",
        R"re(\b(?:add|sum of|total of)\s+(?<a>{NUM})\s+(?:and|to|with|plus)\s+(?<b>{NUM}))re", {"a", "b"}),
      R("calculator", "add", R"re((?<a>{NUM})\s*(?:\+|plus)\s*(?<b>{NUM}))re", {"a", "b"}),

      // explicit out-of-scope requests
      R("routes_not_exist", "return_invalid_error", R"re(\b(?:flight|pizza|lights|translate)\b)re"),
      R("routes_not_exist", "return_invalid_error", R"re(\b(?:who won|meaning of|sing me)\b)re"),
  };
}

}  // namespace

MockRuleset::MockRuleset(std::vector<MockRule> rules) : rules_(std::move(rules)) {
  compiled_.reserve(rules_.size());
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    try {
      compiled_.emplace_back(rules_[i].pattern, boost::regex::perl | boost::regex::icase);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rule " + std::to_string(i) + ": invalid regex '" + rules_[i].pattern + "': " + e.what());
    }
  }
}

MockRuleset MockRuleset::FromJson(const json& document) {
  if (!document.is_array()) throw Error(ErrorCode::kInvalidArgument, "mock ruleset must be a JSON array");
  std::vector<MockRule> rules;
  for (std::size_t i = 0; i < document.size(); ++i) {
    const json& r = document[i];
    const std::string where = "rule " + std::to_string(i);
    if (!r.is_object()) throw Error(ErrorCode::kInvalidArgument, where + ": expected object");
    MockRule rule;
    try {
      rule.pattern = r.at("pattern").get<std::string>();
      rule.target = {r.at("module").get<std::string>(), r.at("function").get<std::string>()};
      if (auto groups = r.find("param_groups"); groups != r.end()) {
        for (const auto& [param, group] : groups->items()) {
          if (group.is_number_integer()) {
            rule.param_groups.emplace(param, group.get<int>());
          } else if (group.is_string()) {
            rule.param_groups.emplace(param, group.get<std::string>());
          } else {
            throw Error(ErrorCode::kInvalidArgument, where + ": param_groups values must be int or string");
          }
        }
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, where + ": " + e.what());
    }
    rules.push_back(std::move(rule));
  }
  return MockRuleset(std::move(rules));
}

MockRuleset MockRuleset::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open ruleset " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json doc = json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "ruleset " + path.string() + " is not JSON");
  return FromJson(doc);
}

std::shared_ptr<const MockRuleset> MockRuleset::Default() {
  static const auto instance = std::make_shared<const MockRuleset>(DefaultRules());
  return instance;
}

json MockRuleset::ToJson() const {
  json out = json::array();
  for (const auto& rule : rules_) {
    json groups = json::object();
    for (const auto& [param, group] : rule.param_groups) {
      std::visit([&](const auto& g) { groups[param] = g; }, group);
    }
    out.push_back({{"pattern", rule.pattern},
                   {"module", rule.target.module},
                   {"function", rule.target.function},
                   {"param_groups", std::move(groups)}});
  }
  return out;
}

std::optional<MockRuleset::Match> MockRuleset::FirstMatch(std::string_view query) const {
  for (std::size_t i = 0; i < compiled_.size(); ++i) {
    boost::match_results<std::string_view::const_iterator> m;
    bool found = false;
    try {
      found = boost::regex_search(query.begin(), query.end(), m, compiled_[i]);
    } catch (const std::runtime_error&) {
      // Pathological input exceeded the matcher's complexity bound; treat as no match.
      found = false;
    }
    if (!found) continue;

    Match match{rules_[i].target, {}, i};
    for (const auto& [param, group] : rules_[i].param_groups) {
      const auto& sub = std::holds_alternative<int>(group) ? m[std::get<int>(group)]
                                                           : m[std::get<std::string>(group)];
      if (!sub.matched) continue;
      std::string value = text::Trim(std::string(sub.first, sub.second));
      if (!value.empty()) match.params.emplace(param, std::move(value));
    }
    return match;
  }
  return std::nullopt;
}

ClassificationResult MockClassify(std::string_view query, const MockRuleset& ruleset, const Registry& registry) {
  const auto start = std::chrono::steady_clock::now();
  ClassificationResult result;
  result.label = InvalidLabel();
  if (auto match = ruleset.FirstMatch(query)) {
    if (auto resolved = ValidateLabel(match->label, registry)) {
      result.label = *resolved;
      const ApiFunction* fn = registry.FindFunction(result.label);
      for (auto& [param, value] : match->params) {
        if (fn->FindParam(param) != nullptr) result.params.emplace(param, std::move(value));
      }
    } else {
      result.diagnostics.emplace_back(kLabelUnresolved);
    }
    result.raw_output = SerializeCore({result.label, result.params, {}});
  } else {
    result.raw_output = SerializeCore({result.label, {}, {}});
  }
  result.latency = std::chrono::steady_clock::now() - start;
  return result;
}

ClassificationResult MockClassifier::Classify(std::string_view query, const Registry& registry) {
  return MockClassify(query, *ruleset_, registry);
}

}  // namespace nlapi
