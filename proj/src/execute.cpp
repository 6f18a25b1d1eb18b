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
#include "execute.hpp"

#include <cmath>
#include <functional>
#include <unordered_map>

#include "text.hpp"

namespace nlapi {

using nlohmann::json;

std::string_view ToString(ExecStatus status) {
  switch (status) {
    case ExecStatus::kOk: return "ok";
    case ExecStatus::kInvalidRoute: return "invalid_route";
    case ExecStatus::kMissingParam: return "missing_param";
    case ExecStatus::kBadParam: return "bad_param";
    case ExecStatus::kExecError: return "exec_error";
  }
  return "exec_error";
}

ExecutionResult ExecutionResult::Ok(json payload, std::string message) {
  return {ExecStatus::kOk, std::move(payload), std::move(message)};
}

ExecutionResult ExecutionResult::Fail(ExecStatus status, std::string message) {
  if (message.empty()) message = std::string(ToString(status));
  return {status, std::nullopt, std::move(message)};
}

json ExecutionResult::ToJson() const {
  json j = {{"status", std::string(ToString(status))}, {"message", message}};
  j["payload"] = payload ? *payload : json(nullptr);
  return j;
}

double BoundArgs::Number(std::string_view name) const {
  const Value& v = Get(name);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

const std::string& BoundArgs::Text(std::string_view name) const { return std::get<std::string>(Get(name)); }

std::string BindingFailure::message() const {
  if (status == ExecStatus::kMissingParam) return "missing required parameter '" + param + "'";
  return "bad value for parameter '" + param + "': " + reason;
}

namespace {

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

std::variant<Value, std::string> ParseValue(const ParamSpec& spec, const std::string& raw, const Clock& clock) {
  const std::string trimmed = text::Trim(raw);
  switch (spec.kind) {
    case ParamKind::kNumber: {
      auto v = ParseNumber(trimmed);
      if (!v) return std::string("not a finite number");
      return Value{*v};
    }
    case ParamKind::kInteger: {
      auto v = ParseNumber(trimmed);
      if (!v) return std::string("not a number");
      if (std::trunc(*v) != *v || std::fabs(*v) > kMaxExactInteger) return std::string("not an integer");
      return Value{static_cast<std::int64_t>(*v)};
    }
    case ParamKind::kDate: {
      if (text::ToLower(trimmed) == "today") return Value{DateOf(clock.Now())};
      auto d = ParseIsoDate(trimmed);
      if (!d) return std::string("expected an ISO-8601 date (YYYY-MM-DD) or 'today'");
      return Value{*d};
    }
    case ParamKind::kTime: {
      auto t = ParseTime(trimmed);
      if (!t) return std::string("expected a time such as 14:30 or 2pm");
      return Value{*t};
    }
    case ParamKind::kEnum: {
      const std::string lowered = text::ToLower(trimmed);
      for (const auto& allowed : spec.enum_values) {
        if (text::ToLower(allowed) == lowered) return Value{allowed};
      }
      return std::string("not one of the allowed values");
    }
    case ParamKind::kString:
    case ParamKind::kLocation:
      if (trimmed.empty()) return std::string("empty value");
      return Value{trimmed};
  }
  return std::string("unsupported kind");
}

json NumberJson(double v) {
  if (std::trunc(v) == v && std::fabs(v) < kMaxExactInteger) return static_cast<std::int64_t>(v);
  return v;
}

std::string FormatNumber(double v) { return NumberJson(v).dump(); }

}  // namespace

std::variant<BoundArgs, BindingFailure> BindParams(const Label& label, const ApiFunction& function,
                                                   const ParamMap& extracted, const Clock& clock) {
  BoundArgs bound{label, {}};
  for (const auto& spec : function.params) {
    auto it = extracted.find(spec.name);
    if (it == extracted.end() || text::Trim(it->second).empty()) {
      if (spec.required) return BindingFailure{ExecStatus::kMissingParam, spec.name, {}};
      continue;
    }
    auto parsed = ParseValue(spec, it->second, clock);
    if (auto* err = std::get_if<std::string>(&parsed)) {
      return BindingFailure{ExecStatus::kBadParam, spec.name, *err};
    }
    bound.values.emplace(spec.name, std::get<Value>(std::move(parsed)));
  }
  return bound;
}

std::variant<double, CalcError> EvalCalculator(std::string_view function, const BoundArgs& args) {
  auto finite = [](double r) -> std::variant<double, CalcError> {
    if (std::isnan(r)) return CalcError{"result is not a real number"};
    if (!std::isfinite(r)) return CalcError{"result is out of range"};
    return r;
  };
  try {
    if (function == "add") return finite(args.Number("a") + args.Number("b"));
    if (function == "subtract") return finite(args.Number("a") - args.Number("b"));
    if (function == "multiply") return finite(args.Number("a") * args.Number("b"));
    if (function == "divide") {
      const double b = args.Number("b");
      if (b == 0.0) return CalcError{"division by zero"};
      return finite(args.Number("a") / b);
    }
    if (function == "power") return finite(std::pow(args.Number("a"), args.Number("b")));
    if (function == "log") {
      const double x = args.Number("x");
      if (x <= 0.0) return CalcError{"logarithm of a non-positive number"};
      if (!args.Has("base")) return finite(std::log(x));
      const double base = args.Number("base");
      if (base <= 0.0 || base == 1.0) return CalcError{"invalid logarithm base"};
      if (base == 2.0) return finite(std::log2(x));
      if (base == 10.0) return finite(std::log10(x));
      return finite(std::log(x) / std::log(base));
    }
    if (function == "factorial") {
      const double n = args.Number("n");
      if (n < 0.0) return CalcError{"factorial of a negative number"};
      if (std::trunc(n) != n) return CalcError{"factorial of a non-integer"};
      if (n > 20.0) return CalcError{"factorial argument exceeds 20"};
      std::uint64_t acc = 1;
      for (std::uint64_t k = 2; k <= static_cast<std::uint64_t>(n); ++k) acc *= k;
      return static_cast<double>(acc);
    }
    if (function == "sin") return finite(std::sin(args.Number("x")));
    if (function == "cos") return finite(std::cos(args.Number("x")));
    if (function == "tan") return finite(std::tan(args.Number("x")));
  } catch (const std::exception&) {
    return CalcError{"missing or mistyped argument"};
  }
  return CalcError{"unknown calculator function " + std::string(function)};
}

namespace {

struct Context {
  const BoundArgs& args;
  EntityStores& stores;
  const WeatherProvider& weather;
  const Clock& clock;

  std::string Opt(std::string_view name) const { return args.Has(name) ? args.Text(name) : std::string(); }
  Date DateOr(std::string_view name) const {
    return args.Has(name) ? std::get<Date>(args.Get(name)) : DateOf(clock.Now());
  }
};

using Handler = std::function<ExecutionResult(const Context&)>;

ExecutionResult NotFound(std::string_view what, const std::string& id) {
  return ExecutionResult::Fail(ExecStatus::kExecError, std::string(what) + " " + id + " not found");
}

json NoteJson(const std::string& id, const Note& n) {
  return {{"id", id}, {"title", n.title}, {"content", n.content}, {"created_at", n.created_at}};
}

json NotificationJson(const std::string& id, const Notification& n) {
  return {{"id", id}, {"recipient", n.recipient}, {"message", n.message}, {"read", n.read},
          {"created_at", n.created_at}};
}

std::string_view EmailStateName(EmailState s) {
  switch (s) {
    case EmailState::kDraft: return "draft";
    case EmailState::kSent: return "sent";
    case EmailState::kDeleted: return "deleted";
  }
  return "draft";
}

json EmailJson(const std::string& id, const Email& e) {
  json j = {{"id", id}, {"to", e.to}, {"subject", e.subject}, {"body", e.body},
            {"state", std::string(EmailStateName(e.state))}};
  if (!e.in_reply_to.empty()) j["in_reply_to"] = e.in_reply_to;
  return j;
}

json EventJson(const std::string& id, const Event& e) {
  json j = {{"id", id}, {"title", e.title}, {"date", FormatDate(e.date)}};
  j["time"] = e.time ? json(FormatTime(*e.time)) : json(nullptr);
  return j;
}

ExecutionResult Calculator(const Context& c) {
  auto r = EvalCalculator(c.args.label.function, c.args);
  if (auto* err = std::get_if<CalcError>(&r)) return ExecutionResult::Fail(ExecStatus::kExecError, err->message);
  const double v = std::get<double>(r);
  return ExecutionResult::Ok(NumberJson(v), FormatNumber(v));
}

ExecutionResult WeatherToday(const Context& c) {
  const std::string& location = c.args.Text("location");
  auto rec = c.weather.Lookup(location, c.DateOr("date"));
  if (!rec) return ExecutionResult::Fail(ExecStatus::kExecError, "unknown location " + location);
  std::string msg = rec->location + " on " + FormatDate(rec->date) + ": " + rec->summary + ", " +
                    FormatNumber(rec->temp_c) + " C";
  return ExecutionResult::Ok(rec->ToJson(), std::move(msg));
}

ExecutionResult WeatherWeekly(const Context& c) {
  const std::string& location = c.args.Text("location");
  const Date start = c.DateOr("date");
  json days = json::array();
  std::string name;
  for (int i = 0; i < 7; ++i) {
    const Date d{std::chrono::sys_days{start} + std::chrono::days{i}};
    auto rec = c.weather.Lookup(location, d);
    if (!rec) return ExecutionResult::Fail(ExecStatus::kExecError, "unknown location " + location);
    name = rec->location;
    days.push_back({{"date", FormatDate(d)}, {"summary", rec->summary}, {"temp_c", rec->temp_c}});
  }
  return ExecutionResult::Ok({{"location", name}, {"start", FormatDate(start)}, {"days", std::move(days)}},
                             "7-day forecast for " + name + " from " + FormatDate(start));
}

std::string AqiCategory(int aqi) {
  if (aqi <= 50) return "good";
  if (aqi <= 100) return "moderate";
  if (aqi <= 150) return "unhealthy for sensitive groups";
  return "unhealthy";
}

ExecutionResult WeatherAir(const Context& c) {
  const std::string& location = c.args.Text("location");
  auto rec = c.weather.Lookup(location, c.DateOr("date"));
  if (!rec) return ExecutionResult::Fail(ExecStatus::kExecError, "unknown location " + location);
  return ExecutionResult::Ok(
      {{"location", rec->location}, {"date", FormatDate(rec->date)}, {"aqi", rec->aqi}, {"category", AqiCategory(rec->aqi)}},
      "air quality in " + rec->location + ": AQI " + std::to_string(rec->aqi) + " (" + AqiCategory(rec->aqi) + ")");
}

const std::unordered_map<std::string, Handler>& Handlers() {
  static const std::unordered_map<std::string, Handler> handlers = [] {
    std::unordered_map<std::string, Handler> h;
    for (const char* fn : {"add", "subtract", "multiply", "divide", "power", "log", "factorial", "sin", "cos", "tan"}) {
      h[std::string("calculator.") + fn] = Calculator;
    }
    h["weather.get_today_weather"] = WeatherToday;
    h["weather.get_weekly_forecast"] = WeatherWeekly;
    h["weather.get_air_pollution"] = WeatherAir;

    h["notes.create"] = [](const Context& c) {
      Note n{c.Opt("title"), c.args.Text("content"), FormatTimestamp(c.clock.Now())};
      const std::string id = c.stores.notes.Create(n);
      return ExecutionResult::Ok({{"id", id}}, "note " + id + " created");
    };
    h["notes.get_all_notes"] = [](const Context& c) {
      json list = json::array();
      for (const auto& [id, n] : c.stores.notes.List()) list.push_back(NoteJson(id, n));
      const std::size_t count = list.size();
      return ExecutionResult::Ok(std::move(list), std::to_string(count) + " note(s)");
    };
    h["notes.delete_note"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      if (!c.stores.notes.Erase(id)) return NotFound("note", id);
      return ExecutionResult::Ok({{"id", id}, {"deleted", true}}, "note " + id + " deleted");
    };
    h["notes.update_note"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      if (!c.args.Has("content") && !c.args.Has("title")) {
        return ExecutionResult::Fail(ExecStatus::kExecError, "nothing to update");
      }
      Note updated;
      auto err = c.stores.notes.Update(id, [&](Note& n) -> std::optional<std::string> {
        if (c.args.Has("content")) n.content = c.args.Text("content");
        if (c.args.Has("title")) n.title = c.args.Text("title");
        updated = n;
        return std::nullopt;
      });
      if (err) return NotFound("note", id);
      return ExecutionResult::Ok(NoteJson(id, updated), "note " + id + " updated");
    };

    h["notification.send_notification"] = [](const Context& c) {
      std::string recipient = c.Opt("recipient");
      if (recipient.empty()) recipient = "me";
      const std::string id = c.stores.notifications.Create(
          {recipient, c.args.Text("message"), false, FormatTimestamp(c.clock.Now())});
      return ExecutionResult::Ok({{"id", id}}, "notification " + id + " sent to " + recipient);
    };
    h["notification.view_notification"] = [](const Context& c) {
      if (c.args.Has("id")) {
        const std::string& id = c.args.Text("id");
        auto n = c.stores.notifications.Get(id);
        if (!n) return NotFound("notification", id);
        return ExecutionResult::Ok(NotificationJson(id, *n), n->message);
      }
      json list = json::array();
      for (const auto& [id, n] : c.stores.notifications.List()) list.push_back(NotificationJson(id, n));
      const std::size_t count = list.size();
      return ExecutionResult::Ok(std::move(list), std::to_string(count) + " notification(s)");
    };
    h["notification.mark_as_read"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      Notification updated;
      auto err = c.stores.notifications.Update(id, [&](Notification& n) -> std::optional<std::string> {
        n.read = true;
        updated = n;
        return std::nullopt;
      });
      if (err) return NotFound("notification", id);
      return ExecutionResult::Ok(NotificationJson(id, updated), "notification " + id + " marked as read");
    };
    h["notification.delete_notification"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      if (!c.stores.notifications.Erase(id)) return NotFound("notification", id);
      return ExecutionResult::Ok({{"id", id}, {"deleted", true}}, "notification " + id + " deleted");
    };

    h["email.compose_email"] = [](const Context& c) {
      const std::string id =
          c.stores.emails.Create({c.args.Text("to"), c.Opt("subject"), c.Opt("body"), EmailState::kDraft, {}});
      return ExecutionResult::Ok({{"id", id}, {"state", "draft"}}, "draft " + id + " created");
    };
    h["email.send_email"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      auto err = c.stores.emails.Update(id, [](Email& e) -> std::optional<std::string> {
        if (e.state == EmailState::kDeleted) return std::string("not found");
        if (e.state != EmailState::kDraft) return std::string("not a draft");
        e.state = EmailState::kSent;
        return std::nullopt;
      });
      if (err && *err == "not found") return NotFound("email", id);
      if (err) return ExecutionResult::Fail(ExecStatus::kExecError, "email " + id + " is " + *err);
      return ExecutionResult::Ok({{"id", id}, {"state", "sent"}}, "email " + id + " sent");
    };
    h["email.read_email"] = [](const Context& c) {
      if (c.args.Has("id")) {
        const std::string& id = c.args.Text("id");
        auto e = c.stores.emails.Get(id);
        if (!e || e->state == EmailState::kDeleted) return NotFound("email", id);
        return ExecutionResult::Ok(EmailJson(id, *e), e->subject.empty() ? "(no subject)" : e->subject);
      }
      json list = json::array();
      for (const auto& [id, e] : c.stores.emails.List()) {
        if (e.state != EmailState::kDeleted) list.push_back(EmailJson(id, e));
      }
      const std::size_t count = list.size();
      return ExecutionResult::Ok(std::move(list), std::to_string(count) + " email(s)");
    };
    h["email.reply_email"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      auto original = c.stores.emails.Get(id);
      if (!original || original->state == EmailState::kDeleted) return NotFound("email", id);
      Email reply{original->to, "Re: " + original->subject, c.Opt("body"), EmailState::kSent, id};
      const std::string reply_id = c.stores.emails.Create(std::move(reply));
      return ExecutionResult::Ok({{"id", reply_id}, {"in_reply_to", id}, {"state", "sent"}},
                                 "reply " + reply_id + " sent");
    };
    h["email.delete_email"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      auto err = c.stores.emails.Update(id, [](Email& e) -> std::optional<std::string> {
        if (e.state == EmailState::kDeleted) return std::string("not found");
        e.state = EmailState::kDeleted;
        return std::nullopt;
      });
      if (err) return NotFound("email", id);
      return ExecutionResult::Ok({{"id", id}, {"state", "deleted"}}, "email " + id + " deleted");
    };

    h["calendar.add_event"] = [](const Context& c) {
      Event e{c.args.Text("title"), std::get<Date>(c.args.Get("date")), std::nullopt};
      if (c.args.Has("time")) e.time = std::get<TimeOfDay>(c.args.Get("time"));
      const std::string id = c.stores.events.Create(e);
      return ExecutionResult::Ok({{"id", id}}, "event " + id + " added on " + FormatDate(e.date));
    };
    h["calendar.remove_event"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      if (!c.stores.events.Erase(id)) return NotFound("event", id);
      return ExecutionResult::Ok({{"id", id}, {"removed", true}}, "event " + id + " removed");
    };
    h["calendar.update_event"] = [](const Context& c) {
      const std::string& id = c.args.Text("id");
      if (!c.args.Has("title") && !c.args.Has("date") && !c.args.Has("time")) {
        return ExecutionResult::Fail(ExecStatus::kExecError, "nothing to update");
      }
      Event updated;
      auto err = c.stores.events.Update(id, [&](Event& e) -> std::optional<std::string> {
        if (c.args.Has("title")) e.title = c.args.Text("title");
        if (c.args.Has("date")) e.date = std::get<Date>(c.args.Get("date"));
        if (c.args.Has("time")) e.time = std::get<TimeOfDay>(c.args.Get("time"));
        updated = e;
        return std::nullopt;
      });
      if (err) return NotFound("event", id);
      return ExecutionResult::Ok(EventJson(id, updated), "event " + id + " updated");
    };
    h["calendar.view_event"] = [](const Context& c) {
      const bool filter = c.args.Has("date");
      const Date day = filter ? std::get<Date>(c.args.Get("date")) : Date{};
      json list = json::array();
      for (const auto& [id, e] : c.stores.events.List()) {
        if (!filter || e.date == day) list.push_back(EventJson(id, e));
      }
      const std::size_t count = list.size();
      return ExecutionResult::Ok(std::move(list), std::to_string(count) + " event(s)");
    };
    return h;
  }();
  return handlers;
}

}  // namespace

ExecutionResult ExecuteCall(const BoundArgs& bound, EntityStores& stores, const WeatherProvider& weather,
                            const Clock& clock) {
  if (IsInvalidLabel(bound.label)) return ExecutionResult::Fail(ExecStatus::kInvalidRoute, "no matching API route");
  auto it = Handlers().find(bound.label.ToString());
  if (it == Handlers().end()) {
    return ExecutionResult::Fail(ExecStatus::kExecError, "no executor for " + bound.label.ToString());
  }
  try {
    return it->second(Context{bound, stores, weather, clock});
  } catch (const std::bad_variant_access&) {
    return ExecutionResult::Fail(ExecStatus::kExecError, "argument has the wrong type");
  } catch (const std::out_of_range&) {
    return ExecutionResult::Fail(ExecStatus::kExecError, "missing argument");
  }
}

}  // namespace nlapi
