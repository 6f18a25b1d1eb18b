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
#include "template_grammar.hpp"

#include <limits>
#include <unordered_set>

#include "error.hpp"
#include "text.hpp"

namespace nlapi {

std::uint64_t Rng::Below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;  // largest multiple of n, minus one
  std::uint64_t v;
  do {
    v = engine_();
  } while (v > limit);
  return v % n;
}

namespace {

const std::vector<std::string> kPrefixes = {"", "", "", "please ", "hey, ", "ok, ", "quick question: "};
const std::vector<std::string> kSuffixes = {"", "", "", " please", " thanks", "?", " for me"};

using FrameTable = std::map<std::string, std::vector<std::string>>;

FrameTable BuildFrames() {
  return {
      {"calculator.add",
       {"add {a} and {b}", "what is {a} plus {b}", "{a} + {b}", "sum of {a} and {b}", "add {a} to {b}",
        "[compute|calculate|find] the total of {a} and {b}"}},
      {"calculator.subtract",
       {"subtract {b} from {a}", "what is {a} minus {b}", "{a} - {b}", "difference between {a} and {b}",
        "take {b} away from {a}", "[compute|calculate] {a} minus {b}"}},
      {"calculator.multiply",
       {"multiply {a} by {b}", "what is {a} times {b}", "{a} * {b}", "product of {a} and {b}",
        "{a} multiplied by {b}", "{a} x {b}"}},
      {"calculator.divide",
       {"divide {a} by {nz}", "what is {a} divided by {nz}", "{a} / {nz}", "quotient of {a} and {nz}",
        "{a} over {nz}", "[compute|calculate] {a} divided by {nz}"}},
      {"calculator.power",
       {"{a} to the power of {small}", "{a} ^ {small}", "what is {a} raised to {small}", "exponentiate {a} by {small}",
        "{a} raised to the power of {small}", "{a}**{small}"}},
      {"calculator.log",
       {"log of {pos}", "natural log of {pos}", "log base {base} of {pos}", "logarithm of {pos} base {base}",
        "what is the log of {pos} in base {base}", "[compute|calculate] the logarithm of {pos}"}},
      {"calculator.factorial",
       {"factorial of {n}", "what is {n} factorial", "[compute|calculate] the factorial of {n}",
        "factorial {n}", "find the factorial for {n}", "{n} factorial [now|]"}},
      {"calculator.sin",
       {"sin {x}", "sine of {x}", "what is the sine of {x} radians", "sin({x})", "[compute|calculate] sin of {x}"}},
      {"calculator.cos",
       {"cos {x}", "cosine of {x}", "what is the cosine of {x} radians", "cos({x})", "[compute|calculate] cos of {x}"}},
      {"calculator.tan",
       {"tan {x}", "tangent of {x}", "what is the tangent of {x} radians", "tan({x})", "[compute|calculate] tan of {x}"}},

      {"weather.get_today_weather",
       {"what's the weather in {city}", "weather for {city} on {date}", "what's the temperature in {city} today",
        "is it raining in {city}", "how hot is it in {city}", "will it be sunny in {city} today",
        "how cold is it in {city} right now", "[tell me|give me] the weather in {city}"}},
      {"weather.get_weekly_forecast",
       {"what's the forecast for {city}", "weekly forecast for {city} starting {date}",
        "show me the 7-day forecast in {city}", "what does this week look like in {city}",
        "weather in {city} this week", "next 7 days of weather for {city}"}},
      {"weather.get_air_pollution",
       {"what's the air quality in {city}", "air pollution levels for {city} on {date}", "is there smog in {city}",
        "aqi for {city}", "is the air clean in {city}", "in {city}, what's the air quality like"}},

      {"notes.create",
       {"create a note saying \"{content}\"", "make a new note: \"{content}\"", "jot down \"{content}\"",
        "save a note titled {note_title} that says \"{content}\"", "add a note \"{content}\"",
        "write a note that says {content}"}},
      {"notes.get_all_notes",
       {"[show|list|display] [all|every one] of my notes", "[show|list|display|get] all my notes",
        "[read|view|see] all [the|my] notes", "what notes do I have[ saved| stored|]",
        "[show|list] every note [I have|I wrote|I saved]", "let me see all of my notes[ right now| again|]"}},
      {"notes.delete_note",
       {"delete note {id}", "remove note #{id}", "erase note number {id}", "trash the note with id {id}",
        "get rid of note {id}", "note {id}, please [delete|remove|erase] it"}},
      {"notes.update_note",
       {"update note {id} to say \"{content}\"", "edit note #{id}", "change note number {id} to \"{content}\"",
        "modify note {id}: \"{content}\"", "rewrite note {id} as \"{content}\"", "note {id} needs an edit"}},

      {"notification.send_notification",
       {"send a notification to {person} saying \"{message}\"", "push a notification to {person}: \"{message}\"",
        "send {person} a notification that says \"{message}\"", "notify {person} that {message}",
        "alert {person} \"{message}\""}},
      {"notification.view_notification",
       {"view notification {id}", "show notification #{id}", "open notification number {id}",
        "[check|show|list] my notifications", "any new notifications", "display [all|the latest|unread] notifications",
        "read notification {id}"}},
      {"notification.mark_as_read",
       {"mark notification {id} as read", "flag notification #{id} as seen", "set notification {id} to read",
        "mark as read notification {id}", "I've read notification {id}", "mark notification number {id} as seen"}},
      {"notification.delete_notification",
       {"delete notification {id}", "dismiss notification #{id}", "clear notification number {id}",
        "remove notification {id}", "get rid of notification {id}", "notification {id}: [delete|remove|dismiss] it"}},

      {"email.compose_email",
       {"compose an email to {to} about \"{subject}\"", "draft an email for {to} saying \"{body}\"",
        "write an email to {to}", "start a new email to {to} about \"{subject}\"",
        "prepare an email to {to} saying \"{body}\"", "create an email for {to}"}},
      {"email.send_email",
       {"send email {id}", "send email draft {id}", "dispatch email #{id}", "send draft {id}",
        "send out email number {id}", "go ahead and send email {id}"}},
      {"email.read_email",
       {"read email {id}", "open email #{id}", "show me email number {id}", "what does email {id} say",
        "[check|open|view] my inbox", "[read|show] my [new|unread|latest] emails"}},
      {"email.reply_email",
       {"reply to email {id} saying \"{body}\"", "respond to email #{id}", "write back to email number {id} with \"{body}\"",
        "answer email {id}", "email {id} needs a reply"}},
      {"email.delete_email",
       {"delete email {id}", "trash email #{id}", "get rid of email number {id}", "remove the email with id {id}",
        "erase email {id}", "discard email {id}"}},

      {"calendar.add_event",
       {"add an event \"{title}\" on {date}", "schedule a meeting called \"{title}\" for {date} at {time}",
        "book an appointment \"{title}\" on {date} at {time}", "put \"{title}\" on my calendar for {date}",
        "set up a meeting called \"{title}\" on {date}", "create a new event \"{title}\" for {date} at {time}"}},
      {"calendar.remove_event",
       {"cancel event {id}", "remove meeting #{id}", "delete appointment number {id}", "drop the event with id {id}",
        "take meeting {id} off my calendar", "event {id} is cancelled"}},
      {"calendar.update_event",
       {"move event {id} to {date}", "reschedule meeting #{id} to {date} at {time}",
        "change appointment number {id} to {time}", "rename event {id} to \"{title}\"", "push meeting {id} to {date}",
        "update event {id}"}},
      {"calendar.view_event",
       {"what's on my calendar for {date}", "show my events on {date}", "list all meetings for {date}",
        "any appointments on {date}", "view my calendar", "check my schedule for {date}", "display events for {date}"}},

      {"routes_not_exist.return_invalid_error",
       {"book a flight to {city}", "order a [large|small|medium] pizza with {topping}",
        "turn [off|on] the lights in the {room}", "translate \"{phrase}\" into {language}",
        "who won the {sport} game last night", "what is the meaning of {word}", "sing me a song about {thing}",
        "tell me a joke about {thing}", "play some {genre} music"}},
  };
}

std::map<std::string, std::vector<std::string>> BuildLists() {
  return {
      {"city",
       {"Boston", "Paris", "London", "Tokyo", "New York", "San Francisco", "Chicago", "Seattle", "Berlin", "Madrid",
        "Rome", "Sydney", "Toronto", "Mumbai", "Singapore", "Dubai", "Los Angeles", "Hong Kong", "Cairo", "Lima"}},
      {"title",
       {"team sync", "dentist", "lunch with sam", "project review", "yoga class", "book club", "dinner with family",
        "quarterly planning", "haircut", "doctor visit", "coffee with alex", "piano lesson", "standup", "board review",
        "soccer practice", "code review"}},
      {"content",
       {"buy milk", "call the plumber", "pick up dry cleaning", "renew passport", "water the plants",
        "finish the report", "feed the cat", "pay the electric bill", "return library books",
        "try the new ramen place", "ideas for the garden", "gym bag by the door", "birthday gift for mom",
        "fix the leaky faucet", "order printer ink", "clean the fridge", "back up the laptop", "buy dog food"}},
      {"note_title",
       {"groceries", "errands", "ideas", "home", "work", "shopping", "todo", "reminders"}},
      {"person", {"alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi", "ivan", "judy", "mallory", "oscar"}},
      {"to",
       {"alice", "bob", "carol", "dave", "erin", "frank", "alice@example.com", "bob@example.org", "team@example.com",
        "grace", "heidi@example.net", "ivan"}},
      {"subject",
       {"quarterly report", "lunch plans", "invoice question", "weekend trip", "budget review", "new hire onboarding",
        "travel receipts", "holiday party", "contract renewal", "office move"}},
      {"body",
       {"thanks for the help", "see you soon", "sounds good to me", "let's talk tomorrow", "i will be late",
        "please find it attached", "congrats on the launch", "can we push this back", "got it, thanks",
        "happy to help"}},
      {"message",
       {"dinner is ready", "the package arrived", "i am running late", "the build finished", "call me back",
        "the door is unlocked", "laundry is done", "pick up the kids", "the oven is preheated", "time to leave",
        "your ride is here", "the download completed"}},
      {"topping", {"extra cheese", "mushrooms", "pepperoni", "olives", "pineapple", "onions"}},
      {"room", {"kitchen", "bedroom", "garage", "living room", "hallway", "office", "basement"}},
      {"phrase", {"good morning", "thank you", "where is the station", "how much is this", "nice to meet you"}},
      {"language", {"french", "spanish", "german", "japanese", "italian", "portuguese"}},
      {"sport", {"football", "basketball", "baseball", "hockey", "cricket", "tennis"}},
      {"word", {"life", "serendipity", "ubiquitous", "ephemeral", "love", "irony", "nostalgia"}},
      {"thing", {"cats", "dogs", "pirates", "space", "robots", "the ocean", "dinosaurs", "coffee", "trains"}},
      {"genre", {"jazz", "blues", "rock", "classical", "lo-fi", "country", "reggae"}},
  };
}

std::string Decimal(Rng& rng, std::uint64_t whole_below) {
  std::string s = std::to_string(rng.Below(whole_below));
  if (rng.Below(10) < 3) s += "." + std::to_string(1 + rng.Below(9));
  return s;
}

}  // namespace

TemplateGrammar::TemplateGrammar() : frames_(BuildFrames()), lists_(BuildLists()) {}

const TemplateGrammar& TemplateGrammar::Default() {
  static const TemplateGrammar grammar;
  return grammar;
}

const std::vector<std::string>& TemplateGrammar::Frames(const Label& label) const {
  auto it = frames_.find(label.ToString());
  if (it == frames_.end()) throw Error(ErrorCode::kInvalidArgument, "template grammar has no frames for " + label.ToString());
  return it->second;
}

std::string TemplateGrammar::Slot(std::string_view name, Rng& rng) const {
  if (name == "a" || name == "b" || name == "x") return Decimal(rng, 1000);
  if (name == "nz") return std::to_string(1 + rng.Below(99));
  if (name == "pos") return std::to_string(1 + rng.Below(9999));
  if (name == "small") return std::to_string(rng.Below(13));
  if (name == "base") return std::to_string(2 + rng.Below(15));
  if (name == "n") return std::to_string(rng.Below(21));
  if (name == "id") return std::to_string(1 + rng.Below(60));
  if (name == "date") {
    if (rng.Below(5) == 0) return "today";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", static_cast<int>(2024 + rng.Below(2)),
                  static_cast<int>(1 + rng.Below(12)), static_cast<int>(1 + rng.Below(28)));
    return buf;
  }
  if (name == "time") {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%d:%02d", static_cast<int>(7 + rng.Below(13)),
                  static_cast<int>(15 * rng.Below(4)));
    return buf;
  }
  auto it = lists_.find(std::string(name));
  if (it == lists_.end()) throw Error(ErrorCode::kInternal, "unknown template slot {" + std::string(name) + "}");
  return rng.Pick(it->second);
}

std::string TemplateGrammar::Expand(std::string_view frame, Rng& rng) const {
  std::string out;
  std::size_t i = 0;
  while (i < frame.size()) {
    const char c = frame[i];
    if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      const std::size_t end = frame.find(close, i);
      if (end == std::string_view::npos) throw Error(ErrorCode::kInternal, "unterminated template frame");
      std::string_view body = frame.substr(i + 1, end - i - 1);
      if (c == '{') {
        out += Slot(body, rng);
      } else {
        std::vector<std::string_view> options;
        std::size_t start = 0;
        for (std::size_t bar = body.find('|'); bar != std::string_view::npos; bar = body.find('|', start)) {
          options.push_back(body.substr(start, bar - start));
          start = bar + 1;
        }
        options.push_back(body.substr(start));
        out += options[static_cast<std::size_t>(rng.Below(options.size()))];
      }
      i = end + 1;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

std::string TemplateGrammar::Sample(const Label& label, Rng& rng) const {
  const auto& frames = Frames(label);
  std::string body = Expand(rng.Pick(frames), rng);
  const std::string& prefix = rng.Pick(kPrefixes);
  const std::string& suffix = rng.Pick(kSuffixes);
  return text::CollapseWhitespace(prefix + body + suffix);
}

std::vector<std::string> TemplateGrammar::Generate(const Label& label, std::size_t n, std::uint64_t seed) const {
  Frames(label);
  Rng rng(LabelSeed(seed, label));
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  const std::size_t max_attempts = 200 * n + 1000;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < n; ++attempt) {
    std::string q = Sample(label, rng);
    if (seen.insert(text::NormalizeQuery(q)).second) out.push_back(std::move(q));
  }
  return out;
}

std::uint64_t TemplateGrammar::LabelSeed(std::uint64_t seed, const Label& label) {
  return seed ^ text::Fnv1a64(label.ToString());
}

}  // namespace nlapi
