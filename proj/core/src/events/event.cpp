#include "playroom/events/event.hpp"

#include <algorithm>

namespace playroom::events {
namespace {

bool valid_segment_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool literal_segment(const std::string& seg) {
  if (seg.empty()) return false;
  return std::all_of(seg.begin(), seg.end(), valid_segment_char);
}

bool scalar_param(const nlohmann::ordered_json& v) {
  return v.is_number() || v.is_boolean() || v.is_string();
}

bool valid_params(const Params& params) {
  if (!params.is_object()) return false;
  for (const auto& [key, value] : params.items()) {
    (void)key;
    if (scalar_param(value)) continue;
    if (value.is_array()) {
      bool ok = std::all_of(value.begin(), value.end(),
                            [](const auto& item) { return scalar_param(item); });
      if (!ok) return false;
      continue;
    }
    return false;
  }
  return true;
}

}  // namespace

const char* to_string(EventClass c) {
  switch (c) {
    case EventClass::kSense:
      return "sense";
    case EventClass::kAction:
      return "action";
    case EventClass::kMonitor:
      return "monitor";
  }
  return "sense";
}

EventClass event_class_from_string(const std::string& s) {
  if (s == "sense") return EventClass::kSense;
  if (s == "action") return EventClass::kAction;
  if (s == "monitor") return EventClass::kMonitor;
  throw MalformedFrame("class", "unknown event class '" + s + "'");
}

bool Event::operator==(const Event& o) const {
  return cls == o.cls && name == o.name && params == o.params &&
         sender == o.sender && seq == o.seq && ts_ms == o.ts_ms;
}

std::vector<std::string> split_segments(const std::string& dotted) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : dotted) {
    if (c == '.') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool valid_event_name(const std::string& name) {
  if (name.empty()) return false;
  const auto segments = split_segments(name);
  return std::all_of(segments.begin(), segments.end(), literal_segment);
}

bool valid_pattern(const std::string& pattern) {
  if (pattern.empty()) return false;
  const auto segments = split_segments(pattern);
  for (size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (seg == "*") continue;
    if (seg == "**") {
      if (i + 1 != segments.size()) return false;  // only as last segment
      continue;
    }
    if (!literal_segment(seg)) return false;
  }
  return true;
}

void validate_event(const Event& e) {
  if (!valid_event_name(e.name))
    throw MalformedFrame("name", "'" + e.name + "' violates the name grammar");
  if (!valid_params(e.params))
    throw MalformedFrame("params",
                         "params must map strings to scalars or scalar lists");
  if (e.sender.empty()) throw MalformedFrame("sender", "sender is empty");
}

std::string encode_event(const Event& e, size_t max_frame_bytes) {
  validate_event(e);
  nlohmann::ordered_json j;
  j["class"] = to_string(e.cls);
  j["name"] = e.name;
  j["params"] = e.params;
  j["sender"] = e.sender;
  j["seq"] = e.seq;
  j["ts"] = e.ts_ms;
  std::string line = j.dump();
  line.push_back('\n');
  if (line.size() > max_frame_bytes)
    throw OversizeEvent(line.size(), max_frame_bytes);
  return line;
}

Event decode_event(const std::string& line) {
  std::string body = line;
  while (!body.empty() && (body.back() == '\n' || body.back() == '\r'))
    body.pop_back();
  if (body.find('\n') != std::string::npos)
    throw MalformedFrame("frame", "interior newline");

  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(body);
  } catch (const nlohmann::json::parse_error& ex) {
    throw MalformedFrame("json", ex.what());
  }
  if (!j.is_object()) throw MalformedFrame("json", "frame is not a JSON object");

  static const char* kRequired[] = {"class", "name", "params",
                                    "sender", "seq",  "ts"};
  for (const char* key : kRequired) {
    if (!j.contains(key))
      throw MalformedFrame(key, "missing key");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const bool known =
        std::any_of(std::begin(kRequired), std::end(kRequired),
                    [&](const char* k) { return key == k; });
    if (!known) throw MalformedFrame(key, "unexpected key");
  }

  Event e;
  if (!j["class"].is_string()) throw MalformedFrame("class", "must be a string");
  e.cls = event_class_from_string(j["class"].get<std::string>());
  if (!j["name"].is_string()) throw MalformedFrame("name", "must be a string");
  e.name = j["name"].get<std::string>();
  if (!j["params"].is_object())
    throw MalformedFrame("params", "must be an object");
  e.params = j["params"];
  if (!j["sender"].is_string())
    throw MalformedFrame("sender", "must be a string");
  e.sender = j["sender"].get<std::string>();
  if (!j["seq"].is_number_integer())
    throw MalformedFrame("seq", "must be an integer");
  e.seq = j["seq"].get<int64_t>();
  if (!j["ts"].is_number_integer())
    throw MalformedFrame("ts", "must be an integer");
  e.ts_ms = j["ts"].get<int64_t>();

  validate_event(e);
  return e;
}

bool match_pattern(const std::string& pattern, const std::string& name,
                   bool validate) {
  if (validate) {
    if (!valid_pattern(pattern)) throw BadPattern(pattern);
    if (!valid_event_name(name))
      throw MalformedFrame("name", "'" + name + "' violates the name grammar");
  }
  const auto pat = split_segments(pattern);
  const auto seg = split_segments(name);
  size_t i = 0;
  for (; i < pat.size(); ++i) {
    if (pat[i] == "**") return true;  // matches zero or more trailing segments
    if (i >= seg.size()) return false;
    if (pat[i] == "*") continue;
    if (pat[i] != seg[i]) return false;
  }
  return i == seg.size();
}

bool match_pattern(const std::string& pattern, const std::string& name) {
  return match_pattern(pattern, name, true);
}

std::vector<std::string> broker_route(const Event& event,
                                      const std::vector<Subscription>& subs) {
  std::vector<std::string> recipients;
  for (const auto& sub : subs) {
    if (sub.client == event.sender) continue;
    if (!match_pattern(sub.pattern, event.name, false)) continue;
    if (std::find(recipients.begin(), recipients.end(), sub.client) ==
        recipients.end())
      recipients.push_back(sub.client);
  }
  return recipients;
}

}  // namespace playroom::events
