#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "playroom/common/error.hpp"

namespace playroom::events {

using Params = nlohmann::ordered_json;

enum class EventClass { kSense, kAction, kMonitor };

const char* to_string(EventClass c);
EventClass event_class_from_string(const std::string& s);

// One message on the bus. `params` is an ordered JSON object whose values are
// scalars, strings, or flat lists of those; `seq` must increase strictly per
// sender within a connection.
struct Event {
  EventClass cls = EventClass::kSense;
  std::string name;
  Params params = Params::object();
  std::string sender;
  int64_t seq = 0;
  int64_t ts_ms = 0;

  bool operator==(const Event& o) const;
};

struct Subscription {
  std::string client;
  std::string pattern;
};

struct BrokerConfig {
  std::string bind_address = "127.0.0.1";
  uint16_t port = 1932;
  size_t max_frame_bytes = 65536;  // must stay >= 1024
  int idle_timeout_s = 0;          // 0 disables the idle check
};

class MalformedFrame : public Error {
 public:
  MalformedFrame(std::string key, const std::string& reason)
      : Error("malformed frame (" + key + "): " + reason), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class OversizeEvent : public Error {
 public:
  OversizeEvent(size_t size, size_t limit)
      : Error("encoded event is " + std::to_string(size) +
              " bytes, limit is " + std::to_string(limit)) {}
};

class BadPattern : public Error {
 public:
  explicit BadPattern(const std::string& pattern)
      : Error("invalid subscription pattern: " + pattern) {}
};

// Dotted lowercase identifier: [a-z0-9_]+(\.[a-z0-9_]+)*
bool valid_event_name(const std::string& name);

// Segments are literals or `*` (one segment); `**` may appear only as the
// final segment and matches zero or more trailing segments.
bool valid_pattern(const std::string& pattern);

// Throws on malformed params; used by encode/decode and the broker ingress.
void validate_event(const Event& e);

// One UTF-8 JSON line with keys exactly {class,name,params,sender,seq,ts},
// '\n'-terminated. Throws OversizeEvent when the line exceeds the limit.
std::string encode_event(const Event& e, size_t max_frame_bytes = 65536);

// Inverse of encode_event; revalidates all Event invariants.
Event decode_event(const std::string& line);

// Glob match of a valid event name against a valid pattern.
bool match_pattern(const std::string& pattern, const std::string& name);
bool match_pattern(const std::string& pattern, const std::string& name,
                   bool validate);

// Recipients of `event`: every subscribed client with at least one matching
// pattern, deduplicated, in first-subscription order, excluding the sender.
std::vector<std::string> broker_route(const Event& event,
                                      const std::vector<Subscription>& subs);

std::vector<std::string> split_segments(const std::string& dotted);

}  // namespace playroom::events
