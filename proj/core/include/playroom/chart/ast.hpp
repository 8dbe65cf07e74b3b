#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "playroom/chart/expr.hpp"

namespace playroom::chart {

struct Param {
  std::string name;
  std::optional<Value> default_value;
};

struct Effect {
  enum class Kind { kEmit, kSet, kStartTimer, kCall, kReturn };
  Kind kind = Kind::kReturn;
  std::string name;  // event name / variable / timer / call target
  std::vector<std::pair<std::string, ExprPtr>> args;  // emit and call
  ExprPtr value;                                      // set
};

struct Transition {
  std::string trigger;  // event pattern; timers use monitor.timer.<name>
  bool on_timeout = false;
  std::string timer_name;  // when on_timeout
  ExprPtr guard;           // may be null (always enabled)
  std::string target;      // state id, or "return"
  int line = 0;
};

struct TimerDecl {
  std::string name;
  int64_t duration_ms = 0;
};

struct StateNode {
  std::string id;
  std::string parent;  // empty at top level
  std::vector<Param> params;
  std::vector<TimerDecl> timers;
  std::vector<Effect> entry;
  std::vector<Effect> exit;
  std::vector<Transition> transitions;
  std::vector<std::string> children;  // document order
  std::string initial_child;          // empty means first child

  // Action states mediate between the dialog flow and a robot: calling one
  // emits `action_event` with the bound arguments (`robot` required) and
  // control returns to the caller on `done_event`.
  bool is_action = false;
  std::string action_event;
  std::string done_event;
};

struct StatechartDoc {
  std::vector<std::pair<std::string, Value>> globals;  // declaration order
  std::string initial;
  std::vector<std::string> order;  // all state ids in document order
  std::vector<std::string> roots;  // top-level ids in document order
  std::map<std::string, StateNode> states;

  const StateNode& state(const std::string& id) const;
  bool has_state(const std::string& id) const { return states.count(id) > 0; }
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error("parse error at line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& reason)
      : Error("invalid statechart: " + reason) {}
};

}  // namespace playroom::chart
