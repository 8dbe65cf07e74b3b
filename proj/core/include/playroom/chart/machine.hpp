#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "playroom/chart/ast.hpp"
#include "playroom/events/event.hpp"

namespace playroom::chart {

struct PendingTimer {
  std::string owner;  // state whose declaration the timer belongs to
  int64_t deadline_ms = 0;
  int64_t duration_ms = 0;
};

// Running configuration of one statechart. Copyable value type; step() and
// friends return a new machine, the input is never mutated.
struct MachineState {
  std::vector<std::string> config;  // active states, root to leaf
  std::map<std::string, Value> store;
  std::map<std::string, std::map<std::string, Value>> bindings;  // per state
  std::map<std::string, PendingTimer> timers;
  int64_t now_ms = 0;

  struct Frame {
    std::string caller;
    std::string callee;
    std::vector<std::string> resume_config;
    // Effects that were pending when the call suspended; they resume after
    // the callee returns.
    std::vector<std::pair<std::string, Effect>> remaining;
  };
  std::vector<Frame> call_stack;

  static constexpr size_t kMaxCallDepth = 64;
};

struct StepResult {
  MachineState machine;
  std::vector<events::Event> emitted;
  bool transitioned = false;
};

class StackOverflow : public Error {
 public:
  explicit StackOverflow(size_t depth)
      : Error("call stack overflow at depth " + std::to_string(depth)) {}
};

class UnboundParam : public Error {
 public:
  UnboundParam(const std::string& callee, const std::string& param)
      : Error("call to '" + callee + "' leaves '" + param + "' unbound") {}
};

class UnknownTimer : public Error {
 public:
  explicit UnknownTimer(const std::string& name)
      : Error("timer '" + name + "' is not pending") {}
};

// Enters the initial configuration and runs its entry effects.
StepResult init_machine(const StatechartDoc& doc);

// Processes one event. Exactly one enabled transition fires (innermost
// active state first, document order within a state); when none is enabled
// the event is consumed and `transitioned` is false.
StepResult step(const MachineState& machine, const StatechartDoc& doc,
                const events::Event& event);

// Calls a state as a function, as the `call` effect does from the DSL.
StepResult call_action_state(const MachineState& machine,
                             const StatechartDoc& doc,
                             const std::string& callee,
                             const std::map<std::string, Value>& args);

// Fires the transition guarded by `timer`. The timer must be pending.
StepResult handle_timeout(const MachineState& machine,
                          const StatechartDoc& doc, const std::string& timer);

// Pending timers with deadline <= now, ordered by (deadline, name).
std::vector<std::pair<std::string, int64_t>> due_timers(
    const MachineState& machine, int64_t now_ms);

// Variable/parameter lookup as guards see it: innermost binding wins, then
// the global store, then nil.
Value lookup_value(const MachineState& machine, const std::string& name);

}  // namespace playroom::chart
