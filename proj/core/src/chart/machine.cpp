#include "playroom/chart/machine.hpp"

#include <algorithm>

namespace playroom::chart {
namespace {

using events::Event;
using events::EventClass;

std::vector<std::string> root_path(const StatechartDoc& doc,
                                   const std::string& id) {
  std::vector<std::string> path;
  std::string cur = id;
  while (!cur.empty()) {
    path.push_back(cur);
    cur = doc.state(cur).parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Root path of `id`, extended to a leaf through initial children.
std::vector<std::string> enter_chain(const StatechartDoc& doc,
                                     const std::string& id) {
  std::vector<std::string> chain = root_path(doc, id);
  std::string cur = id;
  while (true) {
    const StateNode& s = doc.state(cur);
    if (s.children.empty()) break;
    cur = s.initial_child.empty() ? s.children.front() : s.initial_child;
    chain.push_back(cur);
  }
  return chain;
}

EventClass class_from_name(const std::string& name) {
  const std::string first = name.substr(0, name.find('.'));
  if (first == "action") return EventClass::kAction;
  if (first == "monitor") return EventClass::kMonitor;
  return EventClass::kSense;
}

EvalContext make_context(const MachineState& m, const Event* event) {
  EvalContext ctx;
  ctx.lookup = [&m](const std::string& name) { return lookup_value(m, name); };
  ctx.event_param = [event](const std::string& key) -> Value {
    if (!event) return {};
    auto it = event->params.find(key);
    if (it == event->params.end()) return {};
    return value_from_json(*it);
  };
  return ctx;
}

class Interpreter {
 public:
  Interpreter(MachineState machine, const StatechartDoc& doc,
              const Event* event)
      : m_(std::move(machine)), doc_(doc), event_(event) {}

  MachineState take_machine() { return std::move(m_); }
  std::vector<Event>& emitted() { return emitted_; }

  void enter_initial() {
    for (const auto& [name, v] : doc_.globals) m_.store[name] = v;
    const auto chain = enter_chain(doc_, doc_.initial);
    m_.config = chain;
    std::vector<std::pair<std::string, Effect>> pending;
    for (const auto& id : chain) {
      bind_defaults(id);
      for (const auto& e : doc_.state(id).entry) pending.emplace_back(id, e);
    }
    run(std::move(pending));
  }

  // Fires `t` from active state `source`.
  void fire(const std::string& source, const Transition& t) {
    (void)source;
    if (t.target == "return") {
      do_return();
      return;
    }

    const auto old_config = m_.config;
    const auto chain = enter_chain(doc_, t.target);

    // External transition semantics: a target inside the active path exits
    // and re-enters itself.
    size_t common = 0;
    const auto self_at = std::find(old_config.begin(), old_config.end(), t.target);
    if (self_at != old_config.end()) {
      common = static_cast<size_t>(self_at - old_config.begin());
    } else {
      while (common < old_config.size() && common < chain.size() &&
             old_config[common] == chain[common])
        ++common;
    }

    std::vector<std::pair<std::string, Effect>> pending;
    for (size_t i = old_config.size(); i > common; --i) {
      const std::string& id = old_config[i - 1];
      leave_state(id);
      for (const auto& e : doc_.state(id).exit) pending.emplace_back(id, e);
    }
    m_.config = chain;
    for (size_t i = common; i < chain.size(); ++i) {
      bind_defaults(chain[i]);
      for (const auto& e : doc_.state(chain[i]).entry)
        pending.emplace_back(chain[i], e);
    }
    run(std::move(pending));
  }

  // Programmatic call (the `call` effect goes through the same path).
  void call(const std::string& caller, const std::string& callee_id,
            std::map<std::string, Value> args,
            std::vector<std::pair<std::string, Effect>> remaining) {
    if (m_.call_stack.size() >= MachineState::kMaxCallDepth)
      throw StackOverflow(m_.call_stack.size() + 1);
    const StateNode& callee = doc_.state(callee_id);

    std::map<std::string, Value> bound;
    for (const auto& p : callee.params) {
      auto it = args.find(p.name);
      if (it != args.end() && !is_nil(it->second)) {
        bound[p.name] = it->second;
        args.erase(it);
      } else if (p.default_value) {
        bound[p.name] = *p.default_value;
        if (it != args.end()) args.erase(it);
      } else {
        throw UnboundParam(callee_id, p.name);
      }
    }
    if (!args.empty()) throw UnboundParam(callee_id, "unknown: " + args.begin()->first);

    MachineState::Frame frame;
    frame.caller = caller;
    frame.callee = callee_id;
    frame.resume_config = m_.config;
    frame.remaining = std::move(remaining);
    m_.call_stack.push_back(std::move(frame));

    if (callee.is_action) {
      m_.config = {callee_id};
      m_.bindings[callee_id] = bound;
      Event action;
      action.cls = class_from_name(callee.action_event);
      action.name = callee.action_event;
      action.sender = "dialog";
      action.ts_ms = m_.now_ms;
      for (const auto& p : callee.params) {
        const Value& v = bound.at(p.name);
        if (!is_nil(v)) action.params[p.name] = value_to_json(v);
      }
      emitted_.push_back(std::move(action));
      return;  // suspended until the done event arrives
    }

    const auto chain = enter_chain(doc_, callee_id);
    m_.config = chain;
    std::vector<std::pair<std::string, Effect>> pending;
    for (const auto& id : chain) {
      bind_defaults(id);
      if (id == callee_id) {
        for (const auto& [k, v] : bound) m_.bindings[id][k] = v;
      }
      for (const auto& e : doc_.state(id).entry) pending.emplace_back(id, e);
    }
    run(std::move(pending));
  }

 private:
  void bind_defaults(const std::string& id) {
    const StateNode& s = doc_.state(id);
    auto& b = m_.bindings[id];
    for (const auto& p : s.params)
      if (p.default_value && !b.count(p.name)) b[p.name] = *p.default_value;
  }

  void leave_state(const std::string& id) {
    m_.bindings.erase(id);
    std::erase_if(m_.timers,
                  [&](const auto& kv) { return kv.second.owner == id; });
  }

  // Executes pending effects in order; a `call` suspends the tail into the
  // new stack frame.
  void run(std::vector<std::pair<std::string, Effect>> pending) {
    for (size_t i = 0; i < pending.size(); ++i) {
      const auto& [owner, effect] = pending[i];
      switch (effect.kind) {
        case Effect::Kind::kEmit:
          do_emit(effect);
          break;
        case Effect::Kind::kSet:
          m_.store[effect.name] = eval(*effect.value, make_context(m_, event_));
          break;
        case Effect::Kind::kStartTimer:
          start_timer(owner, effect.name);
          break;
        case Effect::Kind::kCall: {
          std::map<std::string, Value> args;
          const auto ctx = make_context(m_, event_);
          for (const auto& [key, expr] : effect.args)
            args[key] = eval(*expr, ctx);
          std::vector<std::pair<std::string, Effect>> remaining(
              pending.begin() + static_cast<ptrdiff_t>(i) + 1, pending.end());
          call(owner, effect.name, std::move(args), std::move(remaining));
          return;  // tail now lives in the frame
        }
        case Effect::Kind::kReturn: {
          std::vector<std::pair<std::string, Effect>> remaining(
              pending.begin() + static_cast<ptrdiff_t>(i) + 1, pending.end());
          (void)remaining;  // effects after `return` in the same list are dead
          do_return();
          return;
        }
      }
    }
  }

  void do_emit(const Effect& effect) {
    Event e;
    e.cls = class_from_name(effect.name);
    e.name = effect.name;
    e.sender = "dialog";
    e.ts_ms = m_.now_ms;
    const auto ctx = make_context(m_, event_);
    for (const auto& [key, expr] : effect.args) {
      const Value v = eval(*expr, ctx);
      if (!is_nil(v)) e.params[key] = value_to_json(v);
    }
    emitted_.push_back(std::move(e));
  }

  void start_timer(const std::string& from, const std::string& name) {
    // The owner is the state whose declaration is in scope.
    const StateNode* s = &doc_.state(from);
    while (true) {
      for (const auto& t : s->timers) {
        if (t.name == name) {
          m_.timers[name] = {s->id, m_.now_ms + t.duration_ms, t.duration_ms};
          return;
        }
      }
      if (s->parent.empty()) break;
      s = &doc_.state(s->parent);
    }
    throw ValidationError("timer '" + name + "' not declared in scope");
  }

  void do_return() {
    if (m_.call_stack.empty())
      throw ValidationError("return with an empty call stack");
    MachineState::Frame frame = std::move(m_.call_stack.back());
    m_.call_stack.pop_back();

    // Leave every callee state that is not part of the resume path.
    std::vector<std::pair<std::string, Effect>> exits;
    for (size_t i = m_.config.size(); i > 0; --i) {
      const std::string& id = m_.config[i - 1];
      if (std::find(frame.resume_config.begin(), frame.resume_config.end(),
                    id) != frame.resume_config.end())
        continue;
      leave_state(id);
      for (const auto& e : doc_.state(id).exit) exits.emplace_back(id, e);
    }
    for (const auto& [owner, effect] : exits) {
      // Validation forbids call/return in exit effects, so this cannot
      // suspend.
      if (effect.kind == Effect::Kind::kEmit) {
        do_emit(effect);
      } else if (effect.kind == Effect::Kind::kSet) {
        m_.store[effect.name] = eval(*effect.value, make_context(m_, event_));
      } else if (effect.kind == Effect::Kind::kStartTimer) {
        start_timer(owner, effect.name);
      }
    }
    m_.config = frame.resume_config;
    run(std::move(frame.remaining));
  }

  MachineState m_;
  const StatechartDoc& doc_;
  const Event* event_;
  std::vector<Event> emitted_;
};

struct Enabled {
  std::string state;
  const Transition* transition;
};

std::optional<Enabled> find_enabled(const MachineState& m,
                                    const StatechartDoc& doc,
                                    const Event& event) {
  const auto ctx = make_context(m, &event);
  for (auto it = m.config.rbegin(); it != m.config.rend(); ++it) {
    const StateNode& s = doc.state(*it);
    for (const auto& t : s.transitions) {
      if (!events::match_pattern(t.trigger, event.name, false)) continue;
      if (t.guard && !truthy(eval(*t.guard, ctx))) continue;
      return Enabled{s.id, &t};
    }
  }
  return std::nullopt;
}

}  // namespace

Value lookup_value(const MachineState& machine, const std::string& name) {
  for (auto it = machine.config.rbegin(); it != machine.config.rend(); ++it) {
    auto b = machine.bindings.find(*it);
    if (b == machine.bindings.end()) continue;
    auto v = b->second.find(name);
    if (v != b->second.end()) return v->second;
  }
  auto v = machine.store.find(name);
  if (v != machine.store.end()) return v->second;
  return {};
}

StepResult init_machine(const StatechartDoc& doc) {
  Interpreter interp(MachineState{}, doc, nullptr);
  interp.enter_initial();
  StepResult r;
  r.emitted = std::move(interp.emitted());
  r.machine = interp.take_machine();
  r.transitioned = true;
  return r;
}

StepResult step(const MachineState& machine, const StatechartDoc& doc,
                const events::Event& event) {
  const auto enabled = find_enabled(machine, doc, event);
  if (!enabled) return {machine, {}, false};

  MachineState next = machine;
  next.now_ms = std::max(next.now_ms, event.ts_ms);
  Interpreter interp(std::move(next), doc, &event);
  interp.fire(enabled->state, *enabled->transition);
  StepResult r;
  r.emitted = std::move(interp.emitted());
  r.machine = interp.take_machine();
  r.transitioned = true;
  return r;
}

StepResult call_action_state(const MachineState& machine,
                             const StatechartDoc& doc,
                             const std::string& callee,
                             const std::map<std::string, Value>& args) {
  if (!doc.has_state(callee))
    throw ValidationError("call to unknown state '" + callee + "'");
  Interpreter interp(machine, doc, nullptr);
  const std::string caller = machine.config.empty() ? "" : machine.config.back();
  interp.call(caller, callee, args, {});
  StepResult r;
  r.emitted = std::move(interp.emitted());
  r.machine = interp.take_machine();
  r.transitioned = true;
  return r;
}

StepResult handle_timeout(const MachineState& machine,
                          const StatechartDoc& doc, const std::string& timer) {
  auto it = machine.timers.find(timer);
  if (it == machine.timers.end()) throw UnknownTimer(timer);

  MachineState next = machine;
  const PendingTimer pt = it->second;
  next.timers.erase(timer);
  next.now_ms = std::max(next.now_ms, pt.deadline_ms);

  events::Event ev;
  ev.cls = events::EventClass::kMonitor;
  ev.name = "monitor.timer." + timer;
  ev.sender = "clock";
  ev.ts_ms = pt.deadline_ms;

  const auto enabled = find_enabled(next, doc, ev);
  if (!enabled) return {next, {}, false};

  Interpreter interp(std::move(next), doc, &ev);
  interp.fire(enabled->state, *enabled->transition);
  StepResult r;
  r.emitted = std::move(interp.emitted());
  r.machine = interp.take_machine();
  r.transitioned = true;
  return r;
}

std::vector<std::pair<std::string, int64_t>> due_timers(
    const MachineState& machine, int64_t now_ms) {
  std::vector<std::pair<std::string, int64_t>> due;
  for (const auto& [name, t] : machine.timers)
    if (t.deadline_ms <= now_ms) due.emplace_back(name, t.deadline_ms);
  std::sort(due.begin(), due.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return due;
}

}  // namespace playroom::chart
