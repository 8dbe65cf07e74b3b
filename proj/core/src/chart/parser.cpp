#include "playroom/chart/parser.hpp"

#include <algorithm>
#include <sstream>

#include "playroom/events/event.hpp"

namespace playroom::chart {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return !std::isdigit(static_cast<unsigned char>(id[0]));
}

// Splits "a=1, b=f(x)" at top-level commas (quotes and parens respected).
std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      cur.push_back(c);
      if (c == '\\' && i + 1 < s.size()) {
        cur.push_back(s[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      cur.push_back(c);
    } else if (c == '(') {
      ++depth;
      cur.push_back(c);
    } else if (c == ')') {
      --depth;
      cur.push_back(c);
    } else if (c == sep && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) parts.push_back(trim(cur));
  return parts;
}

class ChartParser {
 public:
  explicit ChartParser(const std::string& text) : text_(text) {}

  StatechartDoc parse() {
    std::istringstream in(text_);
    std::string raw;
    int line_no = 0;
    bool saw_anything = false;
    while (std::getline(in, raw)) {
      ++line_no;
      const std::string content = trim(raw);
      if (content.empty() || content[0] == '#') continue;
      saw_anything = true;

      size_t indent = 0;
      while (indent < raw.size() && raw[indent] == ' ') ++indent;
      if (indent < raw.size() && raw[indent] == '\t')
        throw ParseError(line_no, "tabs are not allowed for indentation");
      if (indent % 2 != 0)
        throw ParseError(line_no, "indentation must be a multiple of 2 spaces");
      const size_t level = indent / 2;
      if (level > open_.size())
        throw ParseError(line_no, "indentation jumps past the open block");
      open_.resize(level);  // close deeper blocks

      parse_line(line_no, content);
    }
    if (!saw_anything) throw ParseError(1, "empty statechart document");
    validate();
    return std::move(doc_);
  }

 private:
  StateNode* current() {
    return open_.empty() ? nullptr : &doc_.states.at(open_.back());
  }

  void parse_line(int line, const std::string& content) {
    if (content.rfind("state ", 0) == 0) {
      parse_state_header(line, content.substr(6));
      return;
    }
    if (open_.empty()) {
      if (content.rfind("var ", 0) == 0) {
        parse_var(line, content.substr(4));
        return;
      }
      if (content.rfind("initial ", 0) == 0) {
        const std::string id = trim(content.substr(8));
        if (!valid_id(id)) throw ParseError(line, "bad initial state id");
        if (!doc_.initial.empty())
          throw ParseError(line, "initial state declared twice");
        doc_.initial = id;
        return;
      }
      if (content.rfind("action ", 0) == 0) {
        parse_action(line, content.substr(7));
        return;
      }
      throw ParseError(line, "expected var/initial/state/action, got '" +
                                 content + "'");
    }

    StateNode* s = current();
    if (content.rfind("entry:", 0) == 0) {
      s->entry.push_back(parse_effect(line, trim(content.substr(6))));
      return;
    }
    if (content.rfind("exit:", 0) == 0) {
      s->exit.push_back(parse_effect(line, trim(content.substr(5))));
      return;
    }
    if (content.rfind("timer ", 0) == 0) {
      parse_timer(line, content.substr(6), s);
      return;
    }
    if (content.rfind("on ", 0) == 0) {
      s->transitions.push_back(parse_transition(line, content.substr(3)));
      return;
    }
    if (content.rfind("initial ", 0) == 0) {
      const std::string id = trim(content.substr(8));
      if (!valid_id(id)) throw ParseError(line, "bad initial child id");
      if (!s->initial_child.empty())
        throw ParseError(line, "initial child declared twice");
      s->initial_child = id;
      return;
    }
    throw ParseError(line, "unrecognized line '" + content + "'");
  }

  void parse_var(int line, const std::string& rest) {
    const size_t eq = rest.find('=');
    if (eq == std::string::npos) throw ParseError(line, "var needs '='");
    const std::string name = trim(rest.substr(0, eq));
    if (!valid_id(name)) throw ParseError(line, "bad variable name");
    for (const auto& [existing, v] : doc_.globals) {
      (void)v;
      if (existing == name) throw ParseError(line, "variable declared twice");
    }
    try {
      const Value v = eval(*parse_expr(trim(rest.substr(eq + 1))), {});
      doc_.globals.emplace_back(name, v);
    } catch (const EvalError& ex) {
      throw ParseError(line, ex.what());
    }
  }

  // "speak(robot, text) emits action.speak done monitor.speak.done"
  void parse_action(int line, const std::string& rest) {
    const size_t emits_at = rest.find(" emits ");
    if (emits_at == std::string::npos)
      throw ParseError(line, "action needs 'emits <event>'");
    const std::string head = trim(rest.substr(0, emits_at));
    std::string tail = trim(rest.substr(emits_at + 7));
    const size_t done_at = tail.find(" done ");
    if (done_at == std::string::npos)
      throw ParseError(line, "action needs 'done <event>'");

    StateNode node;
    node.is_action = true;
    node.action_event = trim(tail.substr(0, done_at));
    node.done_event = trim(tail.substr(done_at + 6));
    parse_id_and_params(line, head, node);
    if (!events::valid_event_name(node.action_event))
      throw ParseError(line, "bad action event name '" + node.action_event + "'");
    if (!events::valid_event_name(node.done_event))
      throw ParseError(line, "bad done event name '" + node.done_event + "'");

    const bool has_robot = std::any_of(
        node.params.begin(), node.params.end(),
        [](const Param& p) { return p.name == "robot"; });
    if (!has_robot)
      throw ParseError(line, "action state must take a 'robot' parameter");

    Transition done;
    done.trigger = node.done_event;
    done.target = "return";
    done.line = line;
    node.transitions.push_back(std::move(done));

    add_state(line, std::move(node), /*parent=*/"");
  }

  void parse_state_header(int line, const std::string& rest) {
    std::string head = trim(rest);
    if (head.empty() || head.back() != ':')
      throw ParseError(line, "state header must end with ':'");
    head.pop_back();

    StateNode node;
    parse_id_and_params(line, trim(head), node);
    const std::string parent = open_.empty() ? "" : open_.back();
    const std::string id = node.id;
    add_state(line, std::move(node), parent);
    open_.push_back(id);
  }

  void parse_id_and_params(int line, const std::string& head, StateNode& node) {
    const size_t paren = head.find('(');
    if (paren == std::string::npos) {
      node.id = trim(head);
    } else {
      if (head.back() != ')') throw ParseError(line, "missing ')'");
      node.id = trim(head.substr(0, paren));
      const std::string inner = head.substr(paren + 1, head.size() - paren - 2);
      for (const auto& part : split_top_level(inner, ',')) {
        Param p;
        const size_t eq = part.find('=');
        if (eq == std::string::npos) {
          p.name = trim(part);
        } else {
          p.name = trim(part.substr(0, eq));
          try {
            p.default_value = eval(*parse_expr(trim(part.substr(eq + 1))), {});
          } catch (const EvalError& ex) {
            throw ParseError(line, ex.what());
          }
        }
        if (!valid_id(p.name)) throw ParseError(line, "bad parameter name");
        node.params.push_back(std::move(p));
      }
    }
    if (!valid_id(node.id)) throw ParseError(line, "bad state id '" + node.id + "'");
  }

  void add_state(int line, StateNode&& node, const std::string& parent) {
    if (doc_.states.count(node.id))
      throw ValidationError("duplicate state id '" + node.id + "'");
    node.parent = parent;
    const std::string id = node.id;
    doc_.states.emplace(id, std::move(node));
    doc_.order.push_back(id);
    if (parent.empty())
      doc_.roots.push_back(id);
    else
      doc_.states.at(parent).children.push_back(id);
  }

  void parse_timer(int line, const std::string& rest, StateNode* s) {
    std::istringstream in(rest);
    std::string name;
    int64_t duration = -1;
    in >> name >> duration;
    if (name.empty() || duration < 0)
      throw ParseError(line, "expected 'timer <name> <duration_ms>'");
    for (const auto& t : s->timers)
      if (t.name == name)
        throw ParseError(line, "timer '" + name + "' declared twice");
    s->timers.push_back({name, duration});
  }

  Effect parse_effect(int line, const std::string& text) {
    Effect e;
    if (text == "return") {
      e.kind = Effect::Kind::kReturn;
      return e;
    }
    if (text.rfind("set ", 0) == 0) {
      const std::string rest = text.substr(4);
      const size_t eq = rest.find('=');
      if (eq == std::string::npos) throw ParseError(line, "set needs '='");
      e.kind = Effect::Kind::kSet;
      e.name = trim(rest.substr(0, eq));
      if (!valid_id(e.name)) throw ParseError(line, "bad variable name");
      try {
        e.value = parse_expr(trim(rest.substr(eq + 1)));
      } catch (const EvalError& ex) {
        throw ParseError(line, ex.what());
      }
      return e;
    }
    if (text.rfind("start timer ", 0) == 0) {
      e.kind = Effect::Kind::kStartTimer;
      e.name = trim(text.substr(12));
      if (!valid_id(e.name)) throw ParseError(line, "bad timer name");
      return e;
    }
    if (text.rfind("emit ", 0) == 0) {
      e.kind = Effect::Kind::kEmit;
      parse_name_and_args(line, trim(text.substr(5)), e);
      if (!events::valid_event_name(e.name))
        throw ParseError(line, "bad event name '" + e.name + "'");
      const std::string first = e.name.substr(0, e.name.find('.'));
      if (first != "sense" && first != "action" && first != "monitor")
        throw ParseError(line,
                         "emitted event must start with sense/action/monitor");
      return e;
    }
    if (text.rfind("call ", 0) == 0) {
      e.kind = Effect::Kind::kCall;
      parse_name_and_args(line, trim(text.substr(5)), e);
      if (!valid_id(e.name)) throw ParseError(line, "bad call target");
      return e;
    }
    throw ParseError(line, "unknown effect '" + text + "'");
  }

  void parse_name_and_args(int line, const std::string& text, Effect& e) {
    const size_t paren = text.find('(');
    if (paren == std::string::npos) {
      e.name = trim(text);
      return;
    }
    if (text.back() != ')') throw ParseError(line, "missing ')'");
    e.name = trim(text.substr(0, paren));
    const std::string inner = text.substr(paren + 1, text.size() - paren - 2);
    for (const auto& part : split_top_level(inner, ',')) {
      const size_t eq = part.find('=');
      if (eq == std::string::npos)
        throw ParseError(line, "argument needs 'key=expr'");
      const std::string key = trim(part.substr(0, eq));
      if (!valid_id(key)) throw ParseError(line, "bad argument name");
      try {
        e.args.emplace_back(key, parse_expr(trim(part.substr(eq + 1))));
      } catch (const EvalError& ex) {
        throw ParseError(line, ex.what());
      }
    }
  }

  Transition parse_transition(int line, const std::string& rest) {
    Transition t;
    t.line = line;
    std::string work = trim(rest);

    const size_t arrow = work.rfind("->");
    if (arrow == std::string::npos)
      throw ParseError(line, "transition needs '-> target'");
    t.target = trim(work.substr(arrow + 2));
    if (t.target != "return" && !valid_id(t.target))
      throw ParseError(line, "bad transition target");
    work = trim(work.substr(0, arrow));

    const size_t guard_open = work.find('[');
    if (guard_open != std::string::npos) {
      const size_t guard_close = work.rfind(']');
      if (guard_close == std::string::npos || guard_close < guard_open)
        throw ParseError(line, "unterminated guard");
      std::string guard = trim(work.substr(guard_open + 1, guard_close - guard_open - 1));
      if (guard.rfind("if ", 0) != 0)
        throw ParseError(line, "guard must start with 'if'");
      try {
        t.guard = parse_expr(trim(guard.substr(3)));
      } catch (const EvalError& ex) {
        throw ParseError(line, ex.what());
      }
      work = trim(work.substr(0, guard_open));
    }

    if (work.rfind("timeout ", 0) == 0) {
      t.on_timeout = true;
      t.timer_name = trim(work.substr(8));
      if (!valid_id(t.timer_name)) throw ParseError(line, "bad timer name");
      t.trigger = "monitor.timer." + t.timer_name;
    } else {
      t.trigger = work;
      if (!events::valid_pattern(t.trigger))
        throw ParseError(line, "bad trigger pattern '" + t.trigger + "'");
    }
    return t;
  }

  void validate() {
    if (doc_.roots.empty()) throw ValidationError("no states declared");
    if (doc_.initial.empty()) {
      for (const auto& id : doc_.roots) {
        if (!doc_.states.at(id).is_action) {
          doc_.initial = id;
          break;
        }
      }
    }
    if (doc_.initial.empty() || !doc_.has_state(doc_.initial))
      throw ValidationError("initial state '" + doc_.initial + "' not found");
    if (doc_.states.at(doc_.initial).is_action)
      throw ValidationError("initial state cannot be an action state");

    for (const auto& id : doc_.order) {
      const StateNode& s = doc_.states.at(id);
      if (!s.initial_child.empty() &&
          std::find(s.children.begin(), s.children.end(), s.initial_child) ==
              s.children.end())
        throw ValidationError("initial child '" + s.initial_child +
                              "' is not a child of '" + id + "'");

      for (const auto& t : s.transitions) {
        if (t.target == "return") continue;
        if (!doc_.has_state(t.target))
          throw ValidationError("unknown transition target '" + t.target +
                                "' in state '" + id + "'");
        const StateNode& target = doc_.states.at(t.target);
        if (target.is_action)
          throw ValidationError("action state '" + t.target +
                                "' must be called, not transitioned to");
        check_enterable(t.target);
        if (t.on_timeout && !timer_visible(s, t.timer_name))
          throw ValidationError("timeout for undeclared timer '" +
                                t.timer_name + "' in state '" + id + "'");
      }

      auto check_effects = [&](const std::vector<Effect>& effects,
                               bool is_exit) {
        for (const auto& e : effects) {
          if (e.kind == Effect::Kind::kCall) {
            if (is_exit)
              throw ValidationError("exit effects may not call ('" + id + "')");
            if (!doc_.has_state(e.name))
              throw ValidationError("call to unknown state '" + e.name + "'");
            check_call_args(doc_.states.at(e.name), e);
          }
          if (e.kind == Effect::Kind::kReturn && is_exit)
            throw ValidationError("exit effects may not return ('" + id + "')");
          if (e.kind == Effect::Kind::kStartTimer && !timer_visible(s, e.name))
            throw ValidationError("start of undeclared timer '" + e.name +
                                  "' in state '" + id + "'");
        }
      };
      check_effects(s.entry, false);
      check_effects(s.exit, true);
    }
    check_enterable(doc_.initial);
  }

  // Entering `id` by plain transition also enters its ancestors and its
  // initial-descend chain; all of those must be parameterless or defaulted.
  void check_enterable(const std::string& id) {
    std::vector<std::string> chain;
    std::string cur = id;
    while (!cur.empty()) {
      chain.push_back(cur);
      cur = doc_.states.at(cur).parent;
    }
    cur = id;
    while (true) {
      const StateNode& s = doc_.states.at(cur);
      if (s.children.empty()) break;
      cur = s.initial_child.empty() ? s.children.front() : s.initial_child;
      chain.push_back(cur);
    }
    for (const auto& sid : chain) {
      for (const auto& p : doc_.states.at(sid).params) {
        if (!p.default_value)
          throw ValidationError("state '" + sid + "' needs parameter '" +
                                p.name +
                                "' and can only be entered via call");
      }
    }
  }

  void check_call_args(const StateNode& callee, const Effect& call) {
    for (const auto& [key, expr] : call.args) {
      (void)expr;
      const bool known = std::any_of(
          callee.params.begin(), callee.params.end(),
          [&](const Param& p) { return p.name == key; });
      if (!known)
        throw ValidationError("call to '" + callee.id +
                              "' passes unknown parameter '" + key + "'");
    }
    for (const auto& p : callee.params) {
      if (p.default_value) continue;
      const bool bound = std::any_of(
          call.args.begin(), call.args.end(),
          [&](const auto& kv) { return kv.first == p.name; });
      if (!bound)
        throw ValidationError("call to '" + callee.id +
                              "' leaves parameter '" + p.name + "' unbound");
    }
  }

  bool timer_visible(const StateNode& from, const std::string& name) {
    const StateNode* s = &from;
    while (true) {
      for (const auto& t : s->timers)
        if (t.name == name) return true;
      if (s->parent.empty()) return false;
      s = &doc_.states.at(s->parent);
    }
  }

  const std::string& text_;
  StatechartDoc doc_;
  std::vector<std::string> open_;
};

std::string print_effect(const Effect& e) {
  switch (e.kind) {
    case Effect::Kind::kReturn:
      return "return";
    case Effect::Kind::kSet:
      return "set " + e.name + " = " + print_expr(*e.value);
    case Effect::Kind::kStartTimer:
      return "start timer " + e.name;
    case Effect::Kind::kEmit:
    case Effect::Kind::kCall: {
      std::string out = (e.kind == Effect::Kind::kEmit ? "emit " : "call ") + e.name;
      if (!e.args.empty()) {
        out += "(";
        for (size_t i = 0; i < e.args.size(); ++i) {
          if (i) out += ", ";
          out += e.args[i].first + "=" + print_expr(*e.args[i].second);
        }
        out += ")";
      }
      return out;
    }
  }
  return "";
}

std::string print_params(const std::vector<Param>& params) {
  if (params.empty()) return "";
  std::string out = "(";
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].name;
    if (params[i].default_value)
      out += "=" + value_to_source(*params[i].default_value);
  }
  out += ")";
  return out;
}

void print_state(const StatechartDoc& doc, const std::string& id, int level,
                 std::string& out) {
  const StateNode& s = doc.state(id);
  const std::string pad(static_cast<size_t>(level) * 2, ' ');

  if (s.is_action) {
    out += pad + "action " + s.id + print_params(s.params) + " emits " +
           s.action_event + " done " + s.done_event + "\n";
    return;
  }

  out += pad + "state " + s.id + print_params(s.params) + ":\n";
  const std::string inner(static_cast<size_t>(level + 1) * 2, ' ');
  if (!s.initial_child.empty()) out += inner + "initial " + s.initial_child + "\n";
  for (const auto& t : s.timers)
    out += inner + "timer " + t.name + " " + std::to_string(t.duration_ms) + "\n";
  for (const auto& e : s.entry) out += inner + "entry: " + print_effect(e) + "\n";
  for (const auto& e : s.exit) out += inner + "exit: " + print_effect(e) + "\n";
  for (const auto& t : s.transitions) {
    out += inner + "on ";
    if (t.on_timeout)
      out += "timeout " + t.timer_name;
    else
      out += t.trigger;
    if (t.guard) out += " [if " + print_expr(*t.guard) + "]";
    out += " -> " + t.target + "\n";
  }
  for (const auto& child : s.children) print_state(doc, child, level + 1, out);
}

}  // namespace

const StateNode& StatechartDoc::state(const std::string& id) const {
  auto it = states.find(id);
  if (it == states.end())
    throw ValidationError("unknown state id '" + id + "'");
  return it->second;
}

StatechartDoc parse_statechart(const std::string& text) {
  return ChartParser(text).parse();
}

std::string pretty_print(const StatechartDoc& doc) {
  std::string out;
  for (const auto& [name, v] : doc.globals)
    out += "var " + name + " = " + value_to_source(v) + "\n";
  out += "initial " + doc.initial + "\n";
  for (const auto& root : doc.roots) print_state(doc, root, 0, out);
  return out;
}

}  // namespace playroom::chart
