#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "playroom/chart/value.hpp"

namespace playroom::chart {

// Side-effect-free expression over variables, state parameters and the
// params of the event being processed (`event.key`).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    kLiteral,
    kIdent,      // variable or bound state parameter
    kEventRef,   // event.key
    kUnary,      // ops: ! -
    kBinary,     // ops: || && == != < <= > >= + - * /
  };

  Kind kind = Kind::kLiteral;
  Value literal;
  std::string name;  // ident / event key / operator spelling
  ExprPtr lhs;
  ExprPtr rhs;
};

// Name resolution for evaluation. Unknown identifiers and missing event
// params resolve to nil so guards stay total.
struct EvalContext {
  std::function<Value(const std::string&)> lookup;
  std::function<Value(const std::string&)> event_param;
};

Value eval(const Expr& e, const EvalContext& ctx);

// Parses a complete expression; throws EvalError with a reason on bad input.
ExprPtr parse_expr(const std::string& text);

// Canonical source form (used by the chart pretty-printer).
std::string print_expr(const Expr& e);

}  // namespace playroom::chart
