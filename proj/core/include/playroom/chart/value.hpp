#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "playroom/common/error.hpp"

namespace playroom::chart {

// Scalar value in the statechart world: variables, state parameters and
// event parameters all use this. Integers and doubles are kept apart so
// traces print stably.
using Value = std::variant<std::monostate, bool, int64_t, double, std::string>;

class EvalError : public Error {
 public:
  explicit EvalError(const std::string& what) : Error("eval: " + what) {}
};

bool is_nil(const Value& v);
bool truthy(const Value& v);
bool is_number(const Value& v);
double as_double(const Value& v);

bool value_equal(const Value& a, const Value& b);

// Strict weak ordering for <,<=,>,>=. Throws EvalError on mixed
// non-numeric types.
int value_compare(const Value& a, const Value& b);

Value value_add(const Value& a, const Value& b);  // numbers, or string concat
Value value_sub(const Value& a, const Value& b);
Value value_mul(const Value& a, const Value& b);
Value value_div(const Value& a, const Value& b);
Value value_neg(const Value& a);

nlohmann::ordered_json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

// Literal form as it appears in the DSL (strings quoted and escaped).
std::string value_to_source(const Value& v);

}  // namespace playroom::chart
