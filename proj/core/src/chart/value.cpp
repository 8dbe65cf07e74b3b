#include "playroom/chart/value.hpp"

#include <cmath>

namespace playroom::chart {
namespace {

std::string type_name(const Value& v) {
  switch (v.index()) {
    case 0:
      return "nil";
    case 1:
      return "bool";
    case 2:
      return "int";
    case 3:
      return "float";
    case 4:
      return "string";
  }
  return "?";
}

}  // namespace

bool is_nil(const Value& v) { return std::holds_alternative<std::monostate>(v); }

bool truthy(const Value& v) {
  if (is_nil(v)) return false;
  if (auto* b = std::get_if<bool>(&v)) return *b;
  if (auto* i = std::get_if<int64_t>(&v)) return *i != 0;
  if (auto* d = std::get_if<double>(&v)) return *d != 0.0;
  return !std::get<std::string>(v).empty();
}

bool is_number(const Value& v) {
  return std::holds_alternative<int64_t>(v) || std::holds_alternative<double>(v);
}

double as_double(const Value& v) {
  if (auto* i = std::get_if<int64_t>(&v)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&v)) return *d;
  throw EvalError("expected a number, got " + type_name(v));
}

bool value_equal(const Value& a, const Value& b) {
  if (is_number(a) && is_number(b)) return as_double(a) == as_double(b);
  if (a.index() != b.index()) return false;
  return a == b;
}

int value_compare(const Value& a, const Value& b) {
  if (is_number(a) && is_number(b)) {
    const double x = as_double(a), y = as_double(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (std::holds_alternative<std::string>(a) &&
      std::holds_alternative<std::string>(b)) {
    const auto& x = std::get<std::string>(a);
    const auto& y = std::get<std::string>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  throw EvalError("cannot order " + type_name(a) + " and " + type_name(b));
}

Value value_add(const Value& a, const Value& b) {
  if (std::holds_alternative<std::string>(a) &&
      std::holds_alternative<std::string>(b))
    return std::get<std::string>(a) + std::get<std::string>(b);
  if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b))
    return std::get<int64_t>(a) + std::get<int64_t>(b);
  return as_double(a) + as_double(b);
}

Value value_sub(const Value& a, const Value& b) {
  if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b))
    return std::get<int64_t>(a) - std::get<int64_t>(b);
  return as_double(a) - as_double(b);
}

Value value_mul(const Value& a, const Value& b) {
  if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b))
    return std::get<int64_t>(a) * std::get<int64_t>(b);
  return as_double(a) * as_double(b);
}

Value value_div(const Value& a, const Value& b) {
  const double d = as_double(b);
  if (d == 0.0) throw EvalError("division by zero");
  return as_double(a) / d;
}

Value value_neg(const Value& a) {
  if (std::holds_alternative<int64_t>(a)) return -std::get<int64_t>(a);
  return -as_double(a);
}

nlohmann::ordered_json value_to_json(const Value& v) {
  switch (v.index()) {
    case 0:
      return nullptr;
    case 1:
      return std::get<bool>(v);
    case 2:
      return std::get<int64_t>(v);
    case 3:
      return std::get<double>(v);
    default:
      return std::get<std::string>(v);
  }
}

Value value_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw EvalError("event parameter is not a scalar");
}

std::string value_to_source(const Value& v) {
  switch (v.index()) {
    case 0:
      return "nil";
    case 1:
      return std::get<bool>(v) ? "true" : "false";
    case 2:
      return std::to_string(std::get<int64_t>(v));
    case 3: {
      nlohmann::json j = std::get<double>(v);
      return j.dump();
    }
    default: {
      nlohmann::json j = std::get<std::string>(v);
      return j.dump();
    }
  }
}

}  // namespace playroom::chart
