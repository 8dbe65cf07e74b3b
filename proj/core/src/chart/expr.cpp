#include "playroom/chart/expr.hpp"

#include <cctype>
#include <cstdlib>

namespace playroom::chart {
namespace {

struct Token {
  enum class Kind { kNumber, kString, kIdent, kOp, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  Value value;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ >= src_.size()) {
      current_ = {Token::Kind::kEnd, "", {}};
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number();
      return;
    }
    if (c == '"') {
      lex_string();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      lex_ident();
      return;
    }
    lex_operator();
  }

  void lex_number() {
    size_t start = pos_;
    bool is_float = false;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_float = true;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-') &&
            (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))
          ++pos_;
      } else {
        break;
      }
    }
    const std::string text = src_.substr(start, pos_ - start);
    Value v;
    if (is_float)
      v = std::strtod(text.c_str(), nullptr);
    else
      v = static_cast<int64_t>(std::strtoll(text.c_str(), nullptr, 10));
    current_ = {Token::Kind::kNumber, text, v};
  }

  void lex_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_++];
      if (c == '\\' && pos_ < src_.size()) {
        const char esc = src_[pos_++];
        switch (esc) {
          case 'n':
            c = '\n';
            break;
          case 't':
            c = '\t';
            break;
          case '"':
            c = '"';
            break;
          case '\\':
            c = '\\';
            break;
          default:
            throw EvalError(std::string("unknown escape \\") + esc);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= src_.size()) throw EvalError("unterminated string literal");
    ++pos_;  // closing quote
    current_ = {Token::Kind::kString, out, out};
  }

  void lex_ident() {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_' || src_[pos_] == '.'))
      ++pos_;
    current_ = {Token::Kind::kIdent, src_.substr(start, pos_ - start), {}};
  }

  void lex_operator() {
    static const char* kTwoChar[] = {"==", "!=", "<=", ">=", "&&", "||"};
    if (pos_ + 1 < src_.size()) {
      const std::string two = src_.substr(pos_, 2);
      for (const char* op : kTwoChar) {
        if (two == op) {
          pos_ += 2;
          current_ = {Token::Kind::kOp, two, {}};
          return;
        }
      }
    }
    const char c = src_[pos_];
    static const std::string kOneChar = "!<>+-*/()";
    if (kOneChar.find(c) == std::string::npos)
      throw EvalError(std::string("unexpected character '") + c + "'");
    ++pos_;
    current_ = {Token::Kind::kOp, std::string(1, c), {}};
  }

  const std::string& src_;
  size_t pos_ = 0;
  Token current_;
};

// precedence: || < && < comparisons < +- < */ < unary < primary
class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ExprPtr parse() {
    ExprPtr e = parse_or();
    if (lex_.peek().kind != Token::Kind::kEnd)
      throw EvalError("trailing input after expression: '" + lex_.peek().text + "'");
    return e;
  }

 private:
  static ExprPtr binary(const std::string& op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::kBinary;
    e->name = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }

  bool accept_op(const std::string& op) {
    if (lex_.peek().kind == Token::Kind::kOp && lex_.peek().text == op) {
      lex_.take();
      return true;
    }
    return false;
  }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (accept_op("||")) e = binary("||", e, parse_and());
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (accept_op("&&")) e = binary("&&", e, parse_cmp());
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    static const char* kCmp[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (const char* op : kCmp) {
      if (accept_op(op)) return binary(op, e, parse_add());
    }
    return e;
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (true) {
      if (accept_op("+"))
        e = binary("+", e, parse_mul());
      else if (accept_op("-"))
        e = binary("-", e, parse_mul());
      else
        return e;
    }
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (true) {
      if (accept_op("*"))
        e = binary("*", e, parse_unary());
      else if (accept_op("/"))
        e = binary("/", e, parse_unary());
      else
        return e;
    }
  }

  ExprPtr parse_unary() {
    if (accept_op("!")) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::kUnary;
      e->name = "!";
      e->lhs = parse_unary();
      return e;
    }
    if (accept_op("-")) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::kUnary;
      e->name = "-";
      e->lhs = parse_unary();
      return e;
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token t = lex_.take();
    auto e = std::make_shared<Expr>();
    switch (t.kind) {
      case Token::Kind::kNumber:
      case Token::Kind::kString:
        e->kind = Expr::Kind::kLiteral;
        e->literal = t.value;
        return e;
      case Token::Kind::kIdent:
        if (t.text == "true" || t.text == "false") {
          e->kind = Expr::Kind::kLiteral;
          e->literal = (t.text == "true");
          return e;
        }
        if (t.text == "nil") {
          e->kind = Expr::Kind::kLiteral;
          e->literal = std::monostate{};
          return e;
        }
        if (t.text.rfind("event.", 0) == 0) {
          e->kind = Expr::Kind::kEventRef;
          e->name = t.text.substr(6);
          if (e->name.empty()) throw EvalError("empty event parameter name");
          return e;
        }
        if (t.text.find('.') != std::string::npos)
          throw EvalError("dotted identifier '" + t.text +
                          "' (only event.* is allowed)");
        e->kind = Expr::Kind::kIdent;
        e->name = t.text;
        return e;
      case Token::Kind::kOp:
        if (t.text == "(") {
          ExprPtr inner = parse_or();
          if (!accept_op(")")) throw EvalError("missing ')'");
          return inner;
        }
        throw EvalError("unexpected operator '" + t.text + "'");
      case Token::Kind::kEnd:
        throw EvalError("unexpected end of expression");
    }
    throw EvalError("unreachable");
  }

  Lexer lex_;
};

int precedence(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" ||
      op == ">=")
    return 3;
  if (op == "+" || op == "-") return 4;
  return 5;  // * /
}

std::string print_with_parens(const Expr& e, int parent_prec) {
  const std::string s = print_expr(e);
  if (e.kind == Expr::Kind::kBinary && precedence(e.name) < parent_prec)
    return "(" + s + ")";
  return s;
}

}  // namespace

Value eval(const Expr& e, const EvalContext& ctx) {
  switch (e.kind) {
    case Expr::Kind::kLiteral:
      return e.literal;
    case Expr::Kind::kIdent:
      return ctx.lookup ? ctx.lookup(e.name) : Value{};
    case Expr::Kind::kEventRef:
      return ctx.event_param ? ctx.event_param(e.name) : Value{};
    case Expr::Kind::kUnary: {
      const Value v = eval(*e.lhs, ctx);
      if (e.name == "!") return !truthy(v);
      return value_neg(v);
    }
    case Expr::Kind::kBinary: {
      if (e.name == "&&") {
        if (!truthy(eval(*e.lhs, ctx))) return false;
        return truthy(eval(*e.rhs, ctx));
      }
      if (e.name == "||") {
        if (truthy(eval(*e.lhs, ctx))) return true;
        return truthy(eval(*e.rhs, ctx));
      }
      const Value a = eval(*e.lhs, ctx);
      const Value b = eval(*e.rhs, ctx);
      if (e.name == "==") return value_equal(a, b);
      if (e.name == "!=") return !value_equal(a, b);
      if (e.name == "<") return value_compare(a, b) < 0;
      if (e.name == "<=") return value_compare(a, b) <= 0;
      if (e.name == ">") return value_compare(a, b) > 0;
      if (e.name == ">=") return value_compare(a, b) >= 0;
      if (e.name == "+") return value_add(a, b);
      if (e.name == "-") return value_sub(a, b);
      if (e.name == "*") return value_mul(a, b);
      if (e.name == "/") return value_div(a, b);
      throw EvalError("unknown operator " + e.name);
    }
  }
  throw EvalError("unreachable");
}

ExprPtr parse_expr(const std::string& text) { return Parser(text).parse(); }

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kLiteral:
      return value_to_source(e.literal);
    case Expr::Kind::kIdent:
      return e.name;
    case Expr::Kind::kEventRef:
      return "event." + e.name;
    case Expr::Kind::kUnary:
      return e.name + print_with_parens(*e.lhs, 5);
    case Expr::Kind::kBinary: {
      const int prec = precedence(e.name);
      return print_with_parens(*e.lhs, prec) + " " + e.name + " " +
             print_with_parens(*e.rhs, prec + 1);
    }
  }
  return "";
}

}  // namespace playroom::chart
