#include "robincone/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "robincone/error.hpp"

namespace robincone {

struct Expression::Node {
  enum class Kind { Number, Variable, Add, Sub, Mul, Div, Neg, Sin, Cos } kind;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double phi) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Variable: return phi;
      case Kind::Add: return lhs->eval(phi) + rhs->eval(phi);
      case Kind::Sub: return lhs->eval(phi) - rhs->eval(phi);
      case Kind::Mul: return lhs->eval(phi) * rhs->eval(phi);
      case Kind::Div: return lhs->eval(phi) / rhs->eval(phi);
      case Kind::Neg: return -lhs->eval(phi);
      case Kind::Sin: return std::sin(lhs->eval(phi));
      case Kind::Cos: return std::cos(lhs->eval(phi));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
  auto node = std::make_shared<Expression::Node>();
  node->kind = kind;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  node->value = value;
  return node;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ExpressionSyntax,
                msg + " at position " + std::to_string(pos_) + " in '" + text_ + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, lhs, term());
      else if (accept('-')) lhs = make(Kind::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Kind::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return atom();
  }

  NodePtr atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (name == "phi") return make(Kind::Variable);
      if (name == "pi") return make(Kind::Number, nullptr, nullptr, std::numbers::pi);
      if (name == "sin" || name == "cos") {
        if (!accept('(')) fail("expected '(' after " + name);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(name == "sin" ? Kind::Sin : Kind::Cos, arg);
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make(Kind::Number, nullptr, nullptr, value);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser parser(text);
  return Expression(text, parser.parse());
}

double Expression::operator()(double phi) const { return root_->eval(phi); }

}  // namespace robincone
