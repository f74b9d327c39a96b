#pragma once

#include <memory>
#include <string>

namespace robincone {

/// A compiled scalar expression in the single variable `phi`.
///
/// Grammar (whitespace ignored):
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := ('+' | '-') unary | atom
///   atom   := number | 'phi' | 'pi' | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
class Expression {
 public:
  static Expression parse(const std::string& text);

  double operator()(double phi) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace robincone
