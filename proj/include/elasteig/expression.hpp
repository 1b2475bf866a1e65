#pragma once

#include <memory>
#include <string>

namespace elasteig {

/// A scalar field f(x, y) compiled from a small arithmetic grammar:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'x' | 'y' | 'sqrt' '(' expr ')' | '(' expr ')'
///
/// `^` is right-associative and binds tighter than unary minus on its left
/// operand, so `-x^2` is `-(x^2)`.
class Expression {
public:
  /// Throws InputError with the column of the offending character.
  explicit Expression(std::string source);

  [[nodiscard]] double operator()(double x, double y) const;
  [[nodiscard]] const std::string& source() const { return source_; }

  struct Node;

private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

} // namespace elasteig
