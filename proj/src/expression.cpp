#include "elasteig/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "elasteig/error.hpp"

namespace elasteig {

struct Expression::Node {
  enum class Op { Const, X, Y, Neg, Add, Sub, Mul, Div, Pow, Sqrt } op = Op::Const;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  [[nodiscard]] double eval(double x, double y) const {
    switch (op) {
      case Op::Const: return value;
      case Op::X: return x;
      case Op::Y: return y;
      case Op::Neg: return -lhs->eval(x, y);
      case Op::Add: return lhs->eval(x, y) + rhs->eval(x, y);
      case Op::Sub: return lhs->eval(x, y) - rhs->eval(x, y);
      case Op::Mul: return lhs->eval(x, y) * rhs->eval(x, y);
      case Op::Div: return lhs->eval(x, y) / rhs->eval(x, y);
      case Op::Pow: {
        const double e = rhs->eval(x, y);
        // Small integer powers are expanded so x^2 is exactly x*x.
        if (e == 2.0) {
          const double b = lhs->eval(x, y);
          return b * b;
        }
        return std::pow(lhs->eval(x, y), e);
      }
      case Op::Sqrt: return std::sqrt(lhs->eval(x, y));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("expression '" + s_ + "': " + what + " at column " + std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    n->value = v;
    return n;
  }

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, term());
      else if (accept('-')) n = make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Op::Const, nullptr, nullptr, v);
    }
    if (accept('(')) {
      auto n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
      const std::string word = s_.substr(pos_, end - pos_);
      if (word == "x") {
        pos_ = end;
        return make(Op::X);
      }
      if (word == "y") {
        pos_ = end;
        return make(Op::Y);
      }
      if (word == "sqrt") {
        pos_ = end;
        if (!accept('(')) fail("expected '(' after sqrt");
        auto n = expr();
        if (!accept(')')) fail("expected ')'");
        return make(Op::Sqrt, n);
      }
      fail("unknown identifier '" + word + "'");
    }
    fail("unexpected character");
  }
};

} // namespace

Expression::Expression(std::string source) : source_(std::move(source)) {
  root_ = Parser(source_).parse();
}

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

} // namespace elasteig
