#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace molli {

/// Parse error for the custom weight generator grammar.
struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace expr_detail {

struct Node {
  virtual ~Node() = default;
  virtual double eval(double x) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Num : Node {
  double v;
  explicit Num(double v) : v(v) {}
  double eval(double) const override { return v; }
};
struct Var : Node {
  double eval(double x) const override { return x; }
};
struct Unary : Node {
  double (*fn)(double);
  NodePtr a;
  double eval(double x) const override { return fn(a->eval(x)); }
};
struct Binary : Node {
  char op;
  NodePtr a, b;
  double eval(double x) const override {
    const double l = a->eval(x), r = b->eval(x);
    switch (op) {
      case '+': return l + r;
      case '-': return l - r;
      case '*': return l * r;
      case '/': return l / r;
      case '^': return std::pow(l, r);
      default: return 0.0;
    }
  }
};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ExprError("expression error at position " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr a = term();
    for (;;) {
      if (eat('+')) a = bin('+', a, term());
      else if (eat('-')) a = bin('-', a, term());
      else return a;
    }
  }
  NodePtr term() {
    NodePtr a = factor();
    for (;;) {
      if (eat('*')) a = bin('*', a, factor());
      else if (eat('/')) a = bin('/', a, factor());
      else return a;
    }
  }
  NodePtr factor() {
    NodePtr a = unary();
    if (eat('^')) return bin('^', a, factor());  // right associative
    return a;
  }
  NodePtr unary() {
    if (eat('-')) {
      auto u = std::make_shared<Unary>();
      u->fn = [](double v) { return -v; };
      u->a = unary();
      return u;
    }
    return primary();
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected character");
  }
  NodePtr number() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    const std::string tok(s_.substr(pos_, end - pos_));
    try {
      const double v = std::stod(tok);
      pos_ = end;
      return std::make_shared<Num>(v);
    } catch (...) {
      fail("bad number '" + tok + "'");
    }
  }
  NodePtr ident() {
    std::size_t end = pos_;
    while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
    const std::string name(s_.substr(pos_, end - pos_));
    pos_ = end;
    if (name == "x") return std::make_shared<Var>();
    if (name == "pi") return std::make_shared<Num>(3.14159265358979323846);
    if (name == "e") return std::make_shared<Num>(2.71828182845904523536);
    if (name == "pow") {
      if (!eat('(')) fail("expected '(' after pow");
      NodePtr a = expr();
      if (!eat(',')) fail("pow needs two arguments");
      NodePtr b = expr();
      if (!eat(')')) fail("expected ')'");
      return bin('^', a, b);
    }
    double (*fn)(double) = nullptr;
    if (name == "abs") fn = [](double v) { return std::abs(v); };
    else if (name == "log") fn = [](double v) { return std::log(v); };
    else if (name == "exp") fn = [](double v) { return std::exp(v); };
    else if (name == "sqrt") fn = [](double v) { return std::sqrt(v); };
    else fail("unknown function '" + name + "'");
    if (!eat('(')) fail("expected '(' after " + name);
    auto u = std::make_shared<Unary>();
    u->fn = fn;
    u->a = expr();
    if (!eat(')')) fail("expected ')'");
    return u;
  }
  static NodePtr bin(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Binary>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
};

}  // namespace expr_detail

/// Compiles the custom generator grammar (arithmetic over `x`, abs, log, exp,
/// sqrt, pow, constants) into an evaluator; `x` is the Euclidean radius |x|.
inline std::function<double(double)> compile_expression(const std::string& text) {
  expr_detail::Parser p(text);
  auto root = p.parse();
  return [root](double x) { return root->eval(x); };
}

}  // namespace molli
