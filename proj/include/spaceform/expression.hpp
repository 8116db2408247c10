#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace spaceform::expr {

struct ExpressionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Node {
  enum class Kind { Number, Variable, Neg, Call, Add, Sub, Mul, Div, Pow };
  Kind kind;
  double value = 0.0;                    // Number
  int var = -1;                          // Variable
  double (*fn)(double) = nullptr;        // Call
  std::unique_ptr<Node> a, b;

  double eval(const double* args) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Variable: return args[var];
      case Kind::Neg: return -a->eval(args);
      case Kind::Call: return fn(a->eval(args));
      case Kind::Add: return a->eval(args) + b->eval(args);
      case Kind::Sub: return a->eval(args) - b->eval(args);
      case Kind::Mul: return a->eval(args) * b->eval(args);
      case Kind::Div: return a->eval(args) / b->eval(args);
      case Kind::Pow: return std::pow(a->eval(args), b->eval(args));
    }
    return 0.0;
  }
};

using NodePtr = std::unique_ptr<Node>;

inline const std::map<std::string, double (*)(double)>& functions() {
  static const std::map<std::string, double (*)(double)> fns = {
      {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
      {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
      {"sinh", std::sinh}, {"cosh", std::cosh}, {"tanh", std::tanh},
      {"asin", std::asin}, {"acos", std::acos}, {"atan", std::atan},
      {"abs", std::fabs},
  };
  return fns;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ExpressionError(msg + " at position " + std::to_string(pos_) +
                          " in '" + text_ + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(
                                      text_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr sum() {
    NodePtr e = product();
    for (;;) {
      if (eat('+'))
        e = make(Node::Kind::Add, std::move(e), product());
      else if (eat('-'))
        e = make(Node::Kind::Sub, std::move(e), product());
      else
        return e;
    }
  }

  NodePtr product() {
    NodePtr e = unary();
    for (;;) {
      if (eat('*'))
        e = make(Node::Kind::Mul, std::move(e), unary());
      else if (eat('/'))
        e = make(Node::Kind::Div, std::move(e), unary());
      else
        return e;
    }
  }

  // unary minus binds below ^, so -t^2 means -(t^2)
  NodePtr unary() {
    if (eat('-')) return make(Node::Kind::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^'))  // right associative; the exponent may carry a sign
      return make(Node::Kind::Pow, std::move(base), unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = text_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(start, &end);
      if (end == start) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - start);
      auto n = make(Node::Kind::Number);
      n->value = v;
      return n;
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (peek() == '(') {
      auto it = functions().find(name);
      if (it == functions().end()) fail("unknown function '" + name + "'");
      ++pos_;  // consume '('
      NodePtr arg = sum();
      if (!eat(')')) fail("missing ')' after call to '" + name + "'");
      auto n = make(Node::Kind::Call, std::move(arg));
      n->fn = it->second;
      return n;
    }
    if (name == "pi") {
      auto n = make(Node::Kind::Number);
      n->value = M_PI;
      return n;
    }
    if (name == "e") {
      auto n = make(Node::Kind::Number);
      n->value = M_E;
      return n;
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        auto n = make(Node::Kind::Variable);
        n->var = static_cast<int>(i);
        return n;
      }
    }
    fail("unknown identifier '" + name + "'");
  }

  std::string text_;
  std::vector<std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// A parsed scalar expression over named variables.
class Expression {
 public:
  static Expression parse(const std::string& text,
                          const std::vector<std::string>& vars) {
    Expression e;
    e.root_ = std::shared_ptr<const detail::Node>(
        detail::Parser(text, vars).parse().release());
    e.arity_ = static_cast<int>(vars.size());
    return e;
  }

  double operator()(const std::vector<double>& args) const {
    if (static_cast<int>(args.size()) != arity_)
      throw ExpressionError("wrong number of arguments");
    return root_->eval(args.data());
  }

  double eval(const double* args) const { return root_->eval(args); }
  int arity() const { return arity_; }

 private:
  std::shared_ptr<const detail::Node> root_;
  int arity_ = 0;
};

}  // namespace spaceform::expr
