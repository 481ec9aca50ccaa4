#pragma once

// Arithmetic expressions in x and t for user-defined problems.
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := ('+' | '-') unary | power
//   power := atom ('^' unary)?
//   atom  := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "fracadapt/errors.hpp"

namespace fracadapt {

class Expression {
 public:
  Expression() = default;

  /// Names besides x and t: pi, e and the entries of `constants`.
  explicit Expression(std::string text, const std::map<std::string, double>& constants = {})
      : text_(std::move(text)) {
    Parser p{text_, 0, constants};
    root_ = p.expr();
    p.skip();
    if (p.pos != text_.size()) p.fail("unexpected '" + std::string(1, text_[p.pos]) + "'");
  }

  bool empty() const noexcept { return !root_; }
  const std::string& text() const noexcept { return text_; }

  double operator()(double x, double t) const {
    if (!root_) throw PreconditionError("expression: empty");
    return eval(*root_, x, t);
  }

 private:
  enum class Op { Num, X, T, Neg, Add, Sub, Mul, Div, Pow, F1, F2 };

  struct Node {
    Op op = Op::Num;
    double value = 0.0;
    double (*f1)(double) = nullptr;
    double (*f2)(double, double) = nullptr;
    std::shared_ptr<const Node> a, b;
  };
  using Ptr = std::shared_ptr<const Node>;

  static double eval(const Node& n, double x, double t) {
    switch (n.op) {
      case Op::Num: return n.value;
      case Op::X: return x;
      case Op::T: return t;
      case Op::Neg: return -eval(*n.a, x, t);
      case Op::Add: return eval(*n.a, x, t) + eval(*n.b, x, t);
      case Op::Sub: return eval(*n.a, x, t) - eval(*n.b, x, t);
      case Op::Mul: return eval(*n.a, x, t) * eval(*n.b, x, t);
      case Op::Div: return eval(*n.a, x, t) / eval(*n.b, x, t);
      case Op::Pow: return std::pow(eval(*n.a, x, t), eval(*n.b, x, t));
      case Op::F1: return n.f1(eval(*n.a, x, t));
      case Op::F2: return n.f2(eval(*n.a, x, t), eval(*n.b, x, t));
    }
    return 0.0;
  }

  static Ptr make(Op op, Ptr a = nullptr, Ptr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;
    const std::map<std::string, double>& constants;

    [[noreturn]] void fail(const std::string& msg) const {
      throw ConfigError("expression '" + s + "' at column " + std::to_string(pos + 1) + ": " + msg);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    Ptr expr() {
      Ptr l = term();
      while (true) {
        if (eat('+')) l = make(Op::Add, l, term());
        else if (eat('-')) l = make(Op::Sub, l, term());
        else return l;
      }
    }
    Ptr term() {
      Ptr l = unary();
      while (true) {
        if (eat('*')) l = make(Op::Mul, l, unary());
        else if (eat('/')) l = make(Op::Div, l, unary());
        else return l;
      }
    }
    Ptr unary() {
      if (eat('-')) return make(Op::Neg, unary());
      if (eat('+')) return unary();
      return power();
    }
    Ptr power() {
      Ptr base = atom();
      if (eat('^')) return make(Op::Pow, base, unary());
      return base;
    }
    Ptr atom() {
      skip();
      if (pos >= s.size()) fail("unexpected end");
      if (eat('(')) {
        Ptr e = expr();
        if (!eat(')')) fail("missing ')'");
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("bad number");
        pos += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Node>();
        n->value = v;
        return n;
      }
      if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail("unexpected '" + std::string(1, c) + "'");
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      const std::string name = s.substr(start, pos - start);
      if (eat('(')) return call(name);
      if (name == "x") return make(Op::X);
      if (name == "t") return make(Op::T);
      auto n = std::make_shared<Node>();
      if (name == "pi") n->value = std::numbers::pi;
      else if (name == "e") n->value = std::numbers::e;
      else if (auto it = constants.find(name); it != constants.end()) n->value = it->second;
      else fail("unknown name '" + name + "'");
      return n;
    }
    Ptr call(const std::string& name) {
      static const std::map<std::string, double (*)(double)> one = {
          {"sin", [](double v) { return std::sin(v); }},     {"cos", [](double v) { return std::cos(v); }},
          {"tan", [](double v) { return std::tan(v); }},     {"exp", [](double v) { return std::exp(v); }},
          {"log", [](double v) { return std::log(v); }},     {"sqrt", [](double v) { return std::sqrt(v); }},
          {"abs", [](double v) { return std::abs(v); }},     {"sinh", [](double v) { return std::sinh(v); }},
          {"cosh", [](double v) { return std::cosh(v); }},   {"tanh", [](double v) { return std::tanh(v); }},
          {"erf", [](double v) { return std::erf(v); }},     {"erfc", [](double v) { return std::erfc(v); }},
          {"gamma", [](double v) { return std::tgamma(v); }}, {"log1p", [](double v) { return std::log1p(v); }},
          {"expm1", [](double v) { return std::expm1(v); }}};
      static const std::map<std::string, double (*)(double, double)> two = {
          {"pow", [](double a, double b) { return std::pow(a, b); }},
          {"min", [](double a, double b) { return std::min(a, b); }},
          {"max", [](double a, double b) { return std::max(a, b); }}};
      Ptr a = expr();
      if (auto it = one.find(name); it != one.end()) {
        if (!eat(')')) fail(name + " takes one argument");
        auto n = std::make_shared<Node>();
        n->op = Op::F1;
        n->f1 = it->second;
        n->a = a;
        return n;
      }
      if (auto it = two.find(name); it != two.end()) {
        if (!eat(',')) fail(name + " takes two arguments");
        Ptr b = expr();
        if (!eat(')')) fail(name + " takes two arguments");
        auto n = std::make_shared<Node>();
        n->op = Op::F2;
        n->f2 = it->second;
        n->a = a;
        n->b = b;
        return n;
      }
      fail("unknown function '" + name + "'");
    }
  };

  std::string text_;
  Ptr root_;
};

}  // namespace fracadapt
