#pragma once

#include <cctype>
#include <charconv>
#include <memory>
#include <string>
#include <vector>

#include "holocheck/jet.hpp"

namespace holocheck {

// Closed-form expressions in one real variable t: polynomials, sin, cos, exp,
// complex constants (i, pi, numeric literals), +, -, *, /, integer powers.
// Evaluation runs on derivative jets, so an expression supplies its own
// derivatives up to order 3.
class Expression {
 public:
  static Expression parse(const std::string& text) {
    Parser p(text);
    Expression e;
    e.text_ = text;
    e.root_ = p.parse_expression();
    p.expect_end();
    return e;
  }

  Jet eval(const Jet& t) const { return eval_node(*root_, t); }
  cplx eval(double t) const { return eval_node(*root_, Jet(cplx(t), 0)).value(); }
  const std::string& text() const { return text_; }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  enum class Kind { constant, variable, add, sub, mul, div, neg, pow, fn_sin, fn_cos, fn_exp };

  struct Node {
    Kind kind;
    cplx value{};    // constant
    int exponent{};  // pow
    NodePtr a, b;
  };

  static Jet eval_node(const Node& n, const Jet& t) {
    switch (n.kind) {
      case Kind::constant: return Jet(n.value, t.order);
      case Kind::variable: return t;
      case Kind::add: return eval_node(*n.a, t) + eval_node(*n.b, t);
      case Kind::sub: return eval_node(*n.a, t) - eval_node(*n.b, t);
      case Kind::mul: return eval_node(*n.a, t) * eval_node(*n.b, t);
      case Kind::div: return eval_node(*n.a, t) / eval_node(*n.b, t);
      case Kind::neg: return -eval_node(*n.a, t);
      case Kind::pow: return pow_int(eval_node(*n.a, t), n.exponent);
      case Kind::fn_sin: return sin(eval_node(*n.a, t));
      case Kind::fn_cos: return cos(eval_node(*n.a, t));
      case Kind::fn_exp: return exp(eval_node(*n.a, t));
    }
    throw std::logic_error("Expression: unreachable node kind");
  }

  class Parser {
   public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse_expression() {
      NodePtr lhs = parse_term();
      for (;;) {
        skip_ws();
        if (accept('+')) lhs = binary(Kind::add, lhs, parse_term());
        else if (accept('-')) lhs = binary(Kind::sub, lhs, parse_term());
        else return lhs;
      }
    }

    void expect_end() {
      skip_ws();
      if (pos_ != s_.size()) fail("unexpected trailing input");
    }

   private:
    NodePtr parse_term() {
      NodePtr lhs = parse_unary();
      for (;;) {
        skip_ws();
        if (accept('*')) lhs = binary(Kind::mul, lhs, parse_unary());
        else if (accept('/')) lhs = binary(Kind::div, lhs, parse_unary());
        else return lhs;
      }
    }

    NodePtr parse_unary() {
      skip_ws();
      if (accept('-')) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::neg;
        n->a = parse_unary();
        return n;
      }
      if (accept('+')) return parse_unary();
      return parse_power();
    }

    NodePtr parse_power() {
      NodePtr base = parse_atom();
      skip_ws();
      if (!accept('^')) return base;
      skip_ws();
      int sign = 1;
      if (accept('-')) sign = -1;
      skip_ws();
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        fail("exponent must be an integer literal");
      int e = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        e = e * 10 + (s_[pos_] - '0');
        if (e > 64) fail("exponent too large");
        ++pos_;
      }
      auto n = std::make_shared<Node>();
      n->kind = Kind::pow;
      n->exponent = sign * e;
      n->a = base;
      return n;
    }

    NodePtr parse_atom() {
      skip_ws();
      if (pos_ >= s_.size()) fail("unexpected end of expression");
      const char c = s_[pos_];
      if (c == '(') {
        ++pos_;
        NodePtr inner = parse_expression();
        skip_ws();
        if (!accept(')')) fail("missing ')'");
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
      if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
      fail(std::string("unexpected character '") + c + "'");
      return nullptr;
    }

    NodePtr parse_number() {
      double v = 0.0;
      const char* begin = s_.data() + pos_;
      const char* end = s_.data() + s_.size();
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc()) fail("malformed number");
      pos_ = static_cast<std::size_t>(ptr - s_.data());
      return constant(cplx(v));
    }

    NodePtr parse_ident() {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "t") {
        auto n = std::make_shared<Node>();
        n->kind = Kind::variable;
        return n;
      }
      if (name == "i") return constant(cplx(0.0, 1.0));
      if (name == "pi") return constant(cplx(kPi));
      Kind fk;
      if (name == "sin") fk = Kind::fn_sin;
      else if (name == "cos") fk = Kind::fn_cos;
      else if (name == "exp") fk = Kind::fn_exp;
      else { fail("unknown identifier '" + name + "'"); return nullptr; }
      skip_ws();
      if (!accept('(')) fail("expected '(' after function name");
      NodePtr arg = parse_expression();
      skip_ws();
      if (!accept(')')) fail("missing ')'");
      auto n = std::make_shared<Node>();
      n->kind = fk;
      n->a = arg;
      return n;
    }

    static NodePtr constant(cplx v) {
      auto n = std::make_shared<Node>();
      n->kind = Kind::constant;
      n->value = v;
      return n;
    }

    static NodePtr binary(Kind k, NodePtr a, NodePtr b) {
      auto n = std::make_shared<Node>();
      n->kind = k;
      n->a = std::move(a);
      n->b = std::move(b);
      return n;
    }

    void skip_ws() {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
      if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
      return false;
    }

    [[noreturn]] void fail(const std::string& why) const {
      throw std::invalid_argument("expression parse error at position " +
                                  std::to_string(pos_) + ": " + why + " in \"" + s_ + "\"");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
  };

  NodePtr root_;
  std::string text_;
};

}  // namespace holocheck
