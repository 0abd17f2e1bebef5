#pragma once

#include <charconv>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "polelab/jet.hpp"

namespace polelab {

// Radial profile expressions in one variable t.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | base ("^" number)?
//   base   := number | "t" | func "(" expr ")" | "(" expr ")"
//   func   := exp | log | sqrt | sin | cos | tanh | atan
//
// Numbers are unsigned decimal literals (optional exponent part); a pow
// exponent may carry a sign. Constants in a parsed tree are therefore
// nonnegative: negation is always an explicit node.

enum class UnaryFn { neg, exp, log, sqrt, sin, cos, tanh, atan };
enum class BinaryOp { add, sub, mul, div, pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { constant, variable, unary, binary };
  Kind kind = Kind::constant;
  double value = 0.0;  // constant payload
  UnaryFn fn = UnaryFn::neg;
  BinaryOp op = BinaryOp::add;
  ExprPtr a, b;  // operands; unary uses a, pow keeps its exponent in b (a constant)
};

inline ExprPtr make_constant(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::constant;
  e->value = v;
  return e;
}

inline ExprPtr make_variable() {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::variable;
  return e;
}

inline ExprPtr make_unary(UnaryFn fn, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::unary;
  e->fn = fn;
  e->a = std::move(a);
  return e;
}

inline ExprPtr make_binary(BinaryOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::binary;
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

inline ExprPtr make_pow(ExprPtr base, double exponent) {
  return make_binary(BinaryOp::pow, std::move(base), make_constant(exponent));
}

struct ProfileExpr {
  ExprPtr root;
};

struct parse_error : std::runtime_error {
  std::size_t offset;
  parse_error(const std::string& what, std::size_t off)
      : std::runtime_error(what + " at offset " + std::to_string(off)), offset(off) {}
};

inline bool equal(const ExprPtr& x, const ExprPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Expr::Kind::constant:
      return x->value == y->value;
    case Expr::Kind::variable:
      return true;
    case Expr::Kind::unary:
      return x->fn == y->fn && equal(x->a, y->a);
    case Expr::Kind::binary:
      return x->op == y->op && equal(x->a, y->a) && equal(x->b, y->b);
  }
  return false;
}

inline bool operator==(const ProfileExpr& x, const ProfileExpr& y) {
  return equal(x.root, y.root);
}

namespace detail {

struct ProfileParser {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' ||
                                src[pos] == '\n' || src[pos] == '\r'))
      ++pos;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& what, std::size_t at) {
    throw parse_error(what, at);
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }

  double parse_number(bool allow_sign) {
    skip_ws();
    const std::size_t start = pos;
    std::size_t p = pos;
    if (allow_sign && p < src.size() && (src[p] == '+' || src[p] == '-')) ++p;
    std::size_t digits = 0;
    while (p < src.size() && is_digit(src[p])) ++p, ++digits;
    if (p < src.size() && src[p] == '.') {
      ++p;
      while (p < src.size() && is_digit(src[p])) ++p, ++digits;
    }
    if (digits == 0) fail("expected number", start);
    if (p < src.size() && (src[p] == 'e' || src[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < src.size() && (src[q] == '+' || src[q] == '-')) ++q;
      std::size_t exp_digits = 0;
      while (q < src.size() && is_digit(src[q])) ++q, ++exp_digits;
      if (exp_digits > 0) p = q;
    }
    double value = 0.0;
    const auto res = std::from_chars(src.data() + start, src.data() + p, value);
    if (res.ec != std::errc{}) fail("invalid numeric literal", start);
    pos = p;
    return value;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      const char c = peek();
      if (c == '+' || c == '-') {
        ++pos;
        ExprPtr rhs = parse_term();
        lhs = make_binary(c == '+' ? BinaryOp::add : BinaryOp::sub,
                          std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      const char c = peek();
      if (c == '*' || c == '/') {
        ++pos;
        ExprPtr rhs = parse_factor();
        lhs = make_binary(c == '*' ? BinaryOp::mul : BinaryOp::div,
                          std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_factor() {
    if (peek() == '-') {
      ++pos;
      return make_unary(UnaryFn::neg, parse_factor());
    }
    ExprPtr base = parse_base();
    if (peek() == '^') {
      ++pos;
      skip_ws();
      const std::size_t at = pos;
      if (pos >= src.size() ||
          !(is_digit(src[pos]) || src[pos] == '.' || src[pos] == '+' || src[pos] == '-'))
        fail("pow exponent must be a numeric literal", at);
      const double e = parse_number(/*allow_sign=*/true);
      return make_pow(std::move(base), e);
    }
    return base;
  }

  ExprPtr parse_base() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input", pos);
    const char c = src[pos];
    if (is_digit(c) || c == '.') return make_constant(parse_number(false));
    if (c == '(') {
      ++pos;
      ExprPtr inner = parse_expr();
      if (peek() != ')') fail("expected ')'", pos);
      ++pos;
      return inner;
    }
    if (is_alpha(c)) {
      const std::size_t start = pos;
      while (pos < src.size() && is_alpha(src[pos])) ++pos;
      const std::string_view name = src.substr(start, pos - start);
      if (name == "t") return make_variable();
      UnaryFn fn;
      if (name == "exp") fn = UnaryFn::exp;
      else if (name == "log") fn = UnaryFn::log;
      else if (name == "sqrt") fn = UnaryFn::sqrt;
      else if (name == "sin") fn = UnaryFn::sin;
      else if (name == "cos") fn = UnaryFn::cos;
      else if (name == "tanh") fn = UnaryFn::tanh;
      else if (name == "atan") fn = UnaryFn::atan;
      else fail("unknown identifier '" + std::string(name) + "'", start);
      if (peek() != '(') fail("expected '(' after function name", pos);
      ++pos;
      ExprPtr arg = parse_expr();
      if (peek() != ')') fail("expected ')'", pos);
      ++pos;
      return make_unary(fn, std::move(arg));
    }
    fail(std::string("unexpected character '") + c + "'", pos);
  }
};

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Precedence levels: add/sub 1, mul/div 2, neg 3, pow 4, atoms 5. A child is
// parenthesized whenever its level is below what its position requires, which
// makes unparse(parse(s)) re-parse to the identical tree.
inline void unparse_node(const ExprPtr& e, int min_prec, std::string& out) {
  const auto wrap = [&](int prec, auto&& body) {
    const bool parens = prec < min_prec;
    if (parens) out += '(';
    body();
    if (parens) out += ')';
  };
  switch (e->kind) {
    case Expr::Kind::constant:
      out += format_double(e->value);
      return;
    case Expr::Kind::variable:
      out += 't';
      return;
    case Expr::Kind::unary: {
      if (e->fn == UnaryFn::neg) {
        wrap(3, [&] {
          out += '-';
          unparse_node(e->a, 3, out);
        });
        return;
      }
      const char* name = nullptr;
      switch (e->fn) {
        case UnaryFn::exp: name = "exp"; break;
        case UnaryFn::log: name = "log"; break;
        case UnaryFn::sqrt: name = "sqrt"; break;
        case UnaryFn::sin: name = "sin"; break;
        case UnaryFn::cos: name = "cos"; break;
        case UnaryFn::tanh: name = "tanh"; break;
        case UnaryFn::atan: name = "atan"; break;
        case UnaryFn::neg: break;
      }
      out += name;
      out += '(';
      unparse_node(e->a, 1, out);
      out += ')';
      return;
    }
    case Expr::Kind::binary: {
      switch (e->op) {
        case BinaryOp::add:
          wrap(1, [&] {
            unparse_node(e->a, 1, out);
            out += " + ";
            unparse_node(e->b, 2, out);
          });
          return;
        case BinaryOp::sub:
          wrap(1, [&] {
            unparse_node(e->a, 1, out);
            out += " - ";
            unparse_node(e->b, 2, out);
          });
          return;
        case BinaryOp::mul:
          wrap(2, [&] {
            unparse_node(e->a, 2, out);
            out += '*';
            unparse_node(e->b, 3, out);
          });
          return;
        case BinaryOp::div:
          wrap(2, [&] {
            unparse_node(e->a, 2, out);
            out += '/';
            unparse_node(e->b, 3, out);
          });
          return;
        case BinaryOp::pow:
          wrap(4, [&] {
            unparse_node(e->a, 5, out);
            out += '^';
            out += format_double(e->b->value);
          });
          return;
      }
    }
  }
}

}  // namespace detail

inline ProfileExpr parse_profile(std::string_view src) {
  detail::ProfileParser p{src};
  if (src.empty()) throw parse_error("empty profile source", 0);
  ExprPtr root = p.parse_expr();
  p.skip_ws();
  if (p.pos != src.size()) p.fail("unexpected trailing input", p.pos);
  return ProfileExpr{std::move(root)};
}

inline std::string unparse(const ProfileExpr& e) {
  std::string out;
  detail::unparse_node(e.root, 1, out);
  return out;
}

inline Jet2 eval_jet2(const ExprPtr& e, double t) {
  switch (e->kind) {
    case Expr::Kind::constant:
      return Jet2::constant(e->value);
    case Expr::Kind::variable:
      return Jet2::variable(t);
    case Expr::Kind::unary: {
      const Jet2 u = eval_jet2(e->a, t);
      switch (e->fn) {
        case UnaryFn::neg: return -u;
        case UnaryFn::exp: return exp(u);
        case UnaryFn::log: return log(u);
        case UnaryFn::sqrt: return sqrt(u);
        case UnaryFn::sin: return sin(u);
        case UnaryFn::cos: return cos(u);
        case UnaryFn::tanh: return tanh(u);
        case UnaryFn::atan: return atan(u);
      }
      break;
    }
    case Expr::Kind::binary: {
      if (e->op == BinaryOp::pow) return pow(eval_jet2(e->a, t), e->b->value);
      const Jet2 l = eval_jet2(e->a, t);
      const Jet2 r = eval_jet2(e->b, t);
      switch (e->op) {
        case BinaryOp::add: return l + r;
        case BinaryOp::sub: return l - r;
        case BinaryOp::mul: return l * r;
        case BinaryOp::div: return l / r;
        case BinaryOp::pow: break;
      }
      break;
    }
  }
  throw std::logic_error("malformed expression node");
}

inline Jet2 eval_jet2(const ProfileExpr& e, double t) { return eval_jet2(e.root, t); }

}  // namespace polelab
