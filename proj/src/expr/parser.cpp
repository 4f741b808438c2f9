#include "expr/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace ioc {

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos); }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  Expr parse_expr() {
    skip_ws();
    bool neg = eat('-');
    Expr acc = parse_term();
    if (neg) acc = -acc;
    while (true) {
      if (eat('+'))
        acc = acc + parse_term();
      else if (eat('-'))
        acc = acc - parse_term();
      else
        break;
    }
    return acc;
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    while (eat('*')) acc = acc * parse_factor();
    return acc;
  }

  Expr parse_factor() {
    Expr base = parse_atom();
    if (!eat('^')) return base;
    skip_ws();
    if (eat('(')) {
      // parenthesized exponent: (1/2), (n) or (-n)
      skip_ws();
      bool neg = eat('-');
      long n = parse_integer();
      skip_ws();
      if (!neg && n == 1 && eat('/')) {
        skip_ws();
        long d = parse_integer();
        if (d != 2) fail("disallowed exponent: only integers and 1/2 are supported");
        if (!eat(')')) fail("expected ')' after exponent");
        return Expr::sqrt(base);
      }
      if (!eat(')')) fail("expected ')' after exponent");
      return Expr::pow(base, static_cast<int>(neg ? -n : n));
    }
    long n = parse_integer();
    return Expr::pow(base, static_cast<int>(n));
  }

  long parse_integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected integer exponent");
    long v = 0;
    std::from_chars(text.data() + start, text.data() + pos, v);
    if (v > 64) fail("exponent too large");
    return v;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of expression");
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos;
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    const char* begin = text.data() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos += static_cast<std::size_t>(end - begin);
    return Expr::constant(v);
  }

  Expr parse_identifier() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string_view name = text.substr(start, pos - start);
    if (name == "x1") return Expr::variable(1);
    if (name == "x2") return Expr::variable(2);
    if (name == "x3") return Expr::variable(3);
    if (name == "pi") return Expr::constant(3.14159265358979323846);

    auto func_arg = [&]() {
      if (!eat('(')) fail("expected '(' after function name");
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')' after function argument");
      return e;
    };
    if (name == "sin") return Expr::sin(func_arg());
    if (name == "cos") return Expr::cos(func_arg());
    if (name == "sqrt") return Expr::sqrt(func_arg());
    if (name == "sign") return Expr::sign(func_arg());
    if (name == "abs") return Expr::abs(func_arg());
    pos = start;
    if (peek() != '\0' && pos + name.size() < text.size() && text[pos + name.size()] == '(')
      fail("disallowed function '" + std::string(name) + "'");
    fail("unknown identifier '" + std::string(name) + "'");
  }
};

}  // namespace

Expr parse(std::string_view text) {
  Parser p{text};
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

}  // namespace ioc
