#include "convkit/expr.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace convkit::expr {

namespace {

using Fn = std::function<double(double)>;

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression error at position " +
                                std::to_string(pos) + ": " + what);
  }

  Fn parse_expr() {
    Fn acc = parse_term();
    for (;;) {
      if (eat('+')) {
        Fn rhs = parse_term();
        acc = [acc, rhs](double x) { return acc(x) + rhs(x); };
      } else if (eat('-')) {
        Fn rhs = parse_term();
        acc = [acc, rhs](double x) { return acc(x) - rhs(x); };
      } else {
        return acc;
      }
    }
  }

  Fn parse_term() {
    Fn acc = parse_factor();
    for (;;) {
      if (eat('*')) {
        Fn rhs = parse_factor();
        acc = [acc, rhs](double x) { return acc(x) * rhs(x); };
      } else if (eat('/')) {
        Fn rhs = parse_factor();
        acc = [acc, rhs](double x) { return acc(x) / rhs(x); };
      } else {
        return acc;
      }
    }
  }

  Fn parse_factor() {
    // negation binds looser than '^': -x^2 reads -(x^2)
    if (eat('-')) {
      Fn inner = parse_factor();
      return [inner](double x) { return -inner(x); };
    }
    Fn base = parse_primary();
    if (eat('^')) {
      Fn expo = parse_factor();  // right associative
      return [base, expo](double x) { return std::pow(base(x), expo(x)); };
    }
    return base;
  }

  Fn parse_primary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (c == '(') {
      ++pos;
      Fn inner = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t end = pos;
      while (end < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
              s[end] == 'e' || s[end] == 'E' ||
              ((s[end] == '+' || s[end] == '-') && end > pos &&
               (s[end - 1] == 'e' || s[end - 1] == 'E'))))
        ++end;
      const double v = std::stod(s.substr(pos, end - pos));
      pos = end;
      return [v](double) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t end = pos;
      while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
      const std::string name = s.substr(pos, end - pos);
      pos = end;
      if (name == "x") return [](double x) { return x; };
      if (name == "sqrt" || name == "exp") {
        if (!eat('(')) fail("expected '(' after " + name);
        Fn inner = parse_expr();
        if (!eat(')')) fail("expected ')'");
        if (name == "sqrt")
          return [inner](double x) { return std::sqrt(inner(x)); };
        return [inner](double x) { return std::exp(inner(x)); };
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

std::function<double(double)> parse(const std::string& text) {
  Parser p(text);
  Fn fn = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return fn;
}

}  // namespace convkit::expr
