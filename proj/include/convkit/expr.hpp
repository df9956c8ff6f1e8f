#pragma once

#include <functional>
#include <memory>
#include <string>

namespace convkit::expr {

// Parses a 1-d arithmetic expression over the variable x with the grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?          (right associative)
//   unary  := '-' unary | primary
//   primary:= number | 'x' | '(' expr ')' | ('sqrt'|'exp') '(' expr ')'
// Throws std::invalid_argument on syntax errors.
std::function<double(double)> parse(const std::string& text);

}  // namespace convkit::expr
