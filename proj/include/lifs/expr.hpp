#pragma once

#include <functional>
#include <string>

#include "lifs/common.hpp"

namespace lifs {

/// Parse a one-variable arithmetic expression in x.  Grammar: numbers, x,
/// + - * / ^ (right-associative), parentheses, unary minus, and the
/// functions exp, pow, sin, cos, sqrt.
std::function<double(double)> parse_expression(const std::string& text);

}  // namespace lifs
