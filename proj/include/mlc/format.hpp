#pragma once

#include <string>

namespace mlc {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Inverse of format_double; throws InvalidInput on malformed text.
double parse_double(const std::string& text);

}  // namespace mlc
