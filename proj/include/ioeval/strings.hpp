#pragma once

#include <string>
#include <string_view>

namespace ioeval {

// Whitespace here means the ASCII set " \t\r\n\f\v".
std::string trim(std::string_view s);

std::string to_lower(std::string_view s);

// Collapse every run of whitespace to a single space.
std::string collapse_whitespace(std::string_view s);

}  // namespace ioeval
