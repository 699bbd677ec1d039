#pragma once

#include <string>
#include <string_view>

namespace ioeval {

// SHA-256 of the input, as 64 lowercase hex characters.
std::string sha256_hex(std::string_view data);

}  // namespace ioeval
