#pragma once

#include <charconv>
#include <string>

namespace twofold::detail {

// Shortest text that parses back to the same double.
inline std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

}  // namespace twofold::detail
