#pragma once

#include <charconv>
#include <string>

namespace alaw {

// Locale-free float text. float17 pins 17 significant digits (CSV contract);
// float_short emits the shortest round-trip form (context strings, JSON).
inline std::string float17(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string float_short(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace alaw
