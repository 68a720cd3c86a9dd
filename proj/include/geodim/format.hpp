#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace geodim {

/// Shortest decimal string that round-trips to the same double. Used for
/// all machine-readable output so files are byte-stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fixed significant-digit formatting for human-facing tables.
inline std::string format_double_sig(double v, int digits) {
    char buf[48];
    const int len = std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return std::string(buf, buf + len);
}

} // namespace geodim
