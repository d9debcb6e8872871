#pragma once

#include <cstdio>
#include <string>

namespace sirate {

/// Fixed rendering at a given number of significant digits; all CLI output
/// uses 12 so that reruns can be compared textually.
inline std::string format_significant(double x, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    std::string s(buf);
    if (s == "-0") s = "0";
    return s;
}

} // namespace sirate
