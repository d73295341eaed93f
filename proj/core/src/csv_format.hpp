#pragma once

#include <cstdio>
#include <string>

namespace pulsecomp::detail {

/// Shortest representation that round-trips a double, "%.17g" style.
/// Infinities print as "inf"/"-inf".
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace pulsecomp::detail
