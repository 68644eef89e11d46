#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace polysense::csv {

/// Deterministic float formatting shared by every file writer. Shortest
/// round-trip representation so identical values serialize identically on
/// repeated runs.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double parsed = 0.0;
        std::sscanf(shorter, "%lf", &parsed);
        if (parsed == v) return shorter;
    }
    return buf;
}

/// Splits one CSV line on commas (no quoting; none of our formats need it).
std::vector<std::string> split_line(const std::string& line);

}  // namespace polysense::csv
