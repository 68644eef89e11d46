#pragma once

#include <string>
#include <vector>

namespace polysense::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal self-contained SVG line chart. CSV files remain the normative
/// output; these are reading aids only.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

struct Box {
    std::string label;
    std::vector<double> samples;
};

void write_box_chart(const std::string& path, const std::string& title,
                     const std::string& y_label, const std::vector<Box>& boxes);

}  // namespace polysense::svg
