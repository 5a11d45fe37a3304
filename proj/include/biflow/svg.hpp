#pragma once

#include <array>
#include <string>
#include <vector>

namespace biflow {

struct ScatterGroup {
    std::string label;
    std::string color;
    double radius = 2.0;
    std::vector<std::array<double, 2>> points;
};

struct LineSeries {
    std::string label;
    std::string color;
    std::vector<std::array<double, 2>> points;
};

// Minimal SVG 1.1 emitters: circles, polylines, axis lines, tick labels, and
// a legend. No external plotting dependency.
std::string scatter_svg(const std::vector<ScatterGroup>& groups, int width = 640,
                        int height = 640);

std::string line_chart_svg(const std::vector<LineSeries>& series, const std::string& x_label,
                           const std::string& y_label, int width = 640, int height = 480,
                           bool log_x = false);

}  // namespace biflow
