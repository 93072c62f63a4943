#pragma once

// Plain SVG 1.1 charts with a fixed layout: 640x400 canvas, plot area
// inset 70px left, 30px top, 150px right (legend), 60px bottom, y axis
// from 0 to 1 with gridlines every 0.2. Numbers are printed with two
// decimals so output is byte-stable.

#include <string>
#include <vector>

namespace jobmatch {

struct BarGroup {
    std::string label;           // e.g. pipeline name
    std::vector<double> values;  // one per series, each in [0, 1]
};

// Groups along x, one bar per series inside each group.
std::string grouped_bar_chart(const std::string& title, const std::vector<std::string>& series,
                              const std::vector<BarGroup>& groups);

struct LineSeries {
    std::string label;
    std::vector<double> y;  // aligned with the x values, each in [0, 1]
};

// x values are placed evenly in the given order and labelled with x_labels.
std::string line_chart(const std::string& title, const std::string& x_axis_label,
                       const std::vector<std::string>& x_labels, const std::vector<LineSeries>& series);

}  // namespace jobmatch
