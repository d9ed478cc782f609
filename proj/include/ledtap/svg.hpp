#pragma once

#include <string>
#include <vector>

namespace ledtap::svg {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f4e9c";
    bool step = false;
};

struct Marker {
    double x;
    double y;
    std::string label;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<Marker> markers;
    bool log_x = false;
    double width = 720;
    double height = 360;
};

/// Standalone SVG document for a line plot.
std::string render(const Plot& plot);

}  // namespace ledtap::svg
