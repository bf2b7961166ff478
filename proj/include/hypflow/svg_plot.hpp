#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hypflow {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 720;
    int height = 440;
};

/// Static line chart.  Non-finite points (and non-positive ones on a log
/// axis) are skipped.
void write_svg(std::ostream& out, const PlotSpec& spec, std::span<const PlotSeries> series);

}  // namespace hypflow
