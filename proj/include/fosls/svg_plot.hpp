#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fosls {

struct LogLogSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Reference line y = c x^slope through the last point of the first series.
struct ReferenceSlope {
    double slope = 1.0;
    std::string label;
};

struct LogLogPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<LogLogSeries> series;
    std::optional<ReferenceSlope> reference;
    int width = 640;
    int height = 480;
};

/// Standalone SVG document; nonpositive or non-finite points are skipped.
void write_svg(std::ostream& os, const LogLogPlot& plot);

}  // namespace fosls
