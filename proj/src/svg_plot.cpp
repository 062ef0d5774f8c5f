#include "fosls/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace fosls {

namespace {

constexpr const char* kColors[] = {"#c0392b", "#2471a3", "#1e8449", "#7d3c98"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

bool usable(double x, double y)
{
    return std::isfinite(x) && std::isfinite(y) && x > 0.0 && y > 0.0;
}

}  // namespace

void write_svg(std::ostream& os, const LogLogPlot& plot)
{
    const double left = 80, right = 20, top = 40, bottom = 60;
    const double w = plot.width - left - right, h = plot.height - top - bottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            xmin = std::min(xmin, std::log10(s.x[i]));
            xmax = std::max(xmax, std::log10(s.x[i]));
            ymin = std::min(ymin, std::log10(s.y[i]));
            ymax = std::max(ymax, std::log10(s.y[i]));
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;

    // Reference line anchored at the last usable point of the first series.
    double ref_x0 = 0, ref_y0 = 0, ref_x1 = 0, ref_y1 = 0;
    bool has_ref = false;
    if (plot.reference && !plot.series.empty()) {
        const auto& s = plot.series.front();
        for (std::size_t i = std::min(s.x.size(), s.y.size()); i-- > 0;)
            if (usable(s.x[i], s.y[i])) {
                ref_x1 = std::log10(s.x[i]);
                ref_y1 = std::log10(s.y[i]);
                has_ref = true;
                break;
            }
        if (has_ref) {
            // Sign follows the x axis: errors fall with h and rise with 1/h.
            ref_x0 = xmin;
            ref_y0 = ref_y1 + plot.reference->slope * (ref_x0 - ref_x1);
            ymin = std::min(ymin, ref_y0);
            ymax = std::max(ymax, ref_y0);
        }
    }
    xmin = std::floor(xmin), xmax = std::ceil(xmax), ymin = std::floor(ymin), ymax = std::ceil(ymax);
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;

    const auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * w; };
    const auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * h; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << num(left + w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
       << "</text>\n";

    for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); ++d) {
        os << "<line x1=\"" << num(px(d)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(d)) << "\" y2=\"" << num(top + h)
           << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << num(px(d)) << "\" y=\"" << num(top + h + 18) << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
        os << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(d)) << "\" x2=\"" << num(left + w) << "\" y2=\"" << num(py(d))
           << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(d) + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
       << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(left + w / 2) << "\" y=\"" << num(top + h + 42) << "\" text-anchor=\"middle\">" << escape(plot.x_label)
       << "</text>\n"
       << "<text transform=\"translate(20," << num(top + h / 2) << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label)
       << "</text>\n";

    double legend_y = top + 16;
    if (has_ref) {
        os << "<line x1=\"" << num(px(ref_x0)) << "\" y1=\"" << num(py(ref_y0)) << "\" x2=\"" << num(px(ref_x1)) << "\" y2=\""
           << num(py(ref_y1)) << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n"
           << "<text x=\"" << num(left + w - 8) << "\" y=\"" << num(legend_y) << "\" text-anchor=\"end\">"
           << escape(plot.reference->label) << "</text>\n";
        legend_y += 16;
    }
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* color = kColors[k % std::size(kColors)];
        std::string points;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double x = px(std::log10(s.x[i])), y = py(std::log10(s.y[i]));
            points += num(x) + "," + num(y) + " ";
            os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
        }
        if (!points.empty()) points.pop_back();
        os << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << color << "\"/>\n"
           << "<text x=\"" << num(left + w - 8) << "\" y=\"" << num(legend_y) << "\" text-anchor=\"end\" fill=\"" << color << "\">"
           << escape(s.label) << "</text>\n";
        legend_y += 16;
    }
    os << "</svg>\n";
}

}  // namespace fosls
