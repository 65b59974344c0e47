#ifndef RGBT_PLOT_HPP_
#define RGBT_PLOT_HPP_

#include <string>
#include <vector>

#include "rgbt/image.hpp"

namespace rgbt {

struct PlotSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<PlotSeries> series;
    int width = 640;
    int height = 480;
};

/// Renders a line plot: axes with numeric tick labels, one colored polyline
/// per series, legend swatches top-right.
Image render_plot(const PlotSpec& spec);

/// Writes the rendered image plus a "<path>.meta" sidecar listing the title,
/// axis labels and series names (one series.N line per curve).
void write_plot(const PlotSpec& spec, const std::string& image_path);

}  // namespace rgbt

#endif  // RGBT_PLOT_HPP_
