#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace broucke::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Figure {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
};

/// Standalone SVG: axes with ticks, one polyline per series, legend.
std::string render_svg(const Figure& fig, int width = 720, int height = 480);
void write_svg(const std::filesystem::path& path, const Figure& fig);

/// Whitespace-separated columns x y1 y2 ...; series must share x.
void write_dat(const std::filesystem::path& path, const Figure& fig);

}  // namespace broucke::plot
