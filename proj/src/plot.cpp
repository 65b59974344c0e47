#include "rgbt/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rgbt/errors.hpp"

namespace rgbt {

namespace {

constexpr int kMarginLeft = 52;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 24;
constexpr int kMarginBottom = 36;

const std::uint8_t kPalette[8][3] = {
    {214, 39, 40},  {31, 119, 180}, {44, 160, 44},  {255, 127, 14},
    {148, 103, 189}, {140, 86, 75},  {23, 190, 207}, {127, 127, 127}};

// 3x5 glyphs for tick labels: digits, '.', '-'.
const char* glyph(char c) {
    switch (c) {
        case '0': return "111101101101111";
        case '1': return "010110010010111";
        case '2': return "111001111100111";
        case '3': return "111001111001111";
        case '4': return "101101111001001";
        case '5': return "111100111001111";
        case '6': return "111100111101111";
        case '7': return "111001010010010";
        case '8': return "111101111101111";
        case '9': return "111101111001111";
        case '.': return "000000000000010";
        case '-': return "000000111000000";
        default: return nullptr;
    }
}

void draw_text(Image& img, int x, int y, const std::string& text) {
    for (char c : text) {
        const char* g = glyph(c);
        if (g) {
            for (int row = 0; row < 5; ++row)
                for (int col = 0; col < 3; ++col)
                    if (g[row * 3 + col] == '1') {
                        const int px = x + col, py = y + row;
                        if (px >= 0 && py >= 0 && px < img.width && py < img.height)
                            for (int ch = 0; ch < img.channels; ++ch)
                                img.at(px, py, ch) = 40;
                    }
        }
        x += 4;
    }
}

void draw_line(Image& img, int x0, int y0, int x1, int y1, const std::uint8_t* rgb) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (x0 >= 0 && y0 >= 0 && x0 < img.width && y0 < img.height)
            for (int c = 0; c < img.channels; ++c) img.at(x0, y0, c) = rgb[c];
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) { err += dy; x0 += sx; }
        if (e2 <= dx) { err += dx; y0 += sy; }
    }
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

Image render_plot(const PlotSpec& spec) {
    Image img(spec.width, spec.height, 3, 255);
    const int x0 = kMarginLeft, x1 = spec.width - kMarginRight;
    const int y0 = spec.height - kMarginBottom, y1 = kMarginTop;

    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (first) {
                xmin = xmax = s.xs[i];
                ymin = ymax = s.ys[i];
                first = false;
            }
            xmin = std::min(xmin, s.xs[i]);
            xmax = std::max(xmax, s.xs[i]);
            ymin = std::min(ymin, s.ys[i]);
            ymax = std::max(ymax, s.ys[i]);
        }
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;

    const auto px = [&](double x) {
        return x0 + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * (x1 - x0)));
    };
    const auto py = [&](double y) {
        return y0 - static_cast<int>(std::lround((y - ymin) / (ymax - ymin) * (y0 - y1)));
    };

    const std::uint8_t black[3] = {0, 0, 0};
    const std::uint8_t gray[3] = {210, 210, 210};
    for (int tick = 0; tick <= 5; ++tick) {
        const double xv = xmin + (xmax - xmin) * tick / 5.0;
        const double yv = ymin + (ymax - ymin) * tick / 5.0;
        draw_line(img, px(xv), y0, px(xv), y1, gray);
        draw_line(img, x0, py(yv), x1, py(yv), gray);
        draw_text(img, px(xv) - 6, y0 + 6, tick_label(xv));
        draw_text(img, 8, py(yv) - 2, tick_label(yv));
    }
    draw_line(img, x0, y0, x1, y0, black);
    draw_line(img, x0, y0, x0, y1, black);

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const std::uint8_t* rgb = kPalette[si % 8];
        const auto& s = spec.series[si];
        for (std::size_t i = 1; i < s.xs.size(); ++i)
            draw_line(img, px(s.xs[i - 1]), py(s.ys[i - 1]), px(s.xs[i]), py(s.ys[i]),
                      rgb);
        // Legend swatch.
        const int ly = y1 + 6 + static_cast<int>(si) * 10;
        for (int dy = 0; dy < 6; ++dy)
            draw_line(img, x1 - 40, ly + dy, x1 - 20, ly + dy, rgb);
    }
    return img;
}

void write_plot(const PlotSpec& spec, const std::string& image_path) {
    save_image(render_plot(spec), image_path);
    std::ofstream meta(image_path + ".meta");
    if (!meta) throw DataError("cannot write plot metadata: " + image_path + ".meta");
    meta << "title = " << spec.title << "\n"
         << "xlabel = " << spec.xlabel << "\n"
         << "ylabel = " << spec.ylabel << "\n";
    for (std::size_t i = 0; i < spec.series.size(); ++i)
        meta << "series." << i << " = " << spec.series[i].label << "\n";
}

}  // namespace rgbt
