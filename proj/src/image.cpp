#include "rgbt/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "rgbt/errors.hpp"

namespace rgbt {

double sample_bilinear(const Image& img, double x, double y, int c) {
    const auto clampx = [&](int v) { return std::clamp(v, 0, img.width - 1); };
    const auto clampy = [&](int v) { return std::clamp(v, 0, img.height - 1); };
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int x0 = clampx(static_cast<int>(fx));
    const int x1 = clampx(static_cast<int>(fx) + 1);
    const int y0 = clampy(static_cast<int>(fy));
    const int y1 = clampy(static_cast<int>(fy) + 1);
    const double ax = std::clamp(x - fx, 0.0, 1.0);
    const double ay = std::clamp(y - fy, 0.0, 1.0);
    const double top = (1.0 - ax) * img.at(x0, y0, c) + ax * img.at(x1, y0, c);
    const double bot = (1.0 - ax) * img.at(x0, y1, c) + ax * img.at(x1, y1, c);
    return (1.0 - ay) * top + ay * bot;
}

namespace {

// Skips whitespace and '#' comment lines in a PNM header.
int next_header_int(std::istream& in, const std::string& path) {
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF || !std::isdigit(ch)) throw DataError("bad PNM header in " + path);
    int value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        ch = in.get();
    }
    return value;
}

}  // namespace

Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image: " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    int channels = 0;
    if (magic[0] == 'P' && magic[1] == '5') channels = 1;
    else if (magic[0] == 'P' && magic[1] == '6') channels = 3;
    else throw DataError("unsupported image format (want P5/P6 PNM): " + path);

    const int w = next_header_int(in, path);
    const int h = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (w <= 0 || h <= 0 || maxval != 255) throw DataError("bad PNM dimensions in " + path);

    Image img(w, h, channels);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw DataError("truncated image data in " + path);
    return img;
}

void save_image(const Image& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3)
        throw DataError("save_image supports 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write image: " + path);
    out << (img.channels == 1 ? "P5" : "P6") << "\n"
        << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw DataError("failed writing image: " + path);
}

void draw_rect(Image& img, double x, double y, double w, double h,
               std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int x0 = static_cast<int>(std::lround(x));
    const int y0 = static_cast<int>(std::lround(y));
    const int x1 = static_cast<int>(std::lround(x + w)) - 1;
    const int y1 = static_cast<int>(std::lround(y + h)) - 1;
    const std::uint8_t rgb[3] = {r, g, b};
    const auto put = [&](int px, int py) {
        if (px < 0 || py < 0 || px >= img.width || py >= img.height) return;
        for (int c = 0; c < img.channels; ++c)
            img.at(px, py, c) = img.channels == 1 ? rgb[0] : rgb[c];
    };
    for (int px = x0; px <= x1; ++px) { put(px, y0); put(px, y1); }
    for (int py = y0; py <= y1; ++py) { put(x0, py); put(x1, py); }
}

}  // namespace rgbt
