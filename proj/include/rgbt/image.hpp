#ifndef RGBT_IMAGE_HPP_
#define RGBT_IMAGE_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace rgbt {

/// Interleaved 8-bit raster, row-major. channels is 1 (gray) or 3 (RGB).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          pixels(static_cast<std::size_t>(w) * h * c, fill) {}

    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool empty() const { return pixels.empty(); }
};

/// Samples channel c at a fractional position with bilinear interpolation.
/// Coordinates outside the frame are edge-replicated.
double sample_bilinear(const Image& img, double x, double y, int c);

/// Loads a binary PGM (P5, 1 channel) or PPM (P6, 3 channels) file.
Image load_image(const std::string& path);

/// Writes PGM for 1-channel images, PPM for 3-channel images.
void save_image(const Image& img, const std::string& path);

/// Draws a 1-px rectangle outline, clipped to the frame.
void draw_rect(Image& img, double x, double y, double w, double h,
               std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace rgbt

#endif  // RGBT_IMAGE_HPP_
