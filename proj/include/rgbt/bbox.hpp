#ifndef RGBT_BBOX_HPP_
#define RGBT_BBOX_HPP_

#include <algorithm>
#include <cmath>

namespace rgbt {

/// Axis-aligned rectangle in frame pixel coordinates (0-based, top-left origin).
/// Width and height must be strictly positive.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    BoundingBox() = default;
    BoundingBox(double x_, double y_, double w_, double h_) : x(x_), y(y_), w(w_), h(h_) {}

    bool valid() const { return w > 0.0 && h > 0.0; }
    double area() const { return w * h; }
    double center_x() const { return x + w / 2.0; }
    double center_y() const { return y + h / 2.0; }

    static BoundingBox from_center(double cx, double cy, double w_, double h_) {
        return {cx - w_ / 2.0, cy - h_ / 2.0, w_, h_};
    }

    bool operator==(const BoundingBox& o) const {
        return x == o.x && y == o.y && w == o.w && h == o.h;
    }
};

/// Euclidean distance between box centers, in pixels.
inline double center_distance(const BoundingBox& a, const BoundingBox& b) {
    return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

/// Intersection-over-union with the continuous-area convention.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace rgbt

#endif  // RGBT_BBOX_HPP_
