#include "rgbt/features.hpp"

#include <cmath>
#include <stdexcept>

namespace rgbt {

PatchGrid build_patch_grid(const BoundingBox& box) {
    if (!box.valid()) throw std::invalid_argument("build_patch_grid: invalid box");
    PatchGrid grid;
    grid.scale = kCanonicalMinSide / std::min(box.w, box.h);
    grid.scaled_w = std::max<int>(kGridCols,
                                  static_cast<int>(std::lround(box.w * grid.scale)));
    grid.scaled_h = std::max<int>(kGridRows,
                                  static_cast<int>(std::lround(box.h * grid.scale)));

    const int base_w = grid.scaled_w / kGridCols;
    const int base_h = grid.scaled_h / kGridRows;
    grid.patches.reserve(kPatchCount);
    int y = 0;
    for (int row = 0; row < kGridRows; ++row) {
        const int h = row == kGridRows - 1 ? grid.scaled_h - y : base_h;
        int x = 0;
        for (int col = 0; col < kGridCols; ++col) {
            const int w = col == kGridCols - 1 ? grid.scaled_w - x : base_w;
            grid.patches.push_back({x, y, w, h});
            x += w;
        }
        y += h;
    }
    return grid;
}

namespace {

void normalize_l1(Eigen::Ref<Eigen::VectorXd> hist) {
    const double sum = hist.sum();
    if (sum > 0.0) hist /= sum;
}

}  // namespace

std::vector<FeatureMatrix> extract_features(const FramePair& frame,
                                            const PatchGrid& grid,
                                            const BoundingBox& box) {
    if (frame.images.empty()) throw std::invalid_argument("extract_features: no images");
    const Image& first = frame.images[0];
    if (box.x + box.w <= 0 || box.y + box.h <= 0 || box.x >= first.width ||
        box.y >= first.height)
        throw std::invalid_argument("extract_features: box fully outside frame");

    std::vector<FeatureMatrix> out;
    out.reserve(frame.images.size());
    const double inv_scale = 1.0 / grid.scale;

    for (std::size_t m = 0; m < frame.images.size(); ++m) {
        const Image& img = frame.images[m];
        const int channels = img.channels;
        const int d = (channels + 1) * kHistogramBins;
        FeatureMatrix fm;
        fm.modality_index = static_cast<int>(m);
        fm.data = Eigen::MatrixXd::Zero(d, kPatchCount);

        for (int p = 0; p < kPatchCount; ++p) {
            const PatchGrid::Rect& rect = grid.patches[p];
            // Sample the patch at canonical resolution; pixel centers map back
            // into the original frame through the box origin and scale.
            Eigen::MatrixXd gray(rect.h, rect.w);
            for (int v = 0; v < rect.h; ++v) {
                const double fy = box.y + (rect.y + v + 0.5) * inv_scale - 0.5;
                for (int u = 0; u < rect.w; ++u) {
                    const double fx = box.x + (rect.x + u + 0.5) * inv_scale - 0.5;
                    double luma = 0.0;
                    for (int c = 0; c < channels; ++c) {
                        const double val = sample_bilinear(img, fx, fy, c);
                        const int bin = std::min(kHistogramBins - 1,
                                                 static_cast<int>(val / 32.0));
                        fm.data(c * kHistogramBins + bin, p) += 1.0;
                        luma += (channels == 3 ? (c == 0   ? 0.299
                                                  : c == 1 ? 0.587
                                                           : 0.114)
                                               : 1.0) *
                                val;
                    }
                    gray(v, u) = luma;
                }
            }
            for (int c = 0; c < channels; ++c)
                normalize_l1(fm.data.block(c * kHistogramBins, p, kHistogramBins, 1)
                                 .col(0));

            // Gradient magnitudes by central differences on the gray patch,
            // edge-replicated at the patch border; bins span [0, patch max].
            Eigen::MatrixXd mag(rect.h, rect.w);
            double max_mag = 0.0;
            for (int v = 0; v < rect.h; ++v) {
                for (int u = 0; u < rect.w; ++u) {
                    const int ul = std::max(0, u - 1), ur = std::min(rect.w - 1, u + 1);
                    const int vt = std::max(0, v - 1), vb = std::min(rect.h - 1, v + 1);
                    const double gx = (gray(v, ur) - gray(v, ul)) / 2.0;
                    const double gy = (gray(vb, u) - gray(vt, u)) / 2.0;
                    mag(v, u) = std::hypot(gx, gy);
                    max_mag = std::max(max_mag, mag(v, u));
                }
            }
            // The bin range floors at one intensity-bin width so that flat
            // patches (max gradient = sub-bin noise) keep a stable histogram
            // instead of normalizing noise up to full range.
            const double range = std::max(max_mag, 32.0);
            const int grad_base = channels * kHistogramBins;
            for (int v = 0; v < rect.h; ++v) {
                for (int u = 0; u < rect.w; ++u) {
                    const int bin = std::min(
                        kHistogramBins - 1,
                        static_cast<int>(mag(v, u) / range * kHistogramBins));
                    fm.data(grad_base + bin, p) += 1.0;
                }
            }
            normalize_l1(fm.data.block(grad_base, p, kHistogramBins, 1).col(0));
        }
        out.push_back(std::move(fm));
    }
    return out;
}

Eigen::VectorXd assemble_descriptor(const std::vector<FeatureMatrix>& features,
                                    const Eigen::VectorXd& patch_weights,
                                    const Eigen::VectorXd& modality_weights) {
    if (features.empty()) throw std::invalid_argument("assemble_descriptor: no features");
    if (modality_weights.size() != static_cast<Eigen::Index>(features.size()))
        throw std::invalid_argument("assemble_descriptor: modality weight count");
    Eigen::Index total = 0;
    for (const auto& fm : features) {
        if (fm.data.cols() != patch_weights.size())
            throw std::invalid_argument("assemble_descriptor: patch weight count");
        total += fm.data.size();
    }
    Eigen::VectorXd psi(total);
    Eigen::Index offset = 0;
    for (std::size_t m = 0; m < features.size(); ++m) {
        const Eigen::MatrixXd& x = features[m].data;
        const double r = modality_weights(static_cast<Eigen::Index>(m));
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            psi.segment(offset, x.rows()) = r * patch_weights(i) * x.col(i);
            offset += x.rows();
        }
    }
    return psi;
}

}  // namespace rgbt
