#ifndef RGBT_FEATURES_HPP_
#define RGBT_FEATURES_HPP_

#include <Eigen/Dense>
#include <vector>

#include "rgbt/bbox.hpp"
#include "rgbt/dataset.hpp"

namespace rgbt {

constexpr int kGridRows = 8;
constexpr int kGridCols = 8;
constexpr int kPatchCount = kGridRows * kGridCols;
constexpr int kHistogramBins = 8;
constexpr int kCanonicalMinSide = 32;

/// Non-overlapping patch tiling of a bounding box rescaled so its minimum
/// side is 32 px. Remainder pixels from non-divisible sides go to the last
/// row/column.
struct PatchGrid {
    double scale = 1.0;    // canonical px per original px
    int scaled_w = 0;      // canonical box width
    int scaled_h = 0;      // canonical box height
    struct Rect {
        int x, y, w, h;    // canonical coordinates inside the box
    };
    std::vector<Rect> patches;  // row-major, kPatchCount entries

    double patch_center_x(int i) const {
        return patches[i].x + patches[i].w / 2.0;
    }
    double patch_center_y(int i) const {
        return patches[i].y + patches[i].h / 2.0;
    }
};

/// Per-modality descriptor matrix: one column per patch, each column a
/// concatenation of L1-normalized 8-bin histograms (one per color channel
/// plus one gradient histogram).
struct FeatureMatrix {
    Eigen::MatrixXd data;  // d_m x n
    int modality_index = 0;
};

PatchGrid build_patch_grid(const BoundingBox& box);

/// Color (per-channel intensity) and gradient-magnitude histograms for every
/// patch of every modality. Out-of-frame samples are edge-replicated.
/// Throws if the box does not intersect the frame.
std::vector<FeatureMatrix> extract_features(const FramePair& frame,
                                            const PatchGrid& grid,
                                            const BoundingBox& box);

/// Joint weighted descriptor: modality-major, patch-major concatenation of
/// r_m * s_hat_i * x^m_i.
Eigen::VectorXd assemble_descriptor(const std::vector<FeatureMatrix>& features,
                                    const Eigen::VectorXd& patch_weights,
                                    const Eigen::VectorXd& modality_weights);

}  // namespace rgbt

#endif  // RGBT_FEATURES_HPP_
