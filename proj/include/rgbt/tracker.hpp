#ifndef RGBT_TRACKER_HPP_
#define RGBT_TRACKER_HPP_

#include <Eigen/Dense>
#include <vector>

#include "rgbt/bbox.hpp"
#include "rgbt/dataset.hpp"
#include "rgbt/features.hpp"
#include "rgbt/graph_solver.hpp"

namespace rgbt {

/// Online tracking parameters. nu blends the current and initial decision
/// planes, theta gates model updates on the confidence score, xi is the
/// structured-SVM regularizer of the margin objective.
struct TrackerParams {
    double nu = 0.67;
    double theta = 0.35;
    double xi = 0.0001;
    double translation_stride = 2.0;  // canonical px between candidate centers
    double scale_base = 1.05;
    int scale_count = 5;  // odd
    int support_budget = 100;
    double shrink_factor = 0.6;  // seed region relative to the box sides
    int init_epochs = 40;        // SMO rounds when learning the first frame
    int update_optimize_rounds = 10;
    double smo_tolerance = 1e-4;

    void validate() const;
};

/// One support vector of the structured SVM: a (normalized) joint descriptor
/// with its dual coefficient and the overlap label against its pattern's
/// accepted box.
struct SupportVector {
    Eigen::VectorXd psi;
    double beta = 0.0;
    double gradient = 0.0;
    double iou_label = 0.0;
    int pattern = 0;
    int sample_id = -1;               // index within its pattern's sample set
    bool is_positive_anchor = false;  // the pattern's accepted box
};

/// Decision plane of the structured SVM plus its support-vector bookkeeping.
struct DecisionPlane {
    Eigen::VectorXd h;
    Eigen::VectorXd h0;  // frozen copy from the first frame
    std::vector<SupportVector> support;
    int next_pattern = 0;
};

/// Per-frame diagnostics surfaced for logs and tests.
struct FrameDiagnostics {
    double confidence = 0.0;
    double scale = 1.0;
    bool updated = false;
};

struct TrackerState {
    BoundingBox box;
    Eigen::VectorXd s_hat;  // lagged patch weights (Eq. 6 uses t-1)
    Eigen::VectorXd r;      // lagged modality weights
    DecisionPlane plane;
    int frame_index = 0;
    TrackerParams params;
    SolverConfig solver;
    FrameDiagnostics last;
    GraphState last_solve;  // most recent joint-solver state (for trace export)
};

/// Binary seed: 1 for patches whose centers fall inside the centered shrunk
/// rectangle of the canonical box.
SeedVector init_seed_vector(const PatchGrid& grid, double shrink_factor);

/// Learns the joint weights and the initial decision plane on the first
/// frame; freezes h0. Throws on boxes smaller than the patch grid.
TrackerState tracker_initialize(const FramePair& frame, const BoundingBox& box,
                                const TrackerParams& params,
                                const SolverConfig& solver);

/// Translation candidates: boxes of the previous size whose centers lie on a
/// stride-spaced grid inside the search window of side 2*sqrt(W*H) (canonical
/// dims), clipped to boxes that still intersect the frame. Row-major order.
std::vector<BoundingBox> sample_translation_candidates(const BoundingBox& prev,
                                                       const TrackerParams& params,
                                                       int frame_width,
                                                       int frame_height);

/// Blended classifier score nu*<h, psi> + (1-nu)*<h0, psi>.
double score_candidate(const Eigen::VectorXd& psi, const DecisionPlane& plane,
                       double nu);

/// Argmax of the blended score over the sampled candidates; ties keep the
/// first candidate in grid order.
BoundingBox estimate_translation(const FramePair& frame, const TrackerState& state,
                                 const TrackerParams& params);

/// Scores the scale pyramid a^{-(N-1)/2 .. (N-1)/2} around the translated box
/// and returns the best-scoring scale applied to it. Ties keep the identity.
BoundingBox estimate_scale(const FramePair& frame, const BoundingBox& translated,
                           const TrackerState& state, const TrackerParams& params);

/// Mean inner product between psi and the positive support vectors; 0 when
/// there are none.
double confidence(const Eigen::VectorXd& psi, const DecisionPlane& plane);

/// One online SMO round on structured samples around the accepted box, with
/// budget maintenance. h0 is never modified.
void update_classifier(const FramePair& frame, const BoundingBox& accepted,
                       TrackerState& state, const TrackerParams& params);

/// Full per-frame pipeline: translation, scale, confidence gate, optional
/// joint-weight refresh and classifier update. Advances the state.
BoundingBox track_frame(const FramePair& frame, TrackerState& state);

/// Runs the tracker over a whole sequence; returns one box per frame (the
/// first one is the ground-truth initialization).
struct SolveTrace {
    int frame = 0;
    std::vector<double> objective;
    std::vector<double> residual;
};
struct TrackRunResult {
    std::vector<BoundingBox> boxes;
    std::vector<FrameDiagnostics> diagnostics;
    std::vector<Eigen::VectorXd> modality_weights;  // r used per frame
    GraphState first_solve;                         // solver state of frame 0
    std::vector<SolveTrace> traces;                 // one per joint solve
};
TrackRunResult track_sequence(const Sequence& seq, const TrackerParams& params,
                              const SolverConfig& solver);

}  // namespace rgbt

#endif  // RGBT_TRACKER_HPP_
