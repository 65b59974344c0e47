#include "rgbt/tracker.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rgbt {

void TrackerParams::validate() const {
    if (nu < 0.0 || nu > 1.0) throw std::invalid_argument("nu must be in [0,1]");
    if (theta <= 0.0 || theta >= 1.0)
        throw std::invalid_argument("theta must be in (0,1)");
    if (xi <= 0.0) throw std::invalid_argument("xi must be > 0");
    if (scale_count < 1 || scale_count % 2 == 0)
        throw std::invalid_argument("scale_count must be odd");
    if (scale_base <= 1.0) throw std::invalid_argument("scale_base must be > 1");
    if (translation_stride <= 0.0) throw std::invalid_argument("stride must be > 0");
    if (support_budget < 2) throw std::invalid_argument("support_budget too small");
    if (shrink_factor <= 0.0 || shrink_factor >= 1.0)
        throw std::invalid_argument("shrink_factor must be in (0,1)");
}

SeedVector init_seed_vector(const PatchGrid& grid, double shrink_factor) {
    if (shrink_factor <= 0.0 || shrink_factor >= 1.0)
        throw std::invalid_argument("shrink_factor must be in (0,1)");
    SeedVector seed;
    seed.q = Eigen::VectorXd::Zero(kPatchCount);
    const double cx = grid.scaled_w / 2.0;
    const double cy = grid.scaled_h / 2.0;
    const double half_w = shrink_factor * grid.scaled_w / 2.0;
    const double half_h = shrink_factor * grid.scaled_h / 2.0;
    for (int i = 0; i < kPatchCount; ++i) {
        const double px = grid.patch_center_x(i);
        const double py = grid.patch_center_y(i);
        if (px > cx - half_w && px < cx + half_w && py > cy - half_h &&
            py < cy + half_h)
            seed.q(i) = 1.0;
    }
    return seed;
}

namespace {

Eigen::VectorXd normalized_descriptor(const FramePair& frame, const BoundingBox& box,
                                      const Eigen::VectorXd& s_hat,
                                      const Eigen::VectorXd& r) {
    const PatchGrid grid = build_patch_grid(box);
    const auto feats = extract_features(frame, grid, box);
    Eigen::VectorXd psi = assemble_descriptor(feats, s_hat, r);
    const double norm = psi.norm();
    if (norm > 0.0) psi /= norm;
    return psi;
}

struct TrainingSample {
    BoundingBox box;
    Eigen::VectorXd psi;
    double iou_label = 0.0;
    bool is_true_box = false;
    int sample_id = -1;  // index within the frame's structured set
};

double capacity(const SupportVector& sv, double c) {
    return sv.is_positive_anchor ? c : 0.0;
}

// Applies one dual step moving lambda of coefficient mass from minus to plus.
// Returns the applied step.
double smo_pair(DecisionPlane& plane, int plus, int minus, double c) {
    SupportVector& p = plane.support[plus];
    SupportVector& m = plane.support[minus];
    const double denom = (p.psi - m.psi).squaredNorm();
    if (denom <= 1e-14) return 0.0;
    double lambda = (p.gradient - m.gradient) / denom;
    lambda = std::min(lambda, capacity(p, c) - p.beta);
    if (lambda <= 0.0) return 0.0;
    p.beta += lambda;
    m.beta -= lambda;
    const Eigen::VectorXd dir = p.psi - m.psi;
    plane.h += lambda * dir;
    for (auto& sv : plane.support) sv.gradient -= lambda * dir.dot(sv.psi);
    return lambda;
}

int find_anchor(const DecisionPlane& plane, int pattern) {
    for (std::size_t i = 0; i < plane.support.size(); ++i)
        if (plane.support[i].pattern == pattern && plane.support[i].is_positive_anchor)
            return static_cast<int>(i);
    return -1;
}

int add_support(DecisionPlane& plane, const TrainingSample& sample, int pattern) {
    SupportVector sv;
    sv.psi = sample.psi;
    sv.iou_label = sample.iou_label;
    sv.pattern = pattern;
    sv.is_positive_anchor = sample.is_true_box;
    sv.sample_id = sample.sample_id;
    sv.gradient = -(1.0 - sample.iou_label) - plane.h.dot(sample.psi);
    plane.support.push_back(std::move(sv));
    return static_cast<int>(plane.support.size()) - 1;
}

// One ProcessNew step: pair the pattern's feasible argmax against the worst
// violating sample, adding it as a support vector. Returns the violation.
double process_new(DecisionPlane& plane, const std::vector<TrainingSample>& samples,
                   int pattern, double c, double tol) {
    int anchor = find_anchor(plane, pattern);
    if (anchor < 0) {
        for (const auto& s : samples)
            if (s.is_true_box) {
                anchor = add_support(plane, s, pattern);
                break;
            }
    }
    if (anchor < 0) return 0.0;

    // plus: highest gradient among the pattern's SVs that can still grow.
    int plus = -1;
    for (std::size_t i = 0; i < plane.support.size(); ++i) {
        const auto& sv = plane.support[i];
        if (sv.pattern != pattern || sv.beta >= capacity(sv, c)) continue;
        if (plus < 0 || sv.gradient > plane.support[plus].gradient)
            plus = static_cast<int>(i);
    }
    if (plus < 0) return 0.0;

    // minus: worst violating sample of the full structured set.
    int minus_sample = -1;
    double min_grad = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double g =
            -(1.0 - samples[i].iou_label) - plane.h.dot(samples[i].psi);
        if (g < min_grad) {
            min_grad = g;
            minus_sample = static_cast<int>(i);
        }
    }
    if (minus_sample < 0) return 0.0;
    const double violation = plane.support[plus].gradient - min_grad;
    if (violation <= tol) return 0.0;

    // Reuse an existing SV for this sample if one matches, else add it.
    int minus = -1;
    for (std::size_t i = 0; i < plane.support.size(); ++i) {
        const auto& sv = plane.support[i];
        if (sv.pattern == pattern &&
            sv.sample_id == samples[minus_sample].sample_id) {
            minus = static_cast<int>(i);
            break;
        }
    }
    if (minus < 0) minus = add_support(plane, samples[minus_sample], pattern);
    if (minus == plus) return 0.0;
    smo_pair(plane, plus, minus, c);
    return violation;
}

// One Optimize step restricted to the pattern's existing support vectors.
double optimize_pattern(DecisionPlane& plane, int pattern, double c, double tol) {
    int plus = -1, minus = -1;
    for (std::size_t i = 0; i < plane.support.size(); ++i) {
        const auto& sv = plane.support[i];
        if (sv.pattern != pattern) continue;
        if (sv.beta < capacity(sv, c) &&
            (plus < 0 || sv.gradient > plane.support[plus].gradient))
            plus = static_cast<int>(i);
        if (minus < 0 || sv.gradient < plane.support[minus].gradient)
            minus = static_cast<int>(i);
    }
    if (plus < 0 || minus < 0 || plus == minus) return 0.0;
    const double violation =
        plane.support[plus].gradient - plane.support[minus].gradient;
    if (violation <= tol) return 0.0;
    smo_pair(plane, plus, minus, c);
    return violation;
}

std::vector<int> active_patterns(const DecisionPlane& plane) {
    std::vector<int> ids;
    for (const auto& sv : plane.support) {
        bool seen = false;
        for (int id : ids) seen |= id == sv.pattern;
        if (!seen) ids.push_back(sv.pattern);
    }
    return ids;
}

void drop_support(DecisionPlane& plane, int index) {
    plane.support.erase(plane.support.begin() + index);
}

// Removes zero-coefficient vectors (anchors only once their pattern is empty)
// and enforces the budget by evicting the negative vector whose removal,
// with its mass transferred to the pattern anchor, changes h the least.
void maintain_budget(DecisionPlane& plane, int budget) {
    for (int i = static_cast<int>(plane.support.size()) - 1; i >= 0; --i) {
        const auto& sv = plane.support[i];
        if (sv.is_positive_anchor || std::abs(sv.beta) > 1e-12) continue;
        drop_support(plane, i);
    }
    for (int i = static_cast<int>(plane.support.size()) - 1; i >= 0; --i) {
        const auto& sv = plane.support[i];
        if (!sv.is_positive_anchor || std::abs(sv.beta) > 1e-12) continue;
        bool alone = true;
        for (const auto& other : plane.support)
            alone &= other.pattern != sv.pattern || other.is_positive_anchor;
        if (alone) drop_support(plane, i);
    }

    while (static_cast<int>(plane.support.size()) > budget) {
        int victim = -1;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < plane.support.size(); ++i) {
            const auto& sv = plane.support[i];
            if (sv.beta >= 0.0) continue;
            const int anchor = find_anchor(plane, sv.pattern);
            if (anchor < 0) continue;
            const double cost =
                sv.beta * sv.beta *
                (sv.psi - plane.support[anchor].psi).squaredNorm();
            if (cost < best_cost) {
                best_cost = cost;
                victim = static_cast<int>(i);
            }
        }
        if (victim < 0) {
            // No transferable vector; drop the smallest-coefficient one.
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < plane.support.size(); ++i)
                if (std::abs(plane.support[i].beta) < best) {
                    best = std::abs(plane.support[i].beta);
                    victim = static_cast<int>(i);
                }
            const auto& sv = plane.support[victim];
            plane.h -= sv.beta * sv.psi;
        } else {
            const int anchor = find_anchor(plane, plane.support[victim].pattern);
            const auto& sv = plane.support[victim];
            plane.support[anchor].beta += sv.beta;
            const Eigen::VectorXd dh =
                sv.beta * (plane.support[anchor].psi - sv.psi);
            plane.h += dh;
            for (auto& other : plane.support)
                other.gradient -= dh.dot(other.psi);
        }
        drop_support(plane, victim);
        // Anchors left alone with zero mass can go as well.
        for (int i = static_cast<int>(plane.support.size()) - 1; i >= 0; --i) {
            const auto& sv = plane.support[i];
            if (!sv.is_positive_anchor || std::abs(sv.beta) > 1e-12) continue;
            bool alone = true;
            for (const auto& other : plane.support)
                alone &= other.pattern != sv.pattern || other.is_positive_anchor;
            if (alone) drop_support(plane, i);
        }
    }
}

// Offset box whose overlap with `box` hits `target` along direction
// (dx, dy), found by bisection; IoU is monotone in the offset length.
BoundingBox radial_box(const BoundingBox& box, double dx, double dy, double target) {
    double lo = 0.0, hi = box.w + box.h;
    for (int it = 0; it < 50; ++it) {
        const double mid = (lo + hi) / 2.0;
        const BoundingBox cand(box.x + mid * dx, box.y + mid * dy, box.w, box.h);
        if (iou(box, cand) > target) lo = mid;
        else hi = mid;
    }
    return {box.x + lo * dx, box.y + lo * dy, box.w, box.h};
}

std::vector<TrainingSample> structured_samples(const FramePair& frame,
                                               const BoundingBox& accepted,
                                               const TrackerState& state,
                                               const TrackerParams& params) {
    std::vector<TrainingSample> samples;
    TrainingSample truth;
    truth.box = accepted;
    truth.psi = normalized_descriptor(frame, accepted, state.s_hat, state.r);
    truth.iou_label = 1.0;
    truth.is_true_box = true;
    samples.push_back(std::move(truth));

    const int w = frame.images[0].width;
    const int h = frame.images[0].height;
    for (const auto& cand : sample_translation_candidates(accepted, params, w, h)) {
        if (cand == accepted) continue;
        TrainingSample s;
        s.box = cand;
        s.psi = normalized_descriptor(frame, cand, state.s_hat, state.r);
        s.iou_label = iou(accepted, cand);
        samples.push_back(std::move(s));
    }
    // Radial boxes pinned to overlap bands, four per band.
    const double bands[4] = {0.3, 0.5, 0.7, 0.9};
    for (int k = 0; k < 16; ++k) {
        const double angle = 2.0 * M_PI * k / 16.0;
        const BoundingBox cand =
            radial_box(accepted, std::cos(angle), std::sin(angle), bands[k % 4]);
        if (cand.x + cand.w <= 0 || cand.y + cand.h <= 0 || cand.x >= w ||
            cand.y >= h)
            continue;
        TrainingSample s;
        s.box = cand;
        s.psi = normalized_descriptor(frame, cand, state.s_hat, state.r);
        s.iou_label = iou(accepted, cand);
        samples.push_back(std::move(s));
    }
    // Pyramid boxes so the margin also constrains the scale search.
    const int half = (params.scale_count - 1) / 2;
    for (int exp = -half; exp <= half; ++exp) {
        if (exp == 0) continue;
        const double b = std::pow(params.scale_base, exp);
        const BoundingBox cand = BoundingBox::from_center(
            accepted.center_x(), accepted.center_y(), accepted.w * b,
            accepted.h * b);
        if (cand.w < kGridCols || cand.h < kGridRows) continue;
        TrainingSample s;
        s.box = cand;
        s.psi = normalized_descriptor(frame, cand, state.s_hat, state.r);
        s.iou_label = iou(accepted, cand);
        samples.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < samples.size(); ++i)
        samples[i].sample_id = static_cast<int>(i);
    return samples;
}

std::vector<Eigen::MatrixXd> feature_matrices(const FramePair& frame,
                                              const BoundingBox& box) {
    const PatchGrid grid = build_patch_grid(box);
    std::vector<Eigen::MatrixXd> X;
    for (auto& fm : extract_features(frame, grid, box)) X.push_back(std::move(fm.data));
    return X;
}

}  // namespace

std::vector<BoundingBox> sample_translation_candidates(const BoundingBox& prev,
                                                       const TrackerParams& params,
                                                       int frame_width,
                                                       int frame_height) {
    const PatchGrid grid = build_patch_grid(prev);
    const double window_canonical =
        2.0 * std::sqrt(static_cast<double>(grid.scaled_w) * grid.scaled_h);
    const int steps = static_cast<int>(
        std::floor(window_canonical / 2.0 / params.translation_stride));
    const double stride_px = params.translation_stride / grid.scale;

    std::vector<BoundingBox> candidates;
    candidates.reserve((2 * steps + 1) * (2 * steps + 1));
    for (int dy = -steps; dy <= steps; ++dy) {
        for (int dx = -steps; dx <= steps; ++dx) {
            BoundingBox box = prev;
            box.x += dx * stride_px;
            box.y += dy * stride_px;
            if (box.x + box.w <= 0 || box.y + box.h <= 0 || box.x >= frame_width ||
                box.y >= frame_height)
                continue;
            candidates.push_back(box);
        }
    }
    return candidates;
}

double score_candidate(const Eigen::VectorXd& psi, const DecisionPlane& plane,
                       double nu) {
    if (psi.size() != plane.h.size())
        throw std::invalid_argument("score_candidate: descriptor dimension mismatch");
    return nu * plane.h.dot(psi) + (1.0 - nu) * plane.h0.dot(psi);
}

BoundingBox estimate_translation(const FramePair& frame, const TrackerState& state,
                                 const TrackerParams& params) {
    const auto candidates = sample_translation_candidates(
        state.box, params, frame.images[0].width, frame.images[0].height);
    BoundingBox best = state.box;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& cand : candidates) {
        const Eigen::VectorXd psi =
            normalized_descriptor(frame, cand, state.s_hat, state.r);
        const double score = score_candidate(psi, state.plane, params.nu);
        if (score > best_score) {
            best_score = score;
            best = cand;
        }
    }
    return best;
}

BoundingBox estimate_scale(const FramePair& frame, const BoundingBox& translated,
                           const TrackerState& state, const TrackerParams& params) {
    if (params.scale_count <= 1) return translated;
    const int half = (params.scale_count - 1) / 2;
    const double cx = translated.center_x();
    const double cy = translated.center_y();

    BoundingBox best = translated;
    double best_score = score_candidate(
        normalized_descriptor(frame, translated, state.s_hat, state.r), state.plane,
        params.nu);
    for (int exp = -half; exp <= half; ++exp) {
        if (exp == 0) continue;
        const double b = std::pow(params.scale_base, exp);
        const BoundingBox cand = BoundingBox::from_center(
            cx, cy, translated.w * b, translated.h * b);
        if (cand.w < kGridCols || cand.h < kGridRows) continue;
        if (cand.x + cand.w <= 0 || cand.y + cand.h <= 0 ||
            cand.x >= frame.images[0].width || cand.y >= frame.images[0].height)
            continue;
        const double score = score_candidate(
            normalized_descriptor(frame, cand, state.s_hat, state.r), state.plane,
            params.nu);
        if (score > best_score) {
            best_score = score;
            best = cand;
        }
    }
    return best;
}

double confidence(const Eigen::VectorXd& psi, const DecisionPlane& plane) {
    double sum = 0.0;
    int count = 0;
    for (const auto& sv : plane.support) {
        if (sv.beta <= 0.0) continue;
        sum += sv.psi.dot(psi);
        ++count;
    }
    return count > 0 ? sum / count : 0.0;
}

void update_classifier(const FramePair& frame, const BoundingBox& accepted,
                       TrackerState& state, const TrackerParams& params) {
    const auto samples = structured_samples(frame, accepted, state, params);
    DecisionPlane& plane = state.plane;
    const int pattern = plane.next_pattern++;
    const double c = 1.0 / (2.0 * params.xi);

    for (int round = 0; round < params.update_optimize_rounds; ++round) {
        const double violation =
            process_new(plane, samples, pattern, c, params.smo_tolerance);
        for (int id : active_patterns(plane))
            optimize_pattern(plane, id, c, params.smo_tolerance);
        if (violation <= params.smo_tolerance && round > 0) break;
    }
    maintain_budget(plane, params.support_budget);
}

TrackerState tracker_initialize(const FramePair& frame, const BoundingBox& box,
                                const TrackerParams& params,
                                const SolverConfig& solver) {
    params.validate();
    solver.validate();
    if (!box.valid() || box.w < kGridCols || box.h < kGridRows)
        throw std::invalid_argument(
            "tracker_initialize: box smaller than the patch grid");

    TrackerState state;
    state.box = box;
    state.params = params;
    state.solver = solver;

    const PatchGrid grid = build_patch_grid(box);
    const SeedVector seed = init_seed_vector(grid, params.shrink_factor);
    GraphState gs = solve_joint(feature_matrices(frame, box), seed, solver);
    state.s_hat = gs.s_hat;
    state.r = gs.r;
    state.last_solve = std::move(gs);

    const std::size_t dim =
        normalized_descriptor(frame, box, state.s_hat, state.r).size();
    state.plane.h = Eigen::VectorXd::Zero(dim);
    state.plane.h0 = Eigen::VectorXd::Zero(dim);

    const auto samples = structured_samples(frame, box, state, params);
    const double c = 1.0 / (2.0 * params.xi);
    const int pattern = state.plane.next_pattern++;
    for (int epoch = 0; epoch < params.init_epochs; ++epoch) {
        const double violation =
            process_new(state.plane, samples, pattern, c, params.smo_tolerance);
        double worst = violation;
        for (int pass = 0; pass < 4; ++pass)
            worst = std::max(worst, optimize_pattern(state.plane, pattern, c,
                                                     params.smo_tolerance));
        if (worst <= params.smo_tolerance) break;
    }
    maintain_budget(state.plane, params.support_budget);
    state.plane.h0 = state.plane.h;
    return state;
}

BoundingBox track_frame(const FramePair& frame, TrackerState& state) {
    const TrackerParams& params = state.params;
    const BoundingBox translated = estimate_translation(frame, state, params);
    const BoundingBox box = estimate_scale(frame, translated, state, params);

    const Eigen::VectorXd psi =
        normalized_descriptor(frame, box, state.s_hat, state.r);
    const double conf = confidence(psi, state.plane);

    state.last.confidence = conf;
    state.last.scale = box.w / translated.w;
    state.last.updated = conf > params.theta;

    if (state.last.updated) {
        // Refresh the joint weights on the accepted box, then learn with the
        // lagged weights the frame was scored with.
        const PatchGrid grid = build_patch_grid(box);
        const SeedVector seed = init_seed_vector(grid, params.shrink_factor);
        GraphState gs = solve_joint(feature_matrices(frame, box), seed, state.solver);
        update_classifier(frame, box, state, params);
        state.s_hat = gs.s_hat;
        state.r = gs.r;
        state.last_solve = std::move(gs);
    }
    state.box = box;
    ++state.frame_index;
    return box;
}

TrackRunResult track_sequence(const Sequence& seq, const TrackerParams& params,
                              const SolverConfig& solver) {
    if (seq.frame_count() < 1) throw std::invalid_argument("empty sequence");
    TrackRunResult run;
    const BoundingBox init = seq.groundtruth(0)[0];

    TrackerState state = tracker_initialize(seq.frame(0), init, params, solver);
    run.first_solve = state.last_solve;
    run.boxes.push_back(init);
    run.diagnostics.push_back({1.0, 1.0, true});
    run.modality_weights.push_back(state.r);
    run.traces.push_back({0, state.last_solve.objective_trace,
                          state.last_solve.residual_trace});

    for (int t = 1; t < seq.frame_count(); ++t) {
        const BoundingBox box = track_frame(seq.frame(t), state);
        run.boxes.push_back(box);
        run.diagnostics.push_back(state.last);
        run.modality_weights.push_back(state.r);
        if (state.last.updated)
            run.traces.push_back({t, state.last_solve.objective_trace,
                                  state.last_solve.residual_trace});
    }
    return run;
}

}  // namespace rgbt
