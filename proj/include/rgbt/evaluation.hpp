#ifndef RGBT_EVALUATION_HPP_
#define RGBT_EVALUATION_HPP_

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rgbt/bbox.hpp"

namespace rgbt {

/// Per-frame overlaps (max over modalities) and per-modality center distances.
struct OverlapSeries {
    std::vector<double> overlaps;
    std::vector<std::vector<double>> center_distances;  // [modality][frame]
};

OverlapSeries overlap_series(const std::vector<BoundingBox>& results,
                             const std::vector<std::vector<BoundingBox>>& gt);

/// Fraction of frames whose smaller-over-modalities center distance is within
/// threshold_px.
double mpr(const std::vector<BoundingBox>& results,
           const std::vector<std::vector<BoundingBox>>& gt,
           double threshold_px = 20.0);

/// MPR as a function of the distance threshold (for precision plots).
std::vector<double> precision_curve(const std::vector<BoundingBox>& results,
                                    const std::vector<std::vector<BoundingBox>>& gt,
                                    const std::vector<double>& thresholds);

/// Success rate SR(t) on the 21-point overlap grid {0, 0.05, ..., 1} using
/// the larger-over-modalities overlap, reduced to its trapezoidal AUC.
double msr(const std::vector<BoundingBox>& results,
           const std::vector<std::vector<BoundingBox>>& gt);

std::vector<double> success_curve(const std::vector<BoundingBox>& results,
                                  const std::vector<std::vector<BoundingBox>>& gt,
                                  const std::vector<double>& thresholds);

/// Reset-protocol constants for the accuracy/robustness run.
struct ReinitProtocol {
    int skip_after_failure = 5;
    int burn_in = 10;
};

/// Anything the reset protocol can drive: (re)initialize at a frame with a
/// given box, then produce one box per subsequent frame.
struct TrackerDriver {
    std::function<void(int frame, const BoundingBox& box)> init;
    std::function<BoundingBox(int frame)> step;
};

/// Driver that replays boxes from a result file (reinitialization is a no-op
/// beyond bookkeeping).
TrackerDriver replay_driver(const std::vector<BoundingBox>& results);

struct AccuracyRobustness {
    double accuracy = 0.0;
    int failures = 0;
    double failure_rate = 0.0;  // failures per tracked frame
    std::vector<int> failure_frames;
};

/// Runs the tracker with resets: a failure is a frame whose overlap (max over
/// modalities) is zero; the tracker is reinitialized on ground truth
/// skip_after_failure frames later; the burn_in frames after each (re)init are
/// excluded from the accuracy average, as are failure frames.
AccuracyRobustness accuracy_robustness(
    const TrackerDriver& driver,
    const std::vector<std::vector<BoundingBox>>& gt, const ReinitProtocol& protocol);

/// Expected average overlap over no-reset curves. Curves are zeroed after
/// their first failure; the expected overlap at length L averages each
/// curve's mean overlap over frames 1..min(L, len); EAO averages lengths in
/// [0.5, 1.5] x median length. Returns the EAO value and the expected-overlap
/// curve for lengths 1..ceil(1.5 x median).
std::pair<double, std::vector<double>> eao(
    const std::vector<std::vector<double>>& overlap_curves);

struct SequenceMetrics {
    std::string name;
    double mpr20 = 0.0;
    double msr_auc = 0.0;
    double accuracy = 0.0;
    int robustness_failures = 0;
    double robustness_rate = 0.0;
    std::vector<int> failure_frames;
};

struct AttributeAggregate {
    int sequence_count = 0;
    double mpr = 0.0;
    double msr = 0.0;
};

struct EvalReport {
    std::vector<SequenceMetrics> per_sequence;
    double mpr20 = 0.0;
    double msr_auc = 0.0;
    double accuracy = 0.0;
    double robustness_failures_mean = 0.0;
    double robustness_rate = 0.0;
    double eao_value = 0.0;
    std::vector<double> eao_curve;
    // Keyed by attribute code; only codes carried by at least one sequence.
    std::map<std::string, AttributeAggregate> attributes;
};

/// Aggregates per-sequence metrics and attribute breakdowns. attribute_tags
/// is aligned with metrics; unknown codes raise DataError naming the code.
EvalReport attribute_report(const std::vector<SequenceMetrics>& metrics,
                            const std::vector<std::set<std::string>>& attribute_tags);

std::string report_to_text(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);

}  // namespace rgbt

#endif  // RGBT_EVALUATION_HPP_
