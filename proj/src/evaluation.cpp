#include "rgbt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "rgbt/dataset.hpp"
#include "rgbt/errors.hpp"

namespace rgbt {

namespace {

void check_lengths(const std::vector<BoundingBox>& results,
                   const std::vector<std::vector<BoundingBox>>& gt) {
    if (gt.empty()) throw DataError("no ground-truth modalities");
    for (const auto& g : gt)
        if (g.size() != results.size())
            throw DataError("result/ground-truth length mismatch: " +
                            std::to_string(results.size()) + " vs " +
                            std::to_string(g.size()));
}

std::vector<double> overlap_grid() {
    std::vector<double> t;
    for (int i = 0; i <= 20; ++i) t.push_back(i * 0.05);
    return t;
}

double trapezoid_auc(const std::vector<double>& xs, const std::vector<double>& ys) {
    double area = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        area += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return area;
}

}  // namespace

OverlapSeries overlap_series(const std::vector<BoundingBox>& results,
                             const std::vector<std::vector<BoundingBox>>& gt) {
    check_lengths(results, gt);
    OverlapSeries out;
    out.center_distances.resize(gt.size());
    for (std::size_t t = 0; t < results.size(); ++t) {
        double best = 0.0;
        for (std::size_t m = 0; m < gt.size(); ++m) {
            best = std::max(best, iou(results[t], gt[m][t]));
            out.center_distances[m].push_back(center_distance(results[t], gt[m][t]));
        }
        out.overlaps.push_back(best);
    }
    return out;
}

double mpr(const std::vector<BoundingBox>& results,
           const std::vector<std::vector<BoundingBox>>& gt, double threshold_px) {
    check_lengths(results, gt);
    if (results.empty()) return 0.0;
    int hits = 0;
    for (std::size_t t = 0; t < results.size(); ++t) {
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& g : gt) dist = std::min(dist, center_distance(results[t], g[t]));
        hits += dist <= threshold_px;
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

std::vector<double> precision_curve(const std::vector<BoundingBox>& results,
                                    const std::vector<std::vector<BoundingBox>>& gt,
                                    const std::vector<double>& thresholds) {
    std::vector<double> curve;
    curve.reserve(thresholds.size());
    for (double t : thresholds) curve.push_back(mpr(results, gt, t));
    return curve;
}

std::vector<double> success_curve(const std::vector<BoundingBox>& results,
                                  const std::vector<std::vector<BoundingBox>>& gt,
                                  const std::vector<double>& thresholds) {
    const OverlapSeries series = overlap_series(results, gt);
    std::vector<double> curve;
    curve.reserve(thresholds.size());
    for (double t : thresholds) {
        int hits = 0;
        for (double o : series.overlaps) hits += o > t;
        curve.push_back(series.overlaps.empty()
                            ? 0.0
                            : static_cast<double>(hits) / series.overlaps.size());
    }
    return curve;
}

double msr(const std::vector<BoundingBox>& results,
           const std::vector<std::vector<BoundingBox>>& gt) {
    const std::vector<double> grid = overlap_grid();
    return trapezoid_auc(grid, success_curve(results, gt, grid));
}

TrackerDriver replay_driver(const std::vector<BoundingBox>& results) {
    TrackerDriver driver;
    driver.init = [](int, const BoundingBox&) {};
    driver.step = [results](int frame) { return results.at(frame); };
    return driver;
}

AccuracyRobustness accuracy_robustness(
    const TrackerDriver& driver,
    const std::vector<std::vector<BoundingBox>>& gt, const ReinitProtocol& protocol) {
    if (gt.empty() || gt[0].empty()) throw DataError("empty ground truth");
    if (protocol.skip_after_failure < 0 || protocol.burn_in < 0)
        throw DataError("protocol constants must be >= 0");
    const int frames = static_cast<int>(gt[0].size());

    AccuracyRobustness out;
    double sum = 0.0;
    int counted = 0;
    int tracked = 0;
    int last_init = 0;
    driver.init(0, gt[0][0]);

    int t = 1;
    while (t < frames) {
        const BoundingBox box = driver.step(t);
        ++tracked;
        double overlap = 0.0;
        for (const auto& g : gt) overlap = std::max(overlap, iou(box, g[t]));
        if (overlap == 0.0) {
            out.failure_frames.push_back(t);
            const int reinit = t + protocol.skip_after_failure;
            if (reinit >= frames) break;
            driver.init(reinit, gt[0][reinit]);
            last_init = reinit;
            t = reinit + 1;
            continue;
        }
        if (t - last_init > protocol.burn_in) {
            sum += overlap;
            ++counted;
        }
        ++t;
    }
    out.failures = static_cast<int>(out.failure_frames.size());
    out.accuracy = counted > 0 ? sum / counted : 0.0;
    out.failure_rate = tracked > 0 ? static_cast<double>(out.failures) / tracked : 0.0;
    return out;
}

std::pair<double, std::vector<double>> eao(
    const std::vector<std::vector<double>>& overlap_curves) {
    if (overlap_curves.empty()) throw DataError("eao: no overlap curves");

    // Zero-pad every curve after its first failure (no reset).
    std::vector<std::vector<double>> curves = overlap_curves;
    std::vector<std::size_t> lengths;
    for (auto& c : curves) {
        if (c.empty()) throw DataError("eao: empty overlap curve");
        bool failed = false;
        for (auto& o : c) {
            if (failed) o = 0.0;
            if (o == 0.0) failed = true;
        }
        lengths.push_back(c.size());
    }
    std::sort(lengths.begin(), lengths.end());
    const double median =
        lengths.size() % 2 == 1
            ? static_cast<double>(lengths[lengths.size() / 2])
            : 0.5 * (lengths[lengths.size() / 2 - 1] + lengths[lengths.size() / 2]);
    const int lo = std::max(1, static_cast<int>(std::llround(0.5 * median)));
    const int hi = std::max(lo, static_cast<int>(std::llround(1.5 * median)));

    // Expected overlap at length L: mean over curves of the mean overlap over
    // frames 1..min(L, len).
    std::vector<double> expected(hi + 1, 0.0);
    for (int len = 1; len <= hi; ++len) {
        double acc = 0.0;
        for (const auto& c : curves) {
            const std::size_t upto = std::min<std::size_t>(len, c.size());
            acc += std::accumulate(c.begin(), c.begin() + upto, 0.0) / upto;
        }
        expected[len] = acc / curves.size();
    }
    double value = 0.0;
    for (int len = lo; len <= hi; ++len) value += expected[len];
    value /= (hi - lo + 1);

    std::vector<double> curve(expected.begin() + 1, expected.end());
    return {value, curve};
}

EvalReport attribute_report(const std::vector<SequenceMetrics>& metrics,
                            const std::vector<std::set<std::string>>& attribute_tags) {
    if (metrics.size() != attribute_tags.size())
        throw DataError("attribute_report: metrics/tags size mismatch");
    EvalReport report;
    report.per_sequence = metrics;
    if (metrics.empty()) return report;

    for (const auto& m : metrics) {
        report.mpr20 += m.mpr20;
        report.msr_auc += m.msr_auc;
        report.accuracy += m.accuracy;
        report.robustness_failures_mean += m.robustness_failures;
        report.robustness_rate += m.robustness_rate;
    }
    const double n = static_cast<double>(metrics.size());
    report.mpr20 /= n;
    report.msr_auc /= n;
    report.accuracy /= n;
    report.robustness_failures_mean /= n;
    report.robustness_rate /= n;

    for (std::size_t i = 0; i < metrics.size(); ++i) {
        for (const auto& code : attribute_tags[i]) {
            if (!is_known_attribute(code))
                throw DataError("unknown attribute code '" + code + "'");
            auto& agg = report.attributes[code];
            ++agg.sequence_count;
            agg.mpr += metrics[i].mpr20;
            agg.msr += metrics[i].msr_auc;
        }
    }
    for (auto& [code, agg] : report.attributes) {
        agg.mpr /= agg.sequence_count;
        agg.msr /= agg.sequence_count;
    }
    return report;
}

std::string report_to_text(const EvalReport& report) {
    std::string out;
    char line[256];
    out += "sequence                        MPR@20   MSR    Accuracy  Robustness (rate)\n";
    for (const auto& m : report.per_sequence) {
        std::snprintf(line, sizeof(line), "%-30s  %6.4f  %6.4f  %6.4f    %d (%.4f)\n",
                      m.name.c_str(), m.mpr20, m.msr_auc, m.accuracy,
                      m.robustness_failures, m.robustness_rate);
        out += line;
    }
    std::snprintf(line, sizeof(line),
                  "%-30s  %6.4f  %6.4f  %6.4f    %.2f (%.4f)\n", "ALL",
                  report.mpr20, report.msr_auc, report.accuracy,
                  report.robustness_failures_mean, report.robustness_rate);
    out += line;
    std::snprintf(line, sizeof(line), "EAO: %.4f\n\n", report.eao_value);
    out += line;

    out += "attribute  sequences  MPR@20   MSR\n";
    for (const auto& code : kAttributeCodes) {
        const auto it = report.attributes.find(code);
        if (it == report.attributes.end()) continue;
        std::snprintf(line, sizeof(line), "%-9s  %9d  %6.4f  %6.4f\n", code.c_str(),
                      it->second.sequence_count, it->second.mpr, it->second.msr);
        out += line;
    }
    return out;
}

std::string report_to_csv(const EvalReport& report) {
    std::string out = "sequence,metric,value\n";
    char line[192];
    const auto row = [&](const std::string& seq, const char* metric, double v) {
        std::snprintf(line, sizeof(line), "%s,%s,%.6f\n", seq.c_str(), metric, v);
        out += line;
    };
    for (const auto& m : report.per_sequence) {
        row(m.name, "mpr20", m.mpr20);
        row(m.name, "msr", m.msr_auc);
        row(m.name, "accuracy", m.accuracy);
        row(m.name, "robustness_failures", m.robustness_failures);
        row(m.name, "robustness_rate", m.robustness_rate);
    }
    row("ALL", "mpr20", report.mpr20);
    row("ALL", "msr", report.msr_auc);
    row("ALL", "accuracy", report.accuracy);
    row("ALL", "robustness_failures", report.robustness_failures_mean);
    row("ALL", "robustness_rate", report.robustness_rate);
    row("ALL", "eao", report.eao_value);
    for (const auto& [code, agg] : report.attributes) {
        row("attribute/" + code, "mpr20", agg.mpr);
        row("attribute/" + code, "msr", agg.msr);
    }
    return out;
}

}  // namespace rgbt
