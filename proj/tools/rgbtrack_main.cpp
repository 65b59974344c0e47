// Command-line front end: track sequences, evaluate result files, generate
// synthetic data, render plots.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "rgbt/dataset.hpp"
#include "rgbt/errors.hpp"
#include "rgbt/evaluation.hpp"
#include "rgbt/plot.hpp"
#include "rgbt/tracker.hpp"

namespace fs = std::filesystem;
using namespace rgbt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("--set " + key + ": not a number: " + value);
    }
}

// Flat key=value overrides shadowing the solver and tracker defaults.
void apply_overrides(const std::vector<std::string>& sets, SolverConfig& solver,
                     TrackerParams& tracker) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got: " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        const double v = parse_double(key, value);
        if (key == "lambda") solver.lambda = v;
        else if (key == "gamma") solver.gamma = v;
        else if (key == "delta") solver.delta = v;
        else if (key == "omega") solver.omega = v;
        else if (key == "alpha") solver.alpha = v;
        else if (key == "beta") solver.beta = v;
        else if (key == "sigma") solver.sigma = v;
        else if (key == "rho") solver.rho = v;
        else if (key == "max_iters") solver.max_outer_iters = static_cast<int>(v);
        else if (key == "tol") solver.tol_residual = v;
        else if (key == "nu") tracker.nu = v;
        else if (key == "theta") tracker.theta = v;
        else if (key == "xi") tracker.xi = v;
        else if (key == "stride") tracker.translation_stride = v;
        else if (key == "scale_base") tracker.scale_base = v;
        else if (key == "scale_count") tracker.scale_count = static_cast<int>(v);
        else if (key == "support_budget") tracker.support_budget = static_cast<int>(v);
        else if (key == "shrink") tracker.shrink_factor = v;
        else if (key == "init_epochs") tracker.init_epochs = static_cast<int>(v);
        else if (key == "optimize_rounds")
            tracker.update_optimize_rounds = static_cast<int>(v);
        else if (key == "smo_tol") tracker.smo_tolerance = v;
        else
            throw std::invalid_argument("--set: unknown parameter '" + key + "'");
    }
    solver.validate();
    tracker.validate();
}

struct TrackArgs {
    std::string manifest;
    std::string out = ".";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool overlay = false;
};

int cmd_track(const TrackArgs& args) {
    SolverConfig solver;
    TrackerParams params;
    apply_overrides(args.sets, solver, params);

    const Sequence seq = load_sequence(args.manifest);
    const std::string name = seq.manifest().name;
    fs::create_directories(args.out);

    const TrackRunResult run = track_sequence(seq, params, solver);
    write_results((fs::path(args.out) / (name + ".txt")).string(), run.boxes);

    {
        std::ofstream log((fs::path(args.out) / (name + "_log.csv")).string());
        log << "frame,confidence,scale,updated";
        for (int m = 0; m < seq.modality_count(); ++m) log << ",r_" << m;
        log << "\n";
        for (std::size_t t = 0; t < run.boxes.size(); ++t) {
            log << t << "," << run.diagnostics[t].confidence << ","
                << run.diagnostics[t].scale << "," << run.diagnostics[t].updated;
            for (int m = 0; m < run.modality_weights[t].size(); ++m)
                log << "," << run.modality_weights[t](m);
            log << "\n";
        }
    }
    {
        std::ofstream trace((fs::path(args.out) / (name + "_trace.csv")).string());
        trace << "frame,iter,objective,residual\n";
        for (const auto& tr : run.traces)
            for (std::size_t i = 0; i < tr.objective.size(); ++i)
                trace << tr.frame << "," << i << "," << tr.objective[i] << ","
                      << tr.residual[i] << "\n";
    }
    if (args.overlay) {
        const fs::path dir = fs::path(args.out) / "overlay";
        fs::create_directories(dir);
        char fname[64];
        for (int t = 0; t < seq.frame_count(); ++t) {
            Image img = seq.frame(t).images[0];
            const BoundingBox& b = run.boxes[t];
            draw_rect(img, b.x, b.y, b.w, b.h, 230, 40, 40);
            std::snprintf(fname, sizeof(fname), "%s_%06d.ppm", name.c_str(), t);
            save_image(img, (dir / fname).string());
        }
    }
    std::cout << "tracked " << seq.frame_count() << " frames -> "
              << (fs::path(args.out) / (name + ".txt")).string() << "\n";
    return kExitOk;
}

struct EvalArgs {
    std::vector<std::string> manifests;
    std::vector<std::string> results;  // one entry per result set (file or dir)
    std::vector<std::string> labels;
    std::vector<std::string> traces;
    std::string out = ".";
    bool plot = false;
    int protocol_skip = 5;
    int protocol_burnin = 10;
};

std::vector<BoundingBox> load_result_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing result file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_groundtruth(buf.str());
}

int cmd_eval(const EvalArgs& args) {
    if (args.manifests.empty()) throw std::invalid_argument("eval needs --manifest");
    if (args.results.empty()) throw std::invalid_argument("eval needs --results");
    fs::create_directories(args.out);
    const ReinitProtocol protocol{args.protocol_skip, args.protocol_burnin};

    std::vector<Sequence> sequences;
    for (const auto& m : args.manifests) sequences.push_back(load_sequence(m));

    const std::vector<double> px_grid = [] {
        std::vector<double> t;
        for (int i = 0; i <= 50; ++i) t.push_back(i);
        return t;
    }();
    const std::vector<double> ov_grid = [] {
        std::vector<double> t;
        for (int i = 0; i <= 20; ++i) t.push_back(i * 0.05);
        return t;
    }();

    PlotSpec precision_plot{"maximum precision rate", "center distance threshold (px)",
                            "precision", {}, 640, 480};
    PlotSpec success_plot{"maximum success rate", "overlap threshold", "success rate",
                          {}, 640, 480};

    for (std::size_t set = 0; set < args.results.size(); ++set) {
        const std::string label = set < args.labels.size()
                                      ? args.labels[set]
                                      : fs::path(args.results[set]).stem().string();
        std::vector<SequenceMetrics> metrics;
        std::vector<std::set<std::string>> tags;
        std::vector<std::vector<double>> eao_curves;
        std::vector<double> mean_precision(px_grid.size(), 0.0);
        std::vector<double> mean_success(ov_grid.size(), 0.0);

        for (const auto& seq : sequences) {
            const fs::path base(args.results[set]);
            const fs::path file = fs::is_directory(base)
                                      ? base / (seq.manifest().name + ".txt")
                                      : base;
            const auto boxes = load_result_file(file.string());
            const auto& gt = seq.groundtruth_all();

            SequenceMetrics m;
            m.name = seq.manifest().name;
            m.mpr20 = mpr(boxes, gt);
            m.msr_auc = msr(boxes, gt);
            const auto ar = accuracy_robustness(replay_driver(boxes), gt, protocol);
            m.accuracy = ar.accuracy;
            m.robustness_failures = ar.failures;
            m.robustness_rate = ar.failure_rate;
            m.failure_frames = ar.failure_frames;
            metrics.push_back(m);
            tags.push_back(seq.manifest().attribute_tags);
            eao_curves.push_back(overlap_series(boxes, gt).overlaps);

            const auto pc = precision_curve(boxes, gt, px_grid);
            const auto sc = success_curve(boxes, gt, ov_grid);
            for (std::size_t i = 0; i < px_grid.size(); ++i) mean_precision[i] += pc[i];
            for (std::size_t i = 0; i < ov_grid.size(); ++i) mean_success[i] += sc[i];
        }
        for (auto& v : mean_precision) v /= sequences.size();
        for (auto& v : mean_success) v /= sequences.size();

        EvalReport report = attribute_report(metrics, tags);
        const auto [eao_value, eao_curve] = eao(eao_curves);
        report.eao_value = eao_value;
        report.eao_curve = eao_curve;

        std::ofstream txt((fs::path(args.out) / ("report_" + label + ".txt")).string());
        txt << report_to_text(report);
        std::ofstream csv((fs::path(args.out) / ("report_" + label + ".csv")).string());
        csv << report_to_csv(report);
        std::cout << "set '" << label << "': MPR@20 " << report.mpr20 << ", MSR "
                  << report.msr_auc << ", EAO " << report.eao_value << "\n";

        precision_plot.series.push_back({label, px_grid, mean_precision});
        success_plot.series.push_back({label, ov_grid, mean_success});
    }

    if (args.plot) {
        write_plot(precision_plot, (fs::path(args.out) / "precision.ppm").string());
        write_plot(success_plot, (fs::path(args.out) / "success.ppm").string());
    }
    if (!args.traces.empty()) {
        PlotSpec conv{"solver convergence", "outer iteration", "objective", {}, 640, 480};
        for (const auto& path : args.traces) {
            std::ifstream in(path);
            if (!in) throw DataError("missing trace file: " + path);
            std::string line;
            std::getline(in, line);  // header
            PlotSeries series{fs::path(path).stem().string(), {}, {}};
            while (std::getline(in, line)) {
                int frame = 0, iter = 0;
                double obj = 0, res = 0;
                if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &frame, &iter, &obj,
                                &res) == 4 &&
                    frame == 0) {
                    series.xs.push_back(iter);
                    series.ys.push_back(obj);
                }
            }
            conv.series.push_back(std::move(series));
        }
        write_plot(conv, (fs::path(args.out) / "convergence.ppm").string());
    }
    return kExitOk;
}

struct SynthArgs {
    std::string out = ".";
    SyntheticConfig cfg;
    std::vector<std::string> occlusions;
};

int cmd_synth(SynthArgs& args) {
    for (const auto& span : args.occlusions) {
        int a = 0, b = 0;
        if (std::sscanf(span.c_str(), "%d:%d", &a, &b) != 2)
            throw std::invalid_argument("--occlude expects from:to, got " + span);
        args.cfg.occlusion_intervals.emplace_back(a, b);
    }
    const std::string manifest = write_synthetic(args.cfg, args.out);
    std::cout << manifest << "\n";
    return kExitOk;
}

struct PlotArgs {
    std::vector<std::string> traces;
    std::string out = "convergence.ppm";
};

int cmd_plot(const PlotArgs& args) {
    PlotSpec conv{"solver convergence", "outer iteration", "objective", {}, 640, 480};
    for (const auto& path : args.traces) {
        std::ifstream in(path);
        if (!in) throw DataError("missing trace file: " + path);
        std::string line;
        std::getline(in, line);
        PlotSeries obj{fs::path(path).stem().string(), {}, {}};
        while (std::getline(in, line)) {
            int frame = 0, iter = 0;
            double o = 0, r = 0;
            if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &frame, &iter, &o, &r) == 4 &&
                frame == 0) {
                obj.xs.push_back(iter);
                obj.ys.push_back(o);
            }
        }
        if (obj.xs.empty()) throw DataError("no frame-0 trace rows in " + path);
        conv.series.push_back(std::move(obj));
    }
    write_plot(conv, args.out);
    std::cout << args.out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RGB-T graph-learning tracker and benchmark evaluator"};
    app.require_subcommand(1);

    TrackArgs track;
    CLI::App* t = app.add_subcommand("track", "track a sequence from a manifest");
    t->add_option("--manifest", track.manifest, "sequence manifest path")->required();
    t->add_option("--out", track.out, "output directory");
    t->add_option("--set", track.sets, "parameter override key=value");
    t->add_option("--seed", track.seed, "rng seed (reserved; tracking is deterministic)");
    t->add_flag("--overlay", track.overlay, "write frames with the predicted box drawn");

    EvalArgs eval;
    CLI::App* e = app.add_subcommand("eval", "evaluate result files against ground truth");
    e->add_option("--manifest", eval.manifests, "sequence manifest (repeatable)");
    e->add_option("--results", eval.results,
                  "result file, or directory of <name>.txt files (one per set)");
    e->add_option("--label", eval.labels, "label for each result set");
    e->add_option("--trace", eval.traces, "solver trace CSV for the convergence plot");
    e->add_option("--out", eval.out, "output directory");
    e->add_flag("--plot", eval.plot, "write precision/success plot images");
    e->add_option("--protocol-skip", eval.protocol_skip, "frames skipped after a failure");
    e->add_option("--protocol-burnin", eval.protocol_burnin,
                  "frames excluded from accuracy after each (re)init");

    SynthArgs synth;
    CLI::App* s = app.add_subcommand("synth", "generate a synthetic RGB-T sequence");
    s->add_option("--out", synth.out, "output directory");
    s->add_option("--name", synth.cfg.name, "sequence name");
    s->add_option("--frames", synth.cfg.frame_count, "frame count");
    s->add_option("--width", synth.cfg.image_width, "image width");
    s->add_option("--height", synth.cfg.image_height, "image height");
    s->add_option("--target-width", synth.cfg.target_width, "target width");
    s->add_option("--target-height", synth.cfg.target_height, "target height");
    s->add_option("--start-x", synth.cfg.start_x, "target start x");
    s->add_option("--start-y", synth.cfg.start_y, "target start y");
    s->add_option("--vx", synth.cfg.velocity_x, "x velocity px/frame");
    s->add_option("--vy", synth.cfg.velocity_y, "y velocity px/frame");
    s->add_option("--rgb-contrast", synth.cfg.rgb_contrast, "visible target contrast");
    s->add_option("--thermal-contrast", synth.cfg.thermal_contrast,
                  "thermal target contrast");
    s->add_option("--noise-sigma", synth.cfg.noise_sigma, "pixel noise sigma");
    s->add_option("--occlude", synth.occlusions, "occlusion interval from:to");
    s->add_option("--seed", synth.cfg.rng_seed, "rng seed");

    PlotArgs plot;
    CLI::App* p = app.add_subcommand("plot", "render a convergence plot from traces");
    p->add_option("--trace", plot.traces, "trace CSV path")->required();
    p->add_option("--out", plot.out, "output image path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*t) return cmd_track(track);
        if (*e) return cmd_eval(eval);
        if (*s) return cmd_synth(synth);
        if (*p) return cmd_plot(plot);
        return kExitUsage;
    } catch (const DataError& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitRuntime;
    }
}
