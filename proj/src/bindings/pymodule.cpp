#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rgbt/dataset.hpp"
#include "rgbt/evaluation.hpp"
#include "rgbt/tracker.hpp"

namespace py = pybind11;
using namespace rgbt;

namespace {

Image image_from_array(const py::array_t<std::uint8_t, py::array::c_style |
                                                            py::array::forcecast>& arr) {
    if (arr.ndim() != 2 && arr.ndim() != 3)
        throw std::invalid_argument("expected HxW or HxWxC uint8 array");
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    const int c = arr.ndim() == 3 ? static_cast<int>(arr.shape(2)) : 1;
    if (c != 1 && c != 3) throw std::invalid_argument("expected 1 or 3 channels");
    Image img(w, h, c);
    std::memcpy(img.pixels.data(), arr.data(), img.pixels.size());
    return img;
}

py::array_t<std::uint8_t> image_to_array(const Image& img) {
    py::array_t<std::uint8_t> arr(
        {static_cast<py::ssize_t>(img.height), static_cast<py::ssize_t>(img.width),
         static_cast<py::ssize_t>(img.channels)});
    std::memcpy(arr.mutable_data(), img.pixels.data(), img.pixels.size());
    return arr;
}

FramePair frame_from_arrays(const std::vector<py::array_t<std::uint8_t>>& images,
                            int index) {
    FramePair fp;
    fp.index = index;
    for (const auto& arr : images) fp.images.push_back(image_from_array(arr));
    return fp;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "RGB-T graph-learning tracker core";

    py::class_<BoundingBox>(m, "BoundingBox")
        .def(py::init<double, double, double, double>(), py::arg("x"), py::arg("y"),
             py::arg("w"), py::arg("h"))
        .def_readwrite("x", &BoundingBox::x)
        .def_readwrite("y", &BoundingBox::y)
        .def_readwrite("w", &BoundingBox::w)
        .def_readwrite("h", &BoundingBox::h)
        .def("center", [](const BoundingBox& b) {
            return py::make_tuple(b.center_x(), b.center_y());
        })
        .def("__repr__", [](const BoundingBox& b) {
            return "BoundingBox(" + std::to_string(b.x) + ", " + std::to_string(b.y) +
                   ", " + std::to_string(b.w) + ", " + std::to_string(b.h) + ")";
        });

    m.def("iou", &iou, py::arg("a"), py::arg("b"));
    m.def("parse_groundtruth", &parse_groundtruth, py::arg("text"));
    m.def("format_results", &format_results, py::arg("boxes"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("lambda_", &SolverConfig::lambda)
        .def_readwrite("gamma", &SolverConfig::gamma)
        .def_readwrite("delta", &SolverConfig::delta)
        .def_readwrite("omega", &SolverConfig::omega)
        .def_readwrite("alpha", &SolverConfig::alpha)
        .def_readwrite("beta", &SolverConfig::beta)
        .def_readwrite("sigma", &SolverConfig::sigma)
        .def_readwrite("rho", &SolverConfig::rho)
        .def_readwrite("max_outer_iters", &SolverConfig::max_outer_iters)
        .def_readwrite("tol_residual", &SolverConfig::tol_residual);

    py::class_<GraphState>(m, "GraphState")
        .def_readonly("Z", &GraphState::Z)
        .def_readonly("A", &GraphState::A)
        .def_readonly("s", &GraphState::s)
        .def_readonly("s_hat", &GraphState::s_hat)
        .def_readonly("r", &GraphState::r)
        .def_readonly("gamma_reg", &GraphState::gamma_reg)
        .def_readonly("objective_trace", &GraphState::objective_trace)
        .def_readonly("residual_trace", &GraphState::residual_trace);

    m.def("prox_l21", &prox_l21, py::arg("m"), py::arg("tau"));
    m.def("project_simplex", &project_simplex, py::arg("v"));
    m.def("update_affinity", &update_affinity, py::arg("Z"), py::arg("delta"),
          py::arg("omega"));
    m.def("update_weights_s", &update_weights_s, py::arg("A"), py::arg("q"),
          py::arg("alpha"), py::arg("beta"));
    m.def("update_modality_weights", &update_modality_weights, py::arg("errors"),
          py::arg("gamma_reg"));
    m.def("sigmoid_map", &sigmoid_map, py::arg("s"), py::arg("sigma"));
    m.def(
        "solve_joint",
        [](const std::vector<Eigen::MatrixXd>& X, const Eigen::VectorXd& q,
           const SolverConfig& cfg) {
            SeedVector seed;
            seed.q = q;
            return solve_joint(X, seed, cfg);
        },
        py::arg("X"), py::arg("q"), py::arg("cfg") = SolverConfig{});

    m.def("mpr", &mpr, py::arg("results"), py::arg("gt"),
          py::arg("threshold_px") = 20.0);
    m.def("msr", &msr, py::arg("results"), py::arg("gt"));
    m.def(
        "eao",
        [](const std::vector<std::vector<double>>& curves) { return eao(curves); },
        py::arg("overlap_curves"));
    m.def(
        "overlap_curve",
        [](const std::vector<BoundingBox>& results,
           const std::vector<std::vector<BoundingBox>>& gt) {
            return overlap_series(results, gt).overlaps;
        },
        py::arg("results"), py::arg("gt"));

    py::class_<SyntheticConfig>(m, "SyntheticConfig")
        .def(py::init<>())
        .def_readwrite("frame_count", &SyntheticConfig::frame_count)
        .def_readwrite("image_width", &SyntheticConfig::image_width)
        .def_readwrite("image_height", &SyntheticConfig::image_height)
        .def_readwrite("target_width", &SyntheticConfig::target_width)
        .def_readwrite("target_height", &SyntheticConfig::target_height)
        .def_readwrite("start_x", &SyntheticConfig::start_x)
        .def_readwrite("start_y", &SyntheticConfig::start_y)
        .def_readwrite("velocity_x", &SyntheticConfig::velocity_x)
        .def_readwrite("velocity_y", &SyntheticConfig::velocity_y)
        .def_readwrite("rgb_contrast", &SyntheticConfig::rgb_contrast)
        .def_readwrite("thermal_contrast", &SyntheticConfig::thermal_contrast)
        .def_readwrite("noise_sigma", &SyntheticConfig::noise_sigma)
        .def_readwrite("occlusion_intervals", &SyntheticConfig::occlusion_intervals)
        .def_readwrite("rng_seed", &SyntheticConfig::rng_seed)
        .def_readwrite("name", &SyntheticConfig::name);

    m.def(
        "generate_synthetic",
        [](const SyntheticConfig& cfg) {
            const SyntheticSequence seq = generate_synthetic(cfg);
            std::vector<std::vector<py::array_t<std::uint8_t>>> frames;
            for (const auto& fp : seq.frames) {
                std::vector<py::array_t<std::uint8_t>> imgs;
                for (const auto& img : fp.images) imgs.push_back(image_to_array(img));
                frames.push_back(std::move(imgs));
            }
            return py::make_tuple(frames, seq.groundtruth);
        },
        py::arg("cfg"));
    m.def("write_synthetic", &write_synthetic, py::arg("cfg"), py::arg("out_dir"));

    py::class_<TrackerParams>(m, "TrackerParams")
        .def(py::init<>())
        .def_readwrite("nu", &TrackerParams::nu)
        .def_readwrite("theta", &TrackerParams::theta)
        .def_readwrite("xi", &TrackerParams::xi)
        .def_readwrite("translation_stride", &TrackerParams::translation_stride)
        .def_readwrite("scale_base", &TrackerParams::scale_base)
        .def_readwrite("scale_count", &TrackerParams::scale_count)
        .def_readwrite("support_budget", &TrackerParams::support_budget)
        .def_readwrite("shrink_factor", &TrackerParams::shrink_factor);

    py::class_<FrameDiagnostics>(m, "FrameDiagnostics")
        .def_readonly("confidence", &FrameDiagnostics::confidence)
        .def_readonly("scale", &FrameDiagnostics::scale)
        .def_readonly("updated", &FrameDiagnostics::updated);

    py::class_<TrackerState>(m, "Tracker")
        .def(py::init([](const std::vector<py::array_t<std::uint8_t>>& images,
                         const BoundingBox& box, const TrackerParams& params,
                         const SolverConfig& solver) {
                 return tracker_initialize(frame_from_arrays(images, 0), box, params,
                                           solver);
             }),
             py::arg("images"), py::arg("box"), py::arg("params") = TrackerParams{},
             py::arg("solver") = SolverConfig{})
        .def(
            "track",
            [](TrackerState& state, const std::vector<py::array_t<std::uint8_t>>& images) {
                return track_frame(frame_from_arrays(images, state.frame_index + 1),
                                   state);
            },
            py::arg("images"))
        .def_property_readonly("box", [](const TrackerState& s) { return s.box; })
        .def_property_readonly("r", [](const TrackerState& s) { return s.r; })
        .def_property_readonly("s_hat", [](const TrackerState& s) { return s.s_hat; })
        .def_property_readonly("last",
                               [](const TrackerState& s) { return s.last; });

    m.def(
        "track_manifest",
        [](const std::string& manifest_path, const TrackerParams& params,
           const SolverConfig& solver) {
            const Sequence seq = load_sequence(manifest_path);
            const TrackRunResult run = track_sequence(seq, params, solver);
            return py::make_tuple(run.boxes, run.modality_weights);
        },
        py::arg("manifest_path"), py::arg("params") = TrackerParams{},
        py::arg("solver") = SolverConfig{});
}
