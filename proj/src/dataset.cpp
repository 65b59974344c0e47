#include "rgbt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rgbt/errors.hpp"

namespace fs = std::filesystem;

namespace rgbt {

bool is_known_attribute(const std::string& code) {
    return std::find(kAttributeCodes.begin(), kAttributeCodes.end(), code) !=
           kAttributeCodes.end();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw DataError("ground truth line " + std::to_string(line_no) +
                        ": not a number: '" + tok + "'");
    }
}

// Shell-style match supporting '*' and '?'.
bool glob_match(const std::string& pattern, const std::string& text) {
    std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::string format_coord(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::vector<BoundingBox> parse_groundtruth(const std::string& text) {
    std::vector<BoundingBox> boxes;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        std::array<double, 4> vals{};
        std::size_t pos = 0;
        for (int k = 0; k < 4; ++k) {
            const std::size_t comma = t.find(',', pos);
            const bool last = (k == 3);
            if (!last && comma == std::string::npos)
                throw DataError("ground truth line " + std::to_string(line_no) +
                                ": expected 4 comma-separated values");
            const std::string tok =
                trim(last ? t.substr(pos) : t.substr(pos, comma - pos));
            vals[k] = parse_number(tok, line_no);
            pos = last ? pos : comma + 1;
        }
        if (t.find(',', pos) != std::string::npos)
            throw DataError("ground truth line " + std::to_string(line_no) +
                            ": expected 4 comma-separated values");
        if (vals[2] <= 0.0 || vals[3] <= 0.0)
            throw DataError("ground truth line " + std::to_string(line_no) +
                            ": width and height must be positive");
        boxes.emplace_back(vals[0], vals[1], vals[2], vals[3]);
    }
    return boxes;
}

std::string format_results(const std::vector<BoundingBox>& boxes) {
    std::string out;
    for (const auto& b : boxes) {
        out += format_coord(b.x) + "," + format_coord(b.y) + "," +
               format_coord(b.w) + "," + format_coord(b.h) + "\n";
    }
    return out;
}

void write_results(const std::string& path, const std::vector<BoundingBox>& boxes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write results: " + path);
        out << format_results(boxes);
        if (!out) throw DataError("failed writing results: " + path);
    }
    fs::rename(tmp, path);
}

Sequence load_sequence(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError("cannot open manifest: " + manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();

    Sequence seq;
    SequenceManifest& m = seq.manifest_;
    std::vector<std::pair<int, std::string>> dirs, gts;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw DataError("manifest line without '=': " + t);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key == "name") {
            m.name = value;
        } else if (key == "frame_pattern") {
            m.frame_pattern = value;
        } else if (key == "attributes") {
            std::istringstream vs(value);
            std::string code;
            while (std::getline(vs, code, ',')) {
                code = trim(code);
                if (code.empty()) continue;
                if (!is_known_attribute(code))
                    throw DataError("unknown attribute code '" + code + "' in " +
                                    manifest_path);
                m.attribute_tags.insert(code);
            }
        } else if (key.rfind("modality_dir.", 0) == 0) {
            dirs.emplace_back(std::stoi(key.substr(13)), value);
        } else if (key.rfind("groundtruth.", 0) == 0) {
            gts.emplace_back(std::stoi(key.substr(12)), value);
        } else {
            throw DataError("unknown manifest key '" + key + "' in " + manifest_path);
        }
    }
    std::sort(dirs.begin(), dirs.end());
    std::sort(gts.begin(), gts.end());
    for (const auto& [idx, v] : dirs) m.modality_dirs.push_back((base / v).string());
    for (const auto& [idx, v] : gts) m.groundtruth_paths.push_back((base / v).string());
    if (m.modality_dirs.empty())
        throw DataError("manifest lists no modality_dir entries: " + manifest_path);
    if (m.modality_dirs.size() != m.groundtruth_paths.size())
        throw DataError("manifest modality_dir/groundtruth counts differ: " +
                        manifest_path);
    if (m.name.empty()) m.name = fs::path(manifest_path).stem().string();

    for (const auto& gt_path : m.groundtruth_paths) {
        std::ifstream gin(gt_path, std::ios::binary);
        if (!gin) throw DataError("cannot open ground truth: " + gt_path);
        std::stringstream buf;
        buf << gin.rdbuf();
        seq.groundtruth_.push_back(parse_groundtruth(buf.str()));
    }
    m.frame_count = static_cast<int>(seq.groundtruth_[0].size());
    for (std::size_t i = 1; i < seq.groundtruth_.size(); ++i) {
        if (static_cast<int>(seq.groundtruth_[i].size()) != m.frame_count)
            throw DataError("ground-truth lengths disagree across modalities in " +
                            manifest_path);
    }

    for (const auto& dir : m.modality_dirs) {
        if (!fs::is_directory(dir)) throw DataError("missing modality dir: " + dir);
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string fname = entry.path().filename().string();
            if (glob_match(m.frame_pattern, fname)) files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        if (static_cast<int>(files.size()) != m.frame_count)
            throw DataError("frame count mismatch in " + dir + ": " +
                            std::to_string(files.size()) + " frames vs " +
                            std::to_string(m.frame_count) + " ground-truth lines");
        seq.frame_paths_.push_back(std::move(files));
    }
    return seq;
}

FramePair Sequence::frame(int i) const {
    if (i < 0 || i >= manifest_.frame_count)
        throw DataError("frame index out of range: " + std::to_string(i));
    FramePair fp;
    fp.index = i;
    for (const auto& paths : frame_paths_) fp.images.push_back(load_image(paths[i]));
    for (const auto& img : fp.images) {
        if (img.width != fp.images[0].width || img.height != fp.images[0].height)
            throw DataError("modality dimensions disagree at frame " + std::to_string(i));
    }
    return fp;
}

namespace {

// Deterministic normal deviates: mt19937_64 + Box-Muller, independent of the
// standard library's distribution implementation.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}
    double next(double sigma) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_ * sigma;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 1e-300);
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang) * sigma;
    }

private:
    double uniform() {
        return (engine_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
    }
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Intensity placement relative to the 32-wide histogram bins: background and
// full-contrast targets sit mid-bin (noise-stable); at low contrast the target
// lands on a bin edge, so its histograms destabilize exactly when the
// modality's signal fades. The target carries an inner core of distinct
// intensity so its appearance changes under a scale mismatch.
constexpr double kBackgroundLevel = 88.0;
constexpr double kVisibleTargetDelta[3] = {88.0, 120.0, 56.0};
constexpr double kVisibleCoreDelta[3] = {152.0, 56.0, 120.0};
constexpr double kThermalTargetDelta = 88.0;
constexpr double kThermalCoreDelta = 152.0;
constexpr double kVisibleOccluderDelta[3] = {-40.0, 30.0, 60.0};
constexpr double kThermalOccluderDelta = -30.0;

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void fill_rect(Image& img, const BoundingBox& box, const double* delta,
               double contrast, GaussianRng& rng, double sigma) {
    const int x0 = std::max(0, static_cast<int>(std::lround(box.x)));
    const int y0 = std::max(0, static_cast<int>(std::lround(box.y)));
    const int x1 = std::min(img.width, static_cast<int>(std::lround(box.x + box.w)));
    const int y1 = std::min(img.height, static_cast<int>(std::lround(box.y + box.h)));
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            for (int c = 0; c < img.channels; ++c)
                img.at(x, y, c) = quantize(kBackgroundLevel + contrast * delta[c] +
                                           rng.next(sigma));
}

}  // namespace

SyntheticSequence generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.frame_count < 1) throw DataError("frame_count must be >= 1");
    if (cfg.rgb_contrast < 0.0 || cfg.rgb_contrast > 1.0 ||
        cfg.thermal_contrast < 0.0 || cfg.thermal_contrast > 1.0)
        throw DataError("contrast values must be in [0,1]");
    if (cfg.target_width <= 0 || cfg.target_height <= 0 ||
        cfg.target_width > cfg.image_width || cfg.target_height > cfg.image_height)
        throw DataError("target must fit inside the image");

    SyntheticSequence out;
    out.manifest.name = cfg.name;
    out.manifest.modality_dirs = {"visible", "thermal"};
    out.manifest.groundtruth_paths = {"groundtruth_visible.txt",
                                      "groundtruth_thermal.txt"};
    // Attribute tags derived from the config so the evaluator's attribute
    // breakdown has something to key on.
    if (cfg.rgb_contrast < 0.25) out.manifest.attribute_tags.insert("LI");
    if (cfg.thermal_contrast < 0.25) out.manifest.attribute_tags.insert("TC");
    if (!cfg.occlusion_intervals.empty()) out.manifest.attribute_tags.insert("PO");
    if (std::hypot(cfg.velocity_x, cfg.velocity_y) > 20.0)
        out.manifest.attribute_tags.insert("FM");
    if (out.manifest.attribute_tags.empty()) out.manifest.attribute_tags.insert("NO");
    out.manifest.frame_count = cfg.frame_count;

    GaussianRng rng(cfg.rng_seed);
    const double contrasts[2] = {cfg.rgb_contrast, cfg.thermal_contrast};
    const double thermal_delta[1] = {kThermalTargetDelta};
    const double thermal_core[1] = {kThermalCoreDelta};
    const double thermal_occ[1] = {kThermalOccluderDelta};

    for (int t = 0; t < cfg.frame_count; ++t) {
        const BoundingBox box(cfg.start_x + t * cfg.velocity_x,
                              cfg.start_y + t * cfg.velocity_y,
                              cfg.target_width, cfg.target_height);
        if (box.x < 0 || box.y < 0 || box.x + box.w > cfg.image_width ||
            box.y + box.h > cfg.image_height)
            throw DataError("target leaves image bounds at frame " + std::to_string(t));
        out.groundtruth.push_back(box);

        bool occluded = false;
        for (const auto& [a, b] : cfg.occlusion_intervals)
            if (t >= a && t <= b) occluded = true;

        FramePair fp;
        fp.index = t;
        for (int m = 0; m < 2; ++m) {
            Image img(cfg.image_width, cfg.image_height, m == 0 ? 3 : 1);
            for (auto& px : img.pixels)
                px = quantize(kBackgroundLevel + rng.next(cfg.noise_sigma));
            const double* tgt = m == 0 ? kVisibleTargetDelta : thermal_delta;
            const double* core = m == 0 ? kVisibleCoreDelta : thermal_core;
            const double* occ = m == 0 ? kVisibleOccluderDelta : thermal_occ;
            fill_rect(img, box, tgt, contrasts[m], rng, cfg.noise_sigma);
            fill_rect(img,
                      BoundingBox::from_center(box.center_x(), box.center_y(),
                                               box.w / 2.0, box.h / 2.0),
                      core, contrasts[m], rng, cfg.noise_sigma);
            if (occluded) {
                // Distractor slightly larger than the target, same center.
                const BoundingBox occ_box = BoundingBox::from_center(
                    box.center_x(), box.center_y(), box.w * 1.2, box.h * 1.2);
                fill_rect(img, occ_box, occ, contrasts[m], rng, cfg.noise_sigma);
            }
            fp.images.push_back(std::move(img));
        }
        out.frames.push_back(std::move(fp));
    }
    return out;
}

std::string write_synthetic(const SyntheticConfig& cfg, const std::string& out_dir) {
    const SyntheticSequence seq = generate_synthetic(cfg);
    const fs::path root = fs::path(out_dir) / cfg.name;
    fs::create_directories(root / "visible");
    fs::create_directories(root / "thermal");

    char fname[32];
    for (const auto& fp : seq.frames) {
        std::snprintf(fname, sizeof(fname), "%06d.ppm", fp.index);
        save_image(fp.images[0], (root / "visible" / fname).string());
        std::snprintf(fname, sizeof(fname), "%06d.pgm", fp.index);
        save_image(fp.images[1], (root / "thermal" / fname).string());
    }
    write_results((root / "groundtruth_visible.txt").string(), seq.groundtruth);
    write_results((root / "groundtruth_thermal.txt").string(), seq.groundtruth);

    const std::string manifest_path = (root / "manifest.txt").string();
    std::ofstream out(manifest_path);
    out << "name = " << cfg.name << "\n"
        << "modality_dir.0 = visible\n"
        << "modality_dir.1 = thermal\n"
        << "groundtruth.0 = groundtruth_visible.txt\n"
        << "groundtruth.1 = groundtruth_thermal.txt\n"
        << "frame_pattern = *.p?m\n";
    out << "attributes = ";
    bool first = true;
    for (const auto& tag : seq.manifest.attribute_tags) {
        if (!first) out << ", ";
        out << tag;
        first = false;
    }
    out << "\n";
    if (!out) throw DataError("cannot write manifest: " + manifest_path);
    return manifest_path;
}

}  // namespace rgbt
