#ifndef RGBT_DATASET_HPP_
#define RGBT_DATASET_HPP_

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rgbt/bbox.hpp"
#include "rgbt/image.hpp"

namespace rgbt {

/// The 12 sequence attribute codes the evaluator understands.
inline const std::array<std::string, 12> kAttributeCodes = {
    "NO", "PO", "HO", "LI", "LR", "TC", "DEF", "FM", "SV", "MB", "CM", "BC"};

bool is_known_attribute(const std::string& code);

/// Declarative description of one sequence: per-modality frame directories,
/// per-modality ground-truth files, attribute tags. Index 0 = visible,
/// index 1 = thermal.
struct SequenceManifest {
    std::string name;
    std::vector<std::string> modality_dirs;
    std::vector<std::string> groundtruth_paths;
    std::set<std::string> attribute_tags;
    std::string frame_pattern = "*.ppm";  // glob over each modality dir
    int frame_count = 0;
};

/// All modality images of one frame; images share pixel dimensions.
struct FramePair {
    std::vector<Image> images;
    int index = 0;
};

/// Parses "x,y,w,h" lines, one frame per line. Throws DataError naming the
/// line number on malformed input, and on w <= 0 or h <= 0.
std::vector<BoundingBox> parse_groundtruth(const std::string& text);

/// Writes one "x,y,w,h" line per box. Integer coordinates round-trip
/// bit-exactly through parse_groundtruth; fractional ones to 1e-6.
/// The file is written to a temporary and renamed into place.
void write_results(const std::string& path, const std::vector<BoundingBox>& boxes);

std::string format_results(const std::vector<BoundingBox>& boxes);

/// A loaded sequence. Frames are read from disk on demand; ground truth is
/// held in memory. Read-only after construction.
class Sequence {
public:
    const SequenceManifest& manifest() const { return manifest_; }
    int frame_count() const { return manifest_.frame_count; }
    int modality_count() const { return static_cast<int>(manifest_.modality_dirs.size()); }

    /// Ground truth for one modality, frame_count entries.
    const std::vector<BoundingBox>& groundtruth(int modality) const {
        return groundtruth_[modality];
    }
    const std::vector<std::vector<BoundingBox>>& groundtruth_all() const {
        return groundtruth_;
    }

    /// Loads frame i from disk. Throws DataError if modality dimensions disagree.
    FramePair frame(int i) const;

    friend Sequence load_sequence(const std::string& manifest_path);

private:
    SequenceManifest manifest_;
    std::vector<std::vector<std::string>> frame_paths_;  // [modality][frame]
    std::vector<std::vector<BoundingBox>> groundtruth_;  // [modality][frame]
};

/// Reads a "key = value" manifest file and validates it against the frame
/// directories and ground-truth files it references.
Sequence load_sequence(const std::string& manifest_path);

/// Configuration of the synthetic two-modality sequence generator: a flat
/// scene with a constant-size rectangular target moving on a linear path.
/// Per-modality contrast scales the target's intensity offset, so contrast 0
/// leaves that modality with no target signal. Occlusion intervals overdraw
/// the target with a distractor while ground truth keeps the true box.
struct SyntheticConfig {
    int frame_count = 100;
    int image_width = 320;
    int image_height = 240;
    int target_width = 40;
    int target_height = 40;
    double start_x = 30.0;  // target top-left at frame 0
    double start_y = 30.0;
    double velocity_x = 3.0;  // px per frame
    double velocity_y = 0.0;
    double rgb_contrast = 1.0;      // in [0,1]
    double thermal_contrast = 1.0;  // in [0,1]
    double noise_sigma = 6.0;
    std::vector<std::pair<int, int>> occlusion_intervals;  // inclusive frame ranges
    std::uint64_t rng_seed = 1;
    std::string name = "synthetic";
};

struct SyntheticSequence {
    SequenceManifest manifest;
    std::vector<FramePair> frames;
    std::vector<BoundingBox> groundtruth;  // shared by both modalities
};

/// Deterministic in cfg (including rng_seed). Throws DataError if the config
/// is invalid or the target leaves the image under the motion path.
SyntheticSequence generate_synthetic(const SyntheticConfig& cfg);

/// Writes a synthetic sequence to out_dir (frame images, ground-truth files,
/// manifest) and returns the manifest path.
std::string write_synthetic(const SyntheticConfig& cfg, const std::string& out_dir);

}  // namespace rgbt

#endif  // RGBT_DATASET_HPP_
