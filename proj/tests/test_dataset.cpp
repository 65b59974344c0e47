#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "rgbt/dataset.hpp"
#include "rgbt/errors.hpp"

using namespace rgbt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("rgbt_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("parse_groundtruth") {
    SUBCASE("single line") {
        const auto boxes = parse_groundtruth("10,20,30,40");
        REQUIRE(boxes.size() == 1);
        CHECK(boxes[0] == BoundingBox(10, 20, 30, 40));
    }
    SUBCASE("two lines in order") {
        const auto boxes = parse_groundtruth("0,0,1,1\n5,5,2,2");
        REQUIRE(boxes.size() == 2);
        CHECK(boxes[0] == BoundingBox(0, 0, 1, 1));
        CHECK(boxes[1] == BoundingBox(5, 5, 2, 2));
    }
    SUBCASE("negative width is a validation error") {
        CHECK_THROWS_AS(parse_groundtruth("10,20,-3,40"), DataError);
    }
    SUBCASE("malformed line names the line number") {
        try {
            parse_groundtruth("1,2,3,4\nnot,a,box");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("fractional coordinates parse") {
        const auto boxes = parse_groundtruth("1.5,2.25,3.125,4.0");
        CHECK(boxes[0].x == doctest::Approx(1.5));
        CHECK(boxes[0].h == doctest::Approx(4.0));
    }
}

TEST_CASE("write_results round trip") {
    const fs::path dir = temp_dir("results");
    const std::string path = (dir / "out.txt").string();
    SUBCASE("empty list gives an empty file") {
        write_results(path, {});
        std::ifstream in(path);
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        CHECK(content.empty());
    }
    SUBCASE("single integer box formats exactly") {
        CHECK(format_results({BoundingBox(1, 2, 3, 4)}) == "1,2,3,4\n");
    }
    SUBCASE("random integer boxes round-trip exactly") {
        std::mt19937 rng(42);
        std::uniform_int_distribution<int> coord(-50, 500), size(1, 300);
        std::vector<BoundingBox> boxes;
        for (int i = 0; i < 100; ++i)
            boxes.emplace_back(coord(rng), coord(rng), size(rng), size(rng));
        const auto parsed = parse_groundtruth(format_results(boxes));
        REQUIRE(parsed.size() == boxes.size());
        for (std::size_t i = 0; i < boxes.size(); ++i) CHECK(parsed[i] == boxes[i]);
    }
    SUBCASE("fractional boxes round-trip to 1e-6") {
        std::mt19937 rng(43);
        std::uniform_real_distribution<double> coord(0.0, 100.0);
        std::vector<BoundingBox> boxes;
        for (int i = 0; i < 50; ++i)
            boxes.emplace_back(coord(rng), coord(rng), 1.0 + coord(rng),
                               1.0 + coord(rng));
        const auto parsed = parse_groundtruth(format_results(boxes));
        REQUIRE(parsed.size() == boxes.size());
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            CHECK(parsed[i].x == doctest::Approx(boxes[i].x).epsilon(1e-6));
            CHECK(parsed[i].w == doctest::Approx(boxes[i].w).epsilon(1e-6));
        }
    }
}

TEST_CASE("generate_synthetic") {
    SyntheticConfig cfg;
    cfg.frame_count = 10;
    cfg.image_width = 120;
    cfg.image_height = 90;
    cfg.target_width = 24;
    cfg.target_height = 24;
    cfg.start_x = 10;
    cfg.start_y = 10;
    cfg.velocity_x = 3.0;
    cfg.velocity_y = 0.0;

    SUBCASE("deterministic under the seed") {
        const auto a = generate_synthetic(cfg);
        const auto b = generate_synthetic(cfg);
        for (int t = 0; t < cfg.frame_count; ++t)
            for (int m = 0; m < 2; ++m)
                CHECK(a.frames[t].images[m].pixels == b.frames[t].images[m].pixels);
    }
    SUBCASE("linear path moves centers by exactly the step") {
        const auto seq = generate_synthetic(cfg);
        for (int t = 1; t < cfg.frame_count; ++t) {
            CHECK(seq.groundtruth[t].center_x() - seq.groundtruth[t - 1].center_x() ==
                  doctest::Approx(3.0));
            CHECK(seq.groundtruth[t].center_y() ==
                  doctest::Approx(seq.groundtruth[t - 1].center_y()));
        }
    }
    SUBCASE("zero rgb contrast leaves no visible target signal") {
        SyntheticConfig c = cfg;
        c.rgb_contrast = 0.0;
        c.noise_sigma = 0.0;
        const auto seq = generate_synthetic(c);
        const Image& vis = seq.frames[0].images[0];
        std::uint8_t first = vis.pixels[0];
        for (auto px : vis.pixels) CHECK(px == first);
        // Thermal still carries the target.
        const Image& th = seq.frames[0].images[1];
        const BoundingBox& gt = seq.groundtruth[0];
        const int inside = th.at(static_cast<int>(gt.center_x()),
                                 static_cast<int>(gt.center_y()), 0);
        CHECK(inside != th.at(0, 0, 0));
        CHECK(seq.manifest.attribute_tags.count("LI") == 1);
    }
    SUBCASE("target leaving the image is an error") {
        SyntheticConfig c = cfg;
        c.frame_count = 100;  // 10 + 3*99 + 24 > 120
        CHECK_THROWS_AS(generate_synthetic(c), DataError);
    }
    SUBCASE("occlusion keeps ground truth on the true box") {
        SyntheticConfig c = cfg;
        c.occlusion_intervals = {{3, 5}};
        const auto seq = generate_synthetic(c);
        CHECK(seq.groundtruth[4].x == doctest::Approx(10 + 3 * 4.0));
        CHECK(seq.manifest.attribute_tags.count("PO") == 1);
    }
}

TEST_CASE("write_synthetic and load_sequence") {
    const fs::path dir = temp_dir("seq");
    SyntheticConfig cfg;
    cfg.frame_count = 3;
    cfg.image_width = 80;
    cfg.image_height = 60;
    cfg.target_width = 20;
    cfg.target_height = 16;
    cfg.start_x = 8;
    cfg.start_y = 8;
    cfg.velocity_x = 2.0;
    cfg.name = "tiny";
    const std::string manifest_path = write_synthetic(cfg, dir.string());

    SUBCASE("loads with matching counts and dimensions") {
        const Sequence seq = load_sequence(manifest_path);
        CHECK(seq.frame_count() == 3);
        CHECK(seq.modality_count() == 2);
        CHECK(seq.groundtruth(0).size() == 3);
        CHECK(seq.groundtruth(1).size() == 3);
        for (int t = 0; t < 3; ++t) {
            const FramePair fp = seq.frame(t);
            CHECK(fp.index == t);
            REQUIRE(fp.images.size() == 2);
            CHECK(fp.images[0].width == fp.images[1].width);
            CHECK(fp.images[0].height == fp.images[1].height);
            CHECK(fp.images[0].channels == 3);
            CHECK(fp.images[1].channels == 1);
        }
    }
    SUBCASE("ground-truth length mismatch is an error") {
        // Truncate one ground-truth file to 2 lines.
        const fs::path gt = dir / "tiny" / "groundtruth_thermal.txt";
        write_results(gt.string(),
                      {BoundingBox(1, 1, 2, 2), BoundingBox(2, 2, 2, 2)});
        CHECK_THROWS_AS(load_sequence(manifest_path), DataError);
    }
    SUBCASE("single-modality manifest loads") {
        const fs::path mpath = dir / "tiny" / "mono.txt";
        {
            std::ofstream out(mpath);
            out << "name = mono\n"
                << "modality_dir.0 = visible\n"
                << "groundtruth.0 = groundtruth_visible.txt\n"
                << "frame_pattern = *.ppm\n";
        }
        const Sequence seq = load_sequence(mpath.string());
        CHECK(seq.modality_count() == 1);
        CHECK(seq.frame(0).images.size() == 1);
    }
    SUBCASE("unknown attribute code is rejected by name") {
        const fs::path mpath = dir / "tiny" / "bad.txt";
        {
            std::ofstream out(mpath);
            out << "name = bad\n"
                << "modality_dir.0 = visible\n"
                << "groundtruth.0 = groundtruth_visible.txt\n"
                << "frame_pattern = *.ppm\n"
                << "attributes = XX\n";
        }
        try {
            load_sequence(mpath.string());
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("XX") != std::string::npos);
        }
    }
    SUBCASE("missing directory is an error") {
        const fs::path mpath = dir / "tiny" / "missing.txt";
        {
            std::ofstream out(mpath);
            out << "modality_dir.0 = nowhere\n"
                << "groundtruth.0 = groundtruth_visible.txt\n";
        }
        CHECK_THROWS_AS(load_sequence(mpath.string()), DataError);
    }
}
