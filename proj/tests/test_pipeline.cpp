#include <gtest/gtest.h>

#include <cstdlib>
#include <map>

#include "fogsim/checksum.hpp"
#include "fogsim/error.hpp"
#include "fogsim/image_io.hpp"
#include "fogsim/pipeline.hpp"
#include "support/fixtures.hpp"

using namespace fogsim;
using namespace fogsim::pipeline;
namespace fs = std::filesystem;

namespace {

FogConfig level_config(int level, FogMode mode = FogMode::homogeneous) {
    FogConfig cfg;
    cfg.level = level;
    cfg.mode = mode;
    cfg.seed = 5;
    return cfg;
}

// Relative path -> SHA-256 for every regular file below root.
std::map<std::string, std::string> tree_digest(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), root).generic_string()] = sha256_file(e.path());
        }
    }
    return out;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(DescribeSequence, ReadsSeqinfoAndFrames) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "MOT-A", .frames = 4, .width = 20, .height = 10});
    const auto seq = describe_sequence(root);
    EXPECT_EQ(seq.name, "MOT-A");
    EXPECT_EQ(seq.width, 20);
    EXPECT_EQ(seq.height, 10);
    EXPECT_EQ(seq.frame_rate, 30.0);
    EXPECT_EQ(seq.frames, (std::vector<std::string>{"000001.png", "000002.png", "000003.png", "000004.png"}));
    EXPECT_EQ(seq.depth_dir, root / "depth");
    EXPECT_EQ(find_depth_file(seq, "000002.png"), root / "depth" / "000002.pfm");

    const auto other = describe_sequence(root, tmp.path() / "depths");
    EXPECT_EQ(other.depth_dir, tmp.path() / "depths" / "MOT-A");
}

TEST(DescribeSequence, RejectsGapsInNumbering) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.frames = 3});
    fs::remove(root / "img1" / "000002.png");
    EXPECT_THROW(describe_sequence(root), FormatError);
    EXPECT_THROW(describe_sequence(tmp.path() / "nope"), IoError);
}

TEST(FogConfigValidation, IntensityRules) {
    FogConfig none;
    EXPECT_THROW(none.validate(), InvalidArgument);

    FogConfig both = level_config(2);
    both.visibility_m = 100.0;
    EXPECT_THROW(both.validate(), InvalidArgument);

    FogConfig bad_level = level_config(5);
    EXPECT_THROW(bad_level.validate(), InvalidArgument);

    FogConfig vis;
    vis.visibility_m = 100.0;
    EXPECT_THROW(vis.validate(), InvalidArgument);  // no calibration
    vis.calibration = depth::SceneReference{2.0, 200.0};
    EXPECT_NO_THROW(vis.validate());
    EXPECT_NEAR(vis.attenuation().beta(), 0.029957322735539907, 1e-15);

    FogConfig lvl_cal = level_config(1);
    lvl_cal.calibration = depth::SceneReference{2.0, 200.0};
    EXPECT_THROW(lvl_cal.validate(), InvalidArgument);

    FogConfig override_cfg = level_config(3);
    override_cfg.beta_override = 0.0;
    EXPECT_EQ(override_cfg.attenuation().beta(), 0.0);
    override_cfg.beta_override = -1.0;
    EXPECT_THROW(override_cfg.validate(), InvalidArgument);

    FogConfig bad_light = level_config(1);
    bad_light.light_strategy = LightStrategy::fixed;
    bad_light.fixed_light = {2.0, 0.0, 0.0};
    EXPECT_THROW(bad_light.validate(), InvalidArgument);
}

TEST(RenderSequence, HeterogeneousUsesOneTurbulenceMap) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "S", .frames = 3, .width = 40, .height = 30});
    auto cfg = level_config(4, FogMode::heterogeneous);
    cfg.debug_turbulence = true;
    const auto m = render_sequence(describe_sequence(root), cfg, tmp / "out");
    ASSERT_EQ(m.frames.size(), 3u);
    ASSERT_TRUE(m.tau_sha256.has_value());
    for (const auto& f : m.frames) {
        EXPECT_EQ(f.tau_sha256, m.tau_sha256);
        EXPECT_TRUE(fs::exists(tmp / "out" / "S" / "img1" / f.name));
    }
    EXPECT_EQ(*m.tau_sha256,
              grid_digest(turbulence::turbulence_texture(40, 30, cfg.octaves, cfg.seed, cfg.brightness)));
    EXPECT_TRUE(fs::exists(tmp / "out" / "S" / "turbulence.png"));
    const auto text = fixtures::read_bytes(tmp / "out" / "S" / kManifestName);
    EXPECT_EQ(text, m.to_text());
    EXPECT_NE(text.find("mode=heterogeneous"), std::string::npos);
    EXPECT_NE(text.find("intensity=level:4"), std::string::npos);
    EXPECT_NE(text.find("beta=8"), std::string::npos);
}

TEST(RenderSequence, ZeroBetaLosslessIsIdentity) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "S", .frames = 3});
    for (auto mode : {FogMode::homogeneous, FogMode::heterogeneous}) {
        auto cfg = level_config(2, mode);
        cfg.beta_override = 0.0;
        cfg.lossless = true;
        const auto out = tmp / ("out-" + to_string(mode));
        const auto m = render_sequence(describe_sequence(root), cfg, out);
        for (const auto& f : m.frames) {
            EXPECT_EQ(read_image(out / "S" / "img1" / f.name), read_image(root / "img1" / f.name));
            EXPECT_EQ(f.output_sha256, f.input_sha256);
            EXPECT_EQ(f.mean_transmission, 1.0);
        }
        EXPECT_EQ(m.beta, 0.0);
    }
}

TEST(RenderSequence, DeterministicAcrossRunsAndThreadCounts) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "S", .frames = 5, .width = 36, .height = 28});
    const auto cfg = level_config(3, FogMode::heterogeneous);
    ::setenv("FOG_THREADS", "1", 1);
    render_sequence(describe_sequence(root), cfg, tmp / "a");
    ::setenv("FOG_THREADS", "3", 1);
    EXPECT_EQ(worker_count(), 3u);
    render_sequence(describe_sequence(root), cfg, tmp / "b");
    ::unsetenv("FOG_THREADS");
    EXPECT_EQ(tree_digest(tmp / "a"), tree_digest(tmp / "b"));
}

TEST(RenderSequence, MissingDepthNamesTheFrame) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "S", .frames = 3});
    fs::remove(root / "depth" / "000003.pfm");
    const auto msg = message_of([&] { render_sequence(describe_sequence(root), level_config(1), tmp / "o"); });
    EXPECT_NE(msg.find("000003"), std::string::npos) << msg;
}

TEST(RenderSequence, DepthImageSizeMismatch) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "S", .frames = 2});
    depth::write_pfm(root / "depth" / "000002.pfm", ScalarGrid(5, 5, 0.3));
    EXPECT_THROW(render_sequence(describe_sequence(root), level_config(1), tmp / "o"), DimensionMismatch);
}

TEST(RenderSequence, LevelsReduceMeanTransmission) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "S", .frames = 2});
    for (auto mode : {FogMode::homogeneous, FogMode::heterogeneous}) {
        double prev = 1.0;
        for (int level = 1; level <= 4; ++level) {
            const auto m = render_sequence(describe_sequence(root), level_config(level, mode),
                                           tmp / ("o" + std::to_string(level)));
            EXPECT_LT(m.frames[0].mean_transmission, prev) << level;
            prev = m.frames[0].mean_transmission;
        }
    }
}

TEST(RenderSequence, VisibilityUsesMetricDepth) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "S", .frames = 1, .png16_depth = true});
    FogConfig cfg;
    cfg.visibility_m = 50.0;
    cfg.calibration = depth::SceneReference{2.0, 100.0};
    cfg.light_strategy = LightStrategy::sky;
    const auto m = render_sequence(describe_sequence(root), cfg, tmp / "o");
    EXPECT_TRUE(m.metric_depth);
    EXPECT_EQ(m.beta, fog::beta_from_visibility(50.0).beta());
    EXPECT_NE(m.to_text().find("depth=metric"), std::string::npos);

    // Recompute the frame mean from the depth file.
    const auto d = depth::to_metric(depth::load_depth(root / "depth" / "000001.png"),
                                    depth::calibrate(*cfg.calibration));
    EXPECT_NEAR(m.frames[0].mean_transmission, fog::transmission(d, cfg.attenuation()).mean(), 1e-15);
}

TEST(RenderSequence, FixedLightAndJpegNames) {
    fixtures::TempDir tmp;
    const auto root = fixtures::make_sequence(tmp.path(), {.name = "S", .frames = 2, .extension = ".jpg"});
    auto cfg = level_config(2);
    cfg.light_strategy = LightStrategy::fixed;
    cfg.fixed_light = {0.5, 0.6, 0.7};
    const auto m = render_sequence(describe_sequence(root), cfg, tmp / "o");
    EXPECT_EQ(m.light, (Color{0.5, 0.6, 0.7}));
    EXPECT_TRUE(fs::exists(tmp / "o" / "S" / "img1" / "000002.jpg"));
    cfg.lossless = true;
    render_sequence(describe_sequence(root), cfg, tmp / "p");
    // PNG content under the original name.
    const auto bytes = fixtures::read_bytes(tmp / "p" / "S" / "img1" / "000001.jpg");
    EXPECT_EQ(bytes.substr(1, 3), "PNG");
}

TEST(RenderDataset, TwoSequencesRoundTrip) {
    fixtures::TempDir tmp;
    const auto in = tmp / "in";
    fixtures::make_sequence(in, {.name = "MOT-02", .frames = 4, .seed = 2});
    fixtures::make_sequence(in, {.name = "MOT-04", .frames = 3, .seed = 4});
    const auto cfg = level_config(2, FogMode::heterogeneous);

    const auto r1 = render_dataset(in, cfg, tmp / "o1");
    ASSERT_TRUE(r1.all_ok());
    ASSERT_EQ(r1.sequences.size(), 2u);
    for (const auto& s : r1.sequences) {
        const auto src = in / s.name;
        const auto dst = tmp / "o1" / s.name;
        EXPECT_TRUE(fs::exists(dst / kManifestName));
        EXPECT_EQ(fixtures::read_bytes(src / "gt" / "gt.txt"), fixtures::read_bytes(dst / "gt" / "gt.txt"));
        EXPECT_EQ(fixtures::read_bytes(src / "seqinfo.ini"), fixtures::read_bytes(dst / "seqinfo.ini"));
        std::vector<std::string> a, b;
        for (const auto& e : fs::directory_iterator(src / "img1")) a.push_back(e.path().filename().string());
        for (const auto& e : fs::directory_iterator(dst / "img1")) b.push_back(e.path().filename().string());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
        EXPECT_EQ(s.manifest->seed, sequence_seed(cfg.seed, s.name));
    }
    EXPECT_NE(r1.sequences[0].manifest->tau_sha256, r1.sequences[1].manifest->tau_sha256);

    const auto r2 = render_dataset(in, cfg, tmp / "o2");
    ASSERT_TRUE(r2.all_ok());
    EXPECT_EQ(tree_digest(tmp / "o1"), tree_digest(tmp / "o2"));
}

TEST(RenderDataset, SingleSequenceRootAndPartialFailure) {
    fixtures::TempDir tmp;
    const auto in = tmp / "in";
    const auto a = fixtures::make_sequence(in, {.name = "A", .frames = 2});
    fixtures::make_sequence(in, {.name = "B", .frames = 2, .write_depth = false});

    const auto single = render_dataset(a, level_config(1), tmp / "single");
    ASSERT_EQ(single.sequences.size(), 1u);
    EXPECT_TRUE(single.all_ok());

    const auto r = render_dataset(in, level_config(1), tmp / "o");
    ASSERT_EQ(r.sequences.size(), 2u);
    EXPECT_EQ(r.failures(), 1u);
    EXPECT_TRUE(r.sequences[0].ok());
    EXPECT_FALSE(r.sequences[1].ok());
    EXPECT_NE(r.sequences[1].error.find("000001"), std::string::npos);
}

TEST(RenderDataset, EmptyRoot) {
    fixtures::TempDir tmp;
    fs::create_directories(tmp / "empty");
    const auto msg = message_of([&] { render_dataset(tmp / "empty", level_config(1), tmp / "o"); });
    EXPECT_NE(msg.find("no sequences found"), std::string::npos) << msg;
}

TEST(SequenceSeed, XorsStableNameHash) {
    EXPECT_EQ(sequence_seed(0, "MOT17-02"), stable_hash64("MOT17-02"));
    EXPECT_EQ(sequence_seed(12345, "x") ^ 12345u, stable_hash64("x"));
    // Leading 8 bytes of SHA-256("abc") = ba7816bf8f01cfea.
    EXPECT_EQ(stable_hash64("abc"), 0xba7816bf8f01cfeaull);
}
