#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fogsim/depthio.hpp"
#include "fogsim/fogmodel.hpp"
#include "fogsim/motmetrics.hpp"
#include "fogsim/pipeline.hpp"

namespace fogsim::eval {

struct Velocity {
    double dx = 0.0;
    double dy = 0.0;
};

/// Desk-scale synthetic tracking scene on a flat background at normalized
/// depth 1. Objects move linearly from seeded start positions.
struct SceneSpec {
    int n_objects = 5;
    int n_frames = 100;
    int image_width = 320;
    int image_height = 240;
    double box_width = 24.0;
    double box_height = 48.0;
    /// Per-object velocity in pixels/frame; missing entries are drawn from the seed.
    std::vector<Velocity> motion;
    /// Per-object normalized depth in (0, 1]; missing entries are drawn from the seed.
    std::vector<double> object_depth;
    /// Optional explicit start positions (top-left corners); missing ones are drawn.
    std::vector<mot::Box> start;
    std::uint64_t seed = 1;
    /// Meters spanned by normalized depth 1, used for visibility-based levels.
    double depth_scale_m = 100.0;

    /// Throws InvalidArgument when an object cannot stay inside the image.
    void validate() const;
};

struct Scene {
    mot::TrackSet gt;
    /// One normalized depth field per frame (index 0 is frame 1).
    std::vector<depth::MetricDepth> depth;
};

Scene generate_scene(const SceneSpec& spec);

/// A detection without identity.
struct Detection {
    int frame = 1;
    mot::Box box;
    double confidence = 1.0;
};

using DetectionSet = std::vector<Detection>;

/// Detector stand-in: keep probability p = clamp(slope * mean_T + intercept, 0, 1)
/// where mean_T is the mean transmission inside the box.
struct DegradationModel {
    double slope = 1.0;
    double intercept = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 7;

    double keep_probability(double mean_transmission) const noexcept;
};

/// Mean transmission over the pixels covered by a box (clipped to the map).
double mean_box_transmission(const fog::TransmissionMap& t, const mot::Box& box);

/// Every gt record (in frame, id order) draws one uniform and, when
/// noise_sigma > 0, four normal jitters, whether or not it is kept, so runs
/// at different fog levels share their random numbers.
DetectionSet degrade_detections(const mot::TrackSet& gt,
                                const std::vector<fog::TransmissionMap>& transmission,
                                const DegradationModel& model);

struct TrackerOptions {
    double iou_threshold = 0.3;
    /// A track that has missed more than this many consecutive frames ends.
    int max_missed = 3;
};

/// Greedy IoU tracker: per frame, candidate (track, detection) pairs with IoU
/// >= threshold against the track's last box are taken in descending IoU
/// order (ties: older track, then earlier detection); unmatched detections
/// start new tracks with increasing ids.
mot::TrackSet reference_tracker(const DetectionSet& detections, const TrackerOptions& options = {});

struct SweepLevel {
    std::string label;
    pipeline::FogConfig config;
};

struct SweepOptions {
    DegradationModel degradation{};
    TrackerOptions tracker{};
    double iou_threshold = mot::kDefaultIouThreshold;
};

struct SweepRow {
    std::string label;
    double beta = 0.0;
    double mean_transmission = 1.0;
    std::size_t detections = 0;
    mot::MetricReport metrics;
};

struct SweepReport {
    std::vector<SweepRow> rows;

    std::string to_csv() const;
    std::string to_markdown() const;
    /// Writes report.csv and report.md into dir.
    void write(const std::filesystem::path& dir) const;
};

/// Clear row plus one row per level, each scored against the scene's gt.
SweepReport sweep(const SceneSpec& scene, const std::vector<SweepLevel>& levels,
                  const SweepOptions& options = {});

/// "Fog 1".."Fog 4" for the given mode, seed and levels.
std::vector<SweepLevel> standard_levels(pipeline::FogMode mode, const std::vector<int>& levels,
                                        std::uint64_t seed);

/// Reads a JSON scene description (keys mirror SceneSpec / SweepOptions).
struct SweepSetup {
    SceneSpec scene;
    SweepOptions options;
    pipeline::FogMode mode = pipeline::FogMode::homogeneous;
    std::uint64_t fog_seed = 0;
};
SweepSetup load_sweep_setup(const std::filesystem::path& path);

}  // namespace fogsim::eval
