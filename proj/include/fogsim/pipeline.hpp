#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fogsim/atmolight.hpp"
#include "fogsim/depthio.hpp"
#include "fogsim/fogmodel.hpp"
#include "fogsim/turbulence.hpp"

namespace fogsim::pipeline {

enum class FogMode { homogeneous, heterogeneous };
enum class LightStrategy { dcp, sky, fixed };

struct FogConfig {
    FogMode mode = FogMode::homogeneous;

    // Exactly one intensity form. Visibility needs a metric calibration;
    // abstract levels operate on normalized pseudo-depth.
    std::optional<double> visibility_m;
    std::optional<int> level;

    std::uint64_t seed = 0;

    LightStrategy light_strategy = LightStrategy::dcp;
    Color fixed_light{1.0, 1.0, 1.0};
    light::PatchSpec patch{};
    double top_fraction = light::kDefaultTopFraction;
    double far_fraction = light::kDefaultFarFraction;

    int octaves = turbulence::kDefaultOctaves;
    double brightness = turbulence::kDefaultBrightness;
    int base_cells = turbulence::kDefaultBaseCells;

    std::optional<depth::SceneReference> calibration;
    fog::FogLevelLadder ladder{};

    /// Root holding <sequence-name>/<frame>.pfm|png. Defaults to <sequence>/depth.
    std::optional<std::filesystem::path> depth_dir;

    bool lossless = false;
    int jpeg_quality = 95;
    /// Writes turbulence.png next to the manifest for heterogeneous runs.
    bool debug_turbulence = false;

    /// Replaces the configured beta; 0 is allowed (no fog).
    std::optional<double> beta_override;

    /// Throws InvalidArgument describing the first violated constraint.
    void validate() const;
    fog::Attenuation attenuation() const;
};

std::string to_string(FogMode mode);
std::string to_string(LightStrategy strategy);

/// One MOTChallenge-style sequence directory.
struct SequenceDescriptor {
    std::string name;
    std::filesystem::path root;
    std::filesystem::path image_dir;
    std::filesystem::path depth_dir;
    double frame_rate = 0.0;
    int width = 0;
    int height = 0;
    /// Frame file names in temporal order (e.g. 000001.jpg).
    std::vector<std::string> frames;
};

/// Reads seqinfo.ini when present, lists the image directory and checks that
/// frame stems are zero-padded consecutive integers.
SequenceDescriptor describe_sequence(const std::filesystem::path& sequence_root,
                                     const std::optional<std::filesystem::path>& depth_root = {});

/// Depth file for a frame: same stem, .pfm preferred over .png.
std::filesystem::path find_depth_file(const SequenceDescriptor& seq, const std::string& frame);

struct FrameRecord {
    std::string name;
    std::string input_sha256;
    std::string output_sha256;
    std::optional<std::string> tau_sha256;
    double mean_transmission = 0.0;
    std::optional<std::string> warning;
};

struct SequenceManifest {
    std::string sequence;
    FogMode mode = FogMode::homogeneous;
    std::string intensity;
    double beta = 0.0;
    std::uint64_t seed = 0;
    LightStrategy light_strategy = LightStrategy::dcp;
    Color light{};
    bool metric_depth = false;
    std::optional<std::string> tau_sha256;
    std::vector<FrameRecord> frames;

    /// Plain-text key=value form; free of paths and timestamps so reruns diff cleanly.
    std::string to_text() const;
};

inline constexpr const char* kManifestName = "fog_manifest.txt";

/// Renders every frame into <out_root>/<seq.name>/<image dir name>/ with the
/// original file names and writes the manifest beside it.
SequenceManifest render_sequence(const SequenceDescriptor& seq, const FogConfig& cfg,
                                 const std::filesystem::path& out_root);

struct SequenceOutcome {
    std::string name;
    std::optional<SequenceManifest> manifest;
    std::string error;

    bool ok() const noexcept { return manifest.has_value(); }
};

struct DatasetResult {
    std::vector<SequenceOutcome> sequences;

    std::size_t failures() const noexcept;
    bool all_ok() const noexcept { return failures() == 0; }
};

/// Sequence directories under root (those containing an image directory), by
/// name. A root that is itself a sequence yields just itself.
std::vector<std::filesystem::path> find_sequences(const std::filesystem::path& root);

/// cfg.seed XOR stable hash of the sequence name.
std::uint64_t sequence_seed(std::uint64_t seed, const std::string& sequence_name);

/// Renders each sequence independently, copying gt/ and seqinfo.ini byte for
/// byte. Per-sequence failures are collected, not thrown. Throws when no
/// sequence is found.
DatasetResult render_dataset(const std::filesystem::path& root, const FogConfig& cfg,
                             const std::filesystem::path& out_root);

/// Worker threads for frame rendering: FOG_THREADS if set and positive,
/// otherwise hardware concurrency.
unsigned worker_count();

}  // namespace fogsim::pipeline
