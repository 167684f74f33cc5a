#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fogsim/raster.hpp"

namespace fogsim::depth {

/// Unitless disparity-like estimate; larger values are closer to the camera.
struct RelativeInverseDepth : ScalarGrid {
    using ScalarGrid::ScalarGrid;
};

enum class DepthUnit {
    meters,
    /// Pseudo-depth in [eps, 1]; 0 is the nearest pixel, 1 the farthest.
    normalized,
};

/// Strictly positive per-pixel distance.
struct MetricDepth : ScalarGrid {
    using ScalarGrid::ScalarGrid;

    DepthUnit unit = DepthUnit::meters;

    bool is_metric() const noexcept { return unit == DepthUnit::meters; }
};

/// Affine map from relative inverse depth to metric inverse depth.
struct DepthCalibration {
    double scale = 1.0;
    double shift = 0.0;
};

/// Nearest and farthest distances measured in the scene, in meters.
struct SceneReference {
    double d_min = 0.0;
    double d_max = 0.0;
};

enum class DepthFormat { pfm, png16 };

/// Lower bound applied to pseudo-depth so that it stays strictly positive.
inline constexpr double kPseudoDepthFloor = 1e-6;

/// Picks the format from the file extension (.pfm / .png).
DepthFormat depth_format_from_path(const std::filesystem::path& path);

/// Reads a single-channel depth file. PFM rows are flipped to top-to-bottom;
/// PNG16 codes are divided by 65535. Rejects non-finite values.
RelativeInverseDepth load_depth(const std::filesystem::path& path, DepthFormat format);
RelativeInverseDepth load_depth(const std::filesystem::path& path);

/// Little-endian single-channel PFM. Values are stored as float32.
void write_pfm(const std::filesystem::path& path, const ScalarGrid& grid);
/// Values in [0,1] stored as round(v * 65535).
void write_png16(const std::filesystem::path& path, const ScalarGrid& grid);

DepthCalibration calibrate(const SceneReference& ref);

/// D(x) = 1 / (scale * d(x) + shift).
MetricDepth to_metric(const RelativeInverseDepth& d, const DepthCalibration& cal);

struct PseudoDepth {
    MetricDepth depth;
    /// Set when the input was constant and a uniform 0.5 field was produced.
    std::optional<std::string> warning;
};

/// Min-max inversion of the disparity into [kPseudoDepthFloor, 1].
PseudoDepth to_pseudo_depth(const RelativeInverseDepth& d);

}  // namespace fogsim::depth
