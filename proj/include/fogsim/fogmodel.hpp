#pragma once

#include <array>
#include <optional>

#include "fogsim/depthio.hpp"
#include "fogsim/raster.hpp"

namespace fogsim::fog {

/// Contrast threshold of the human eye used to define meteorological visibility.
inline constexpr double kContrastThreshold = 0.05;

/// Extinction coefficient beta (1/m, or 1/normalized-depth for abstract levels).
class Attenuation {
public:
    /// beta = -ln(0.05) / visibility.
    static Attenuation from_visibility(double visibility_m);
    /// Requires beta > 0.
    static Attenuation from_beta(double beta);
    /// beta = 0: no fog. Used for the clear baseline and identity checks.
    static Attenuation clear() noexcept { return Attenuation(0.0, std::nullopt); }

    double beta() const noexcept { return beta_; }
    std::optional<double> visibility() const noexcept { return visibility_; }

private:
    Attenuation(double beta, std::optional<double> visibility)
        : beta_(beta), visibility_(visibility) {}

    double beta_;
    std::optional<double> visibility_;
};

inline Attenuation beta_from_visibility(double visibility_m) {
    return Attenuation::from_visibility(visibility_m);
}

/// Abstract fog levels 1..4 over normalized pseudo-depth. Each entry is the
/// optical thickness beta*1 reached at the farthest pixel.
struct FogLevelLadder {
    std::array<double, 4> optical_thickness{1.0, 2.0, 4.0, 8.0};

    static constexpr int kLevels = 4;

    Attenuation attenuation(int level) const;
};

/// Per-pixel fraction of radiance reaching the camera, in (0,1].
struct TransmissionMap : ScalarGrid {
    using ScalarGrid::ScalarGrid;
};

/// Airlight color, each channel in [0,1].
struct AtmosphericLight {
    Color color{1.0, 1.0, 1.0};
};

AtmosphericLight make_light(const Color& color);

/// T(x) = exp(-beta * D(x)). Values that would underflow to 0 are held at
/// the smallest positive double so the map stays in (0,1].
TransmissionMap transmission(const depth::MetricDepth& depth, const Attenuation& att);

/// I(x) = I0(x) * T(x) + L * (1 - T(x)), clamped to [0,1].
RasterImage composite(const RasterImage& clear, const TransmissionMap& t,
                      const AtmosphericLight& light);

}  // namespace fogsim::fog
