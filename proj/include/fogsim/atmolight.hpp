#pragma once

#include "fogsim/depthio.hpp"
#include "fogsim/fogmodel.hpp"
#include "fogsim/raster.hpp"

namespace fogsim::light {

/// Per-patch minimum over color channels.
struct DarkChannelMap : ScalarGrid {
    using ScalarGrid::ScalarGrid;
};

/// Square neighbourhood edge length in pixels. Even sizes cover offsets
/// [-size/2, size/2 - 1]; odd sizes are centred.
struct PatchSpec {
    int size = 10;
};

inline constexpr double kDefaultTopFraction = 0.10;
inline constexpr double kDefaultFarFraction = 0.05;

DarkChannelMap dark_channel(const RasterImage& img, PatchSpec patch);

/// Mean source color at the ceil(top_fraction * N) pixels with the brightest
/// dark channel. Ties go to the lower row-major index.
fog::AtmosphericLight estimate_light_dcp(const RasterImage& img, PatchSpec patch,
                                         double top_fraction = kDefaultTopFraction);

/// Mean source color at the ceil(far_fraction * N) deepest pixels. Ties go to
/// the lower row-major index.
fog::AtmosphericLight estimate_light_sky(const RasterImage& img, const depth::MetricDepth& depth,
                                         double far_fraction = kDefaultFarFraction);

/// Number of pixels selected for a fraction of n, in [1, n].
std::size_t selection_count(double fraction, std::size_t n);

}  // namespace fogsim::light
