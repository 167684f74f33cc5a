#pragma once

#include <cstdint>

#include "fogsim/depthio.hpp"
#include "fogsim/fogmodel.hpp"
#include "fogsim/raster.hpp"

namespace fogsim::turbulence {

/// Raw gradient-noise samples, each in [-1, 1].
struct NoiseField : ScalarGrid {
    using ScalarGrid::ScalarGrid;
};

/// Positive density multiplier applied to depth for heterogeneous fog.
struct TurbulenceMap : ScalarGrid {
    using ScalarGrid::ScalarGrid;

    int octaves = 0;
    double brightness = 0.0;
};

inline constexpr int kDefaultOctaves = 5;
inline constexpr double kDefaultBrightness = 0.8;
inline constexpr int kDefaultBaseCells = 4;
/// Lowest density multiplier; keeps some fog in every pixel.
inline constexpr double kTurbulenceFloor = 0.2;

/// 2D Perlin gradient noise with square lattice cells. `cells` is the number
/// of lattice cells along the shorter image axis; pixel (x, y) samples the
/// lattice at (x, y) * cells / min(width, height). Corner gradients are unit
/// vectors picked by hashing (corner, seed); interpolation uses the quintic
/// fade 6t^5 - 15t^4 + 10t^3. Samples on lattice corners are exactly 0.
NoiseField perlin(int width, int height, int cells, std::uint64_t seed);

/// sum_{n=1..octaves} P_n / 2^n, where octave n uses base_cells * 2^(n-1)
/// lattice cells and seed + n.
NoiseField turbulence_sum(int width, int height, int octaves, std::uint64_t seed,
                          int base_cells = kDefaultBaseCells);

/// Octave sum min-max normalised and mapped affinely onto
/// [kTurbulenceFloor, brightness].
TurbulenceMap turbulence_texture(int width, int height, int octaves = kDefaultOctaves,
                                 std::uint64_t seed = 0, double brightness = kDefaultBrightness,
                                 int base_cells = kDefaultBaseCells);

/// T(x) = exp(-beta * tau(x) * D(x)).
fog::TransmissionMap heterogeneous_transmission(const depth::MetricDepth& depth,
                                                const TurbulenceMap& tau,
                                                const fog::Attenuation& att);

}  // namespace fogsim::turbulence
