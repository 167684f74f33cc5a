#include "fogsim/turbulence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fogsim/error.hpp"

namespace fogsim::turbulence {

namespace {

// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct Gradient {
    double gx;
    double gy;
};

Gradient corner_gradient(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(ix));
    h = mix64(h ^ static_cast<std::uint64_t>(iy));
    const double angle = static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
    return {std::cos(angle), std::sin(angle)};
}

double fade(double t) {
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
}

double lerp(double a, double b, double t) {
    return a + t * (b - a);
}

double noise_at(double u, double v, std::uint64_t seed) {
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const auto ix = static_cast<std::int64_t>(fu);
    const auto iy = static_cast<std::int64_t>(fv);
    const double dx = u - fu;
    const double dy = v - fv;

    const auto dot = [&](std::int64_t cx, std::int64_t cy, double ox, double oy) {
        const Gradient g = corner_gradient(ix + cx, iy + cy, seed);
        return g.gx * ox + g.gy * oy;
    };
    const double n00 = dot(0, 0, dx, dy);
    const double n10 = dot(1, 0, dx - 1.0, dy);
    const double n01 = dot(0, 1, dx, dy - 1.0);
    const double n11 = dot(1, 1, dx - 1.0, dy - 1.0);
    const double su = fade(dx);
    const double sv = fade(dy);
    return lerp(lerp(n00, n10, su), lerp(n01, n11, su), sv);
}

}  // namespace

NoiseField perlin(int width, int height, int cells, std::uint64_t seed) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("noise dimensions must be >= 1");
    }
    if (cells < 1) {
        throw InvalidArgument("lattice cell count must be >= 1");
    }
    NoiseField field(width, height);
    const double shorter = static_cast<double>(std::min(width, height));
    for (int y = 0; y < height; ++y) {
        const double v = static_cast<double>(y) * cells / shorter;
        for (int x = 0; x < width; ++x) {
            const double u = static_cast<double>(x) * cells / shorter;
            field(x, y) = noise_at(u, v, seed);
        }
    }
    return field;
}

NoiseField turbulence_sum(int width, int height, int octaves, std::uint64_t seed,
                          int base_cells) {
    if (octaves < 1) {
        throw InvalidArgument("octave count must be >= 1");
    }
    if (base_cells < 1) {
        throw InvalidArgument("base lattice cell count must be >= 1");
    }
    if (octaves > 24) {
        throw InvalidArgument("octave count " + std::to_string(octaves) + " is too large");
    }
    NoiseField sum(width, height);
    for (int n = 1; n <= octaves; ++n) {
        const int cells = base_cells << (n - 1);
        const NoiseField octave = perlin(width, height, cells, seed + static_cast<std::uint64_t>(n));
        const double amplitude = std::ldexp(1.0, -n);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += octave[i] * amplitude;
        }
    }
    return sum;
}

TurbulenceMap turbulence_texture(int width, int height, int octaves, std::uint64_t seed,
                                 double brightness, int base_cells) {
    if (!(brightness > 0.0 && brightness <= 1.0)) {
        throw InvalidArgument("turbulence brightness must lie in (0, 1]");
    }
    const NoiseField raw = turbulence_sum(width, height, octaves, seed, base_cells);
    const auto [lo, hi] = raw.minmax();
    if (!(hi > lo)) {
        throw InvalidArgument("turbulence octave sum is constant for a " + std::to_string(width) +
                              "x" + std::to_string(height) + " texture; enlarge it or add cells");
    }
    TurbulenceMap tau(width, height);
    tau.octaves = octaves;
    tau.brightness = brightness;
    const double span = hi - lo;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double normalized = (raw[i] - lo) / span;
        tau[i] = std::lerp(kTurbulenceFloor, brightness, normalized);
    }
    return tau;
}

fog::TransmissionMap heterogeneous_transmission(const depth::MetricDepth& depth,
                                                const TurbulenceMap& tau,
                                                const fog::Attenuation& att) {
    if (!depth.same_shape(tau)) {
        throw DimensionMismatch("turbulence map and depth map dimensions differ");
    }
    fog::TransmissionMap t(depth.width(), depth.height());
    constexpr double kTiny = std::numeric_limits<double>::min();
    for (std::size_t i = 0; i < depth.size(); ++i) {
        t[i] = std::max(std::exp(-att.beta() * tau[i] * depth[i]), kTiny);
    }
    return t;
}

}  // namespace fogsim::turbulence
