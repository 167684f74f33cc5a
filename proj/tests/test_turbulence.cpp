#include <gtest/gtest.h>

#include <cmath>

#include "fogsim/checksum.hpp"
#include "fogsim/error.hpp"
#include "fogsim/fogmodel.hpp"
#include "fogsim/turbulence.hpp"
#include "support/fixtures.hpp"

using namespace fogsim;
using namespace fogsim::turbulence;

TEST(Perlin, ZeroAtLatticeCorners) {
    // 64 px across 4 cells on the shorter axis: corners every 16 px.
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        const auto n = perlin(96, 64, 4, seed);
        for (int y = 0; y < 64; y += 16) {
            for (int x = 0; x < 96; x += 16) {
                EXPECT_EQ(n(x, y), 0.0) << x << "," << y;
            }
        }
        EXPECT_NE(n(5, 7), 0.0);
    }
}

TEST(Perlin, Deterministic) {
    EXPECT_EQ(perlin(40, 30, 3, 17), perlin(40, 30, 3, 17));
    EXPECT_NE(perlin(40, 30, 3, 17), perlin(40, 30, 3, 18));
}

TEST(Perlin, RangeOver512Square) {
    for (std::uint64_t seed : {3ull, 12345ull}) {
        for (int cells : {1, 7, 64}) {
            const auto n = perlin(512, 512, cells, seed);
            const auto [lo, hi] = n.minmax();
            EXPECT_GE(lo, -1.0);
            EXPECT_LE(hi, 1.0);
        }
    }
}

TEST(Perlin, RejectsBadArguments) {
    EXPECT_THROW(perlin(0, 4, 1, 0), InvalidArgument);
    EXPECT_THROW(perlin(4, 4, 0, 0), InvalidArgument);
}

TEST(Turbulence, RangeEndpointsAttained) {
    const auto tau = turbulence_texture(80, 60, 5, 42, 0.8);
    const auto [lo, hi] = tau.minmax();
    EXPECT_EQ(lo, kTurbulenceFloor);
    EXPECT_EQ(hi, 0.8);
    EXPECT_EQ(tau.octaves, 5);
    EXPECT_EQ(tau.brightness, 0.8);
}

TEST(Turbulence, Deterministic) {
    const auto a = turbulence_texture(50, 40, 5, 9);
    const auto b = turbulence_texture(50, 40, 5, 9);
    EXPECT_EQ(grid_digest(a), grid_digest(b));
    EXPECT_NE(grid_digest(a), grid_digest(turbulence_texture(50, 40, 5, 10)));
}

TEST(Turbulence, OctaveSumMatchesIndependentRecomputation) {
    const int w = 48, h = 36;
    const std::uint64_t seed = 77;
    const auto raw = turbulence_sum(w, h, 2, seed, 4);
    const auto p1 = perlin(w, h, 4, seed + 1);
    const auto p2 = perlin(w, h, 8, seed + 2);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        EXPECT_EQ(raw[i], p1[i] / 2.0 + p2[i] / 4.0);
    }

    // Normalisation on top of the same sum.
    const auto tau = turbulence_texture(w, h, 2, seed, 0.8, 4);
    const auto [lo, hi] = raw.minmax();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        EXPECT_NEAR(tau[i], 0.2 + 0.6 * (raw[i] - lo) / (hi - lo), 1e-12);
    }
}

TEST(Turbulence, RejectsBadArguments) {
    EXPECT_THROW(turbulence_texture(10, 10, 0), InvalidArgument);
    EXPECT_THROW(turbulence_texture(10, 10, 5, 0, 0.0), InvalidArgument);
    EXPECT_THROW(turbulence_texture(10, 10, 5, 0, 1.5), InvalidArgument);
    // A single pixel sits on a lattice corner in every octave.
    EXPECT_THROW(turbulence_texture(1, 1, 3), InvalidArgument);
}

TEST(HeterogeneousTransmission, Examples) {
    depth::MetricDepth d(1, 1, 1000.0);
    TurbulenceMap half(1, 1, 0.5);
    const auto att = fog::Attenuation::from_beta(0.003);
    EXPECT_NEAR(heterogeneous_transmission(d, half, att)[0], 0.22313016014842982, 1e-12);

    const auto g = fixtures::random_grid(9, 6, 4, 0.1, 50.0);
    depth::MetricDepth depth(9, 6, std::vector<double>(g.values().begin(), g.values().end()));
    EXPECT_EQ(static_cast<const ScalarGrid&>(heterogeneous_transmission(depth, TurbulenceMap(9, 6, 1.0), att)),
              static_cast<const ScalarGrid&>(fog::transmission(depth, att)));
}

TEST(HeterogeneousTransmission, BoundedByHomogeneousExtremes) {
    const auto g = fixtures::random_grid(40, 30, 6, 0.1, 3.0);
    depth::MetricDepth depth(40, 30, std::vector<double>(g.values().begin(), g.values().end()));
    const auto tau = turbulence_texture(40, 30, 5, 3);
    const auto att = fog::Attenuation::from_beta(1.7);
    const auto het = heterogeneous_transmission(depth, tau, att);
    const auto [tmin, tmax] = tau.minmax();
    const auto hom = fog::transmission(depth, att);
    const auto thin = fog::transmission(depth, fog::Attenuation::from_beta(1.7 * tmin));
    const auto thick = fog::transmission(depth, fog::Attenuation::from_beta(1.7 * tmax));
    for (std::size_t i = 0; i < het.size(); ++i) {
        EXPECT_GE(het[i], hom[i]);  // tau <= 1
        EXPECT_LE(het[i], thin[i] + 1e-15);
        EXPECT_GE(het[i], thick[i] - 1e-15);
    }
}

TEST(HeterogeneousTransmission, DimensionMismatch) {
    EXPECT_THROW(heterogeneous_transmission(depth::MetricDepth(3, 3, 1.0), TurbulenceMap(3, 2, 0.5),
                                            fog::Attenuation::from_beta(1.0)),
                 DimensionMismatch);
}
