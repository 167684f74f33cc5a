#include <gtest/gtest.h>

#include <algorithm>

#include "fogsim/atmolight.hpp"
#include "fogsim/error.hpp"
#include "oracles/naive_image_ops.hpp"
#include "support/fixtures.hpp"

using namespace fogsim;
using namespace fogsim::light;

TEST(DarkChannel, ConstantImage) {
    RasterImage img(11, 6, 0.37);
    for (int k : {1, 2, 5, 10, 30}) {
        const auto dc = dark_channel(img, {k});
        for (double v : dc.values()) {
            EXPECT_EQ(v, 0.37);
        }
    }
}

TEST(DarkChannel, PatchOneIsChannelMinimum) {
    const auto img = fixtures::random_image(13, 9, 8);
    const auto dc = dark_channel(img, {1});
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const auto p = img.pixel(i);
        EXPECT_EQ(dc[i], std::min({p[0], p[1], p[2]}));
    }
}

TEST(DarkChannel, MatchesNaiveOracle) {
    std::uint64_t seed = 40;
    for (int k : {10, 3, 4, 7, 16, 40}) {
        for (auto [w, h] : {std::pair{16, 16}, std::pair{21, 13}, std::pair{5, 30}}) {
            const auto img = fixtures::random_image(w, h, ++seed);
            const auto dc = dark_channel(img, {k});
            const auto want = oracle::dark_channel(img, k);
            ASSERT_EQ(dc.size(), want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                EXPECT_EQ(dc[i], want[i]) << "k=" << k << " i=" << i;
            }
        }
    }
}

TEST(DarkChannel, BoundedByChannelMinAndMonotone) {
    auto img = fixtures::random_image(20, 20, 9);
    const auto before = dark_channel(img, {10});
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const auto p = img.pixel(i);
        EXPECT_LE(before[i], std::min({p[0], p[1], p[2]}));
    }
    for (int c = 0; c < 3; ++c) {
        img.at(7, 11, c) = std::min(1.0, img.at(7, 11, c) + 0.5);
    }
    const auto after = dark_channel(img, {10});
    for (std::size_t i = 0; i < after.size(); ++i) {
        EXPECT_GE(after[i], before[i]);
    }
}

TEST(DarkChannel, RejectsBadInput) {
    EXPECT_THROW(dark_channel(RasterImage(), {3}), InvalidArgument);
    EXPECT_THROW(dark_channel(RasterImage(2, 2), {0}), InvalidArgument);
}

TEST(SelectionCount, CeilingAndClamp) {
    EXPECT_EQ(selection_count(0.1, 64), 7u);
    EXPECT_EQ(selection_count(0.1, 100), 10u);
    EXPECT_EQ(selection_count(0.05, 1024), 52u);
    EXPECT_EQ(selection_count(1e-9, 10), 1u);
    EXPECT_EQ(selection_count(1.0, 10), 10u);
    EXPECT_THROW(estimate_light_dcp(RasterImage(4, 4), {3}, 0.0), InvalidArgument);
    EXPECT_THROW(estimate_light_dcp(RasterImage(4, 4), {3}, 1.5), InvalidArgument);
}

TEST(DcpLight, AllWhite) {
    const auto l = estimate_light_dcp(RasterImage(10, 10, 1.0), {10});
    EXPECT_EQ(l.color, (Color{1.0, 1.0, 1.0}));
}

TEST(DcpLight, BrightHalfWins) {
    RasterImage img(10, 10, 0.0);
    for (int y = 5; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
            img.set_pixel(x, y, {0.8, 0.8, 0.8});
        }
    }
    const auto l = estimate_light_dcp(img, {1});
    for (double c : l.color) {
        EXPECT_NEAR(c, 0.8, 1e-15);
    }
}

TEST(DcpLight, CraftedClusterMatchesSortOracle) {
    // 8x8 dim background with a 7-pixel bright cluster: ceil(0.1 * 64) = 7.
    auto img = fixtures::random_image(8, 8, 12);
    for (auto& v : img.data()) {
        v *= 0.3;
    }
    const std::vector<std::pair<int, int>> cluster{{5, 1}, {6, 1}, {7, 1}, {5, 2}, {6, 2}, {7, 2}, {6, 3}};
    Color want{0, 0, 0};
    for (std::size_t n = 0; n < cluster.size(); ++n) {
        const Color c{0.9 + 0.01 * n, 0.85, 0.95 - 0.005 * n};
        img.set_pixel(cluster[n].first, cluster[n].second, c);
        for (int k = 0; k < 3; ++k) {
            want[k] += c[k] / 7.0;
        }
    }
    const auto l = estimate_light_dcp(img, {1});
    const auto oracle_l = oracle::mean_of_top(img, oracle::dark_channel(img, 1), 7);
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(l.color[k], oracle_l[k]);
        EXPECT_NEAR(l.color[k], want[k], 1e-12);
    }
}

TEST(DcpLight, MatchesSortOracleWithTies) {
    for (std::uint64_t s = 0; s < 15; ++s) {
        auto img = fixtures::random_u8_image(17, 12, 300 + s);
        // Coarse quantisation forces many tied dark-channel values.
        for (auto& v : img.data()) {
            v = std::floor(v * 4.0) / 4.0;
        }
        for (int k : {1, 4, 10}) {
            const auto l = estimate_light_dcp(img, {k}, 0.1);
            const auto want = oracle::mean_of_top(img, oracle::dark_channel(img, k),
                                                  selection_count(0.1, img.pixel_count()));
            EXPECT_EQ(l.color, want);
        }
    }
}

TEST(DcpLight, WithinImageRange) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto img = fixtures::random_image(15, 15, 500 + s);
        const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
        const auto l = estimate_light_dcp(img, {10});
        for (double c : l.color) {
            EXPECT_GE(c, *lo);
            EXPECT_LE(c, *hi);
        }
    }
}

TEST(SkyLight, UniformDepthTakesFirstPixels) {
    const auto img = fixtures::random_image(10, 10, 13);
    const auto l = estimate_light_sky(img, depth::MetricDepth(10, 10, 1.0));
    Color want{0, 0, 0};
    for (std::size_t i = 0; i < 5; ++i) {
        for (int k = 0; k < 3; ++k) {
            want[k] += img.pixel(i)[k];
        }
    }
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(l.color[k], want[k] / 5.0, 1e-15);
    }
}

TEST(SkyLight, SkyColoredTopRows) {
    RasterImage img(20, 10, 0.2);
    depth::MetricDepth d(20, 10);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 20; ++x) {
            d(x, y) = 100.0 - 10.0 * y + 0.01 * x;
            if (y == 0) {
                img.set_pixel(x, y, {0.7, 0.8, 0.9});
            }
        }
    }
    const auto l = estimate_light_sky(img, d);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(l.color[k], 0.7 + 0.1 * k, 1e-15);
    }
}

TEST(SkyLight, MatchesSortOracle) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto img = fixtures::random_image(14, 9, 700 + s);
        const auto g = fixtures::random_grid(14, 9, 800 + s, 1.0, 3.0);
        std::vector<double> keys(g.values().begin(), g.values().end());
        if (s % 2) {
            for (auto& v : keys) {
                v = std::round(v);  // heavy ties
            }
        }
        depth::MetricDepth d(14, 9, keys);
        const auto l = estimate_light_sky(img, d, 0.05);
        EXPECT_EQ(l.color, oracle::mean_of_top(img, keys, selection_count(0.05, keys.size())));
    }
}

TEST(SkyLight, DimensionMismatch) {
    EXPECT_THROW(estimate_light_sky(RasterImage(4, 4), depth::MetricDepth(4, 5, 1.0)), DimensionMismatch);
}
