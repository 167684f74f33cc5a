#include "fogsim/atmolight.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fogsim/error.hpp"

namespace fogsim::light {

namespace {

// Sliding-window minimum along one axis with the window truncated at borders.
void min_filter_1d(const double* src, double* dst, int n, std::ptrdiff_t stride, int lo, int hi) {
    for (int i = 0; i < n; ++i) {
        const int a = std::max(0, i + lo);
        const int b = std::min(n - 1, i + hi);
        double m = src[a * stride];
        for (int j = a + 1; j <= b; ++j) {
            m = std::min(m, src[j * stride]);
        }
        dst[i * stride] = m;
    }
}

fog::AtmosphericLight mean_color_at(const RasterImage& img, const std::vector<std::size_t>& idx) {
    Color sum{0.0, 0.0, 0.0};
    for (std::size_t i : idx) {
        const Color p = img.pixel(i);
        for (std::size_t c = 0; c < 3; ++c) {
            sum[c] += p[c];
        }
    }
    const double n = static_cast<double>(idx.size());
    return fog::AtmosphericLight{{sum[0] / n, sum[1] / n, sum[2] / n}};
}

// Indices of the k largest keys; equal keys ordered by lower index first.
std::vector<std::size_t> top_k(std::span<const double> keys, std::size_t k) {
    std::vector<std::size_t> idx(keys.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          return keys[a] > keys[b] || (keys[a] == keys[b] && a < b);
                      });
    idx.resize(k);
    return idx;
}

void check_fraction(double f, const char* name) {
    if (!(f > 0.0 && f <= 1.0)) {
        throw InvalidArgument(std::string(name) + " must lie in (0, 1]");
    }
}

}  // namespace

std::size_t selection_count(double fraction, std::size_t n) {
    // The small slack keeps products like 0.1 * 70 = 7.000000000000001 at 7.
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    return std::clamp<std::size_t>(k, 1, n);
}

DarkChannelMap dark_channel(const RasterImage& img, PatchSpec patch) {
    if (img.empty()) {
        throw InvalidArgument("dark channel of empty image");
    }
    if (patch.size < 1) {
        throw InvalidArgument("patch size must be >= 1");
    }
    const int w = img.width();
    const int h = img.height();
    const int lo = -(patch.size / 2);
    const int hi = lo + patch.size - 1;

    DarkChannelMap channel_min(w, h);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const Color p = img.pixel(i);
        channel_min[i] = std::min({p[0], p[1], p[2]});
    }
    // A rectangular minimum separates into a row pass and a column pass.
    DarkChannelMap rows(w, h);
    for (int y = 0; y < h; ++y) {
        min_filter_1d(&channel_min.values()[channel_min.index(0, y)],
                      &rows.values()[rows.index(0, y)], w, 1, lo, hi);
    }
    DarkChannelMap out(w, h);
    for (int x = 0; x < w; ++x) {
        min_filter_1d(&rows.values()[static_cast<std::size_t>(x)],
                      &out.values()[static_cast<std::size_t>(x)], h, w, lo, hi);
    }
    return out;
}

fog::AtmosphericLight estimate_light_dcp(const RasterImage& img, PatchSpec patch,
                                         double top_fraction) {
    check_fraction(top_fraction, "top_fraction");
    const DarkChannelMap dark = dark_channel(img, patch);
    return mean_color_at(img, top_k(dark.values(), selection_count(top_fraction, dark.size())));
}

fog::AtmosphericLight estimate_light_sky(const RasterImage& img, const depth::MetricDepth& depth,
                                         double far_fraction) {
    check_fraction(far_fraction, "far_fraction");
    if (!img.same_shape(depth)) {
        throw DimensionMismatch("image and depth map dimensions differ");
    }
    if (img.empty()) {
        throw InvalidArgument("sky light estimate of empty image");
    }
    return mean_color_at(img, top_k(depth.values(), selection_count(far_fraction, depth.size())));
}

}  // namespace fogsim::light
