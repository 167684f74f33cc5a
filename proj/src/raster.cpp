#include "fogsim/raster.hpp"

#include <algorithm>
#include <numeric>

#include "fogsim/error.hpp"

namespace fogsim {

namespace {

std::size_t checked_area(int width, int height) {
    if (width < 0 || height < 0) {
        throw InvalidArgument("raster dimensions must be non-negative");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

ScalarGrid::ScalarGrid(int width, int height, double fill)
    : width_(width), height_(height), values_(checked_area(width, height), fill) {}

ScalarGrid::ScalarGrid(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (values_.size() != checked_area(width, height)) {
        throw DimensionMismatch("grid value count does not match width*height");
    }
}

std::pair<double, double> ScalarGrid::minmax() const {
    if (values_.empty()) {
        throw InvalidArgument("minmax of empty grid");
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    return {*lo, *hi};
}

double ScalarGrid::mean() const {
    if (values_.empty()) {
        throw InvalidArgument("mean of empty grid");
    }
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

RasterImage::RasterImage(int width, int height, double fill)
    : width_(width), height_(height), data_(3 * checked_area(width, height), fill) {}

RasterImage::RasterImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != 3 * checked_area(width, height)) {
        throw DimensionMismatch("image sample count does not match width*height*3");
    }
}

void RasterImage::set_pixel(int x, int y, const Color& c) noexcept {
    const auto o = offset(x, y);
    data_[o] = c[0];
    data_[o + 1] = c[1];
    data_[o + 2] = c[2];
}

}  // namespace fogsim
