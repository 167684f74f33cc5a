#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace fogsim {

/// Dense H x W field of doubles, stored row-major top-to-bottom.
class ScalarGrid {
public:
    ScalarGrid() = default;
    ScalarGrid(int width, int height, double fill = 0.0);
    ScalarGrid(int width, int height, std::vector<double> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    double operator()(int x, int y) const noexcept { return values_[index(x, y)]; }
    double& operator()(int x, int y) noexcept { return values_[index(x, y)]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool same_shape(const ScalarGrid& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// (min, max) over all values. Grid must be non-empty.
    std::pair<double, double> minmax() const;
    double mean() const;

    friend bool operator==(const ScalarGrid&, const ScalarGrid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

using Color = std::array<double, 3>;

/// H x W x 3 RGB raster with channel values in [0,1], interleaved row-major.
class RasterImage {
public:
    static constexpr int kChannels = 3;

    RasterImage() = default;
    RasterImage(int width, int height, double fill = 0.0);
    RasterImage(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    bool empty() const noexcept { return data_.empty(); }

    double at(int x, int y, int c) const noexcept { return data_[offset(x, y) + c]; }
    double& at(int x, int y, int c) noexcept { return data_[offset(x, y) + c]; }

    Color pixel(std::size_t i) const noexcept {
        return {data_[3 * i], data_[3 * i + 1], data_[3 * i + 2]};
    }
    void set_pixel(int x, int y, const Color& c) noexcept;

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    template <class Grid>
    bool same_shape(const Grid& g) const noexcept {
        return width_ == g.width() && height_ == g.height();
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t offset(int x, int y) const noexcept {
        return 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x));
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

}  // namespace fogsim
