#include "fogsim/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <vector>

#include "fogsim/error.hpp"

namespace fogsim {

std::uint8_t quantize_u8(double v) noexcept {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

RasterImage read_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("image not found: " + path.string());
    }
    const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) {
        throw FormatError("cannot decode image: " + path.string());
    }
    RasterImage img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            // OpenCV decodes to BGR.
            img.at(x, y, 0) = row[x][2] / 255.0;
            img.at(x, y, 1) = row[x][1] / 255.0;
            img.at(x, y, 2) = row[x][0] / 255.0;
        }
    }
    return img;
}

namespace {

void encode_to_file(const std::filesystem::path& path, const cv::Mat& mat,
                    const WriteOptions& options) {
    std::vector<int> params;
    std::string ext;
    if (options.encoding == ImageEncoding::jpeg) {
        ext = ".jpg";
        params = {cv::IMWRITE_JPEG_QUALITY, options.jpeg_quality};
    } else {
        ext = ".png";
        params = {cv::IMWRITE_PNG_COMPRESSION, 3};
    }
    std::vector<uchar> bytes;
    // Encoder is chosen from options, not from the file name, so a frame can
    // keep its original name regardless of the codec.
    if (!cv::imencode(ext, mat, bytes, params)) {
        throw IoError("failed to encode " + path.string());
    }
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    FILE* f = std::fopen(path.string().c_str(), "wb");
    if (f == nullptr) {
        throw IoError("cannot write " + path.string());
    }
    const auto written = std::fwrite(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
    if (written != bytes.size()) {
        throw IoError("short write to " + path.string());
    }
}

}  // namespace

void write_image(const std::filesystem::path& path, const RasterImage& image,
                 const WriteOptions& options) {
    cv::Mat bgr(image.height(), image.width(), CV_8UC3);
    for (int y = 0; y < image.height(); ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width(); ++x) {
            row[x][2] = quantize_u8(image.at(x, y, 0));
            row[x][1] = quantize_u8(image.at(x, y, 1));
            row[x][0] = quantize_u8(image.at(x, y, 2));
        }
    }
    encode_to_file(path, bgr, options);
}

void write_gray_png(const std::filesystem::path& path, const ScalarGrid& grid) {
    cv::Mat gray(grid.height(), grid.width(), CV_8UC1);
    for (int y = 0; y < grid.height(); ++y) {
        auto* row = gray.ptr<uchar>(y);
        for (int x = 0; x < grid.width(); ++x) {
            row[x] = quantize_u8(grid(x, y));
        }
    }
    encode_to_file(path, gray, WriteOptions{ImageEncoding::png, 0});
}

}  // namespace fogsim
