#include "fogsim/depthio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <sstream>
#include <vector>

#include "fogsim/error.hpp"

namespace fogsim::depth {

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("depth file not found: " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\n' || c == '\r' || c == '\t';
}

// Reads the next whitespace-delimited header token starting at pos.
std::string next_token(const std::vector<unsigned char>& bytes, std::size_t& pos,
                       const std::filesystem::path& path) {
    while (pos < bytes.size() && is_space(bytes[pos])) {
        ++pos;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !is_space(bytes[pos])) {
        ++pos;
    }
    if (start == pos) {
        throw FormatError("truncated PFM header in " + path.string());
    }
    return {bytes.begin() + static_cast<std::ptrdiff_t>(start),
            bytes.begin() + static_cast<std::ptrdiff_t>(pos)};
}

template <class T>
T parse_number(const std::string& token, const std::filesystem::path& path) {
    std::istringstream ss(token);
    T value{};
    ss >> value;
    if (!ss || !ss.eof()) {
        throw FormatError("malformed PFM header field '" + token + "' in " + path.string());
    }
    return value;
}

float decode_float(const unsigned char* p, bool little_endian) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, p, 4);
    const bool host_little = std::endian::native == std::endian::little;
    if (little_endian != host_little) {
        bits = ((bits & 0x000000FFu) << 24) | ((bits & 0x0000FF00u) << 8) |
               ((bits & 0x00FF0000u) >> 8) | ((bits & 0xFF000000u) >> 24);
    }
    return std::bit_cast<float>(bits);
}

void reject_non_finite(const RelativeInverseDepth& d, const std::filesystem::path& path) {
    const auto bad = static_cast<std::size_t>(std::count_if(
        d.values().begin(), d.values().end(), [](double v) { return !std::isfinite(v); }));
    if (bad > 0) {
        throw InvalidPixels(path.string() + ": " + std::to_string(bad) +
                                " non-finite depth value(s)",
                            bad);
    }
}

RelativeInverseDepth load_pfm(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    std::size_t pos = 0;
    const std::string magic = next_token(bytes, pos, path);
    if (magic == "PF") {
        throw FormatError(path.string() + ": 3-channel PFM, expected single-channel 'Pf'");
    }
    if (magic != "Pf") {
        throw FormatError(path.string() + ": not a PFM file");
    }
    const int width = parse_number<int>(next_token(bytes, pos, path), path);
    const int height = parse_number<int>(next_token(bytes, pos, path), path);
    const double scale = parse_number<double>(next_token(bytes, pos, path), path);
    if (width <= 0 || height <= 0) {
        throw FormatError(path.string() + ": PFM dimensions must be positive");
    }
    if (scale == 0.0 || !std::isfinite(scale)) {
        throw FormatError(path.string() + ": PFM scale/endianness field must be non-zero");
    }
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= bytes.size() || !is_space(bytes[pos])) {
        throw FormatError("truncated PFM header in " + path.string());
    }
    ++pos;

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos < 4 * count) {
        throw FormatError(path.string() + ": PFM raster is shorter than its header declares");
    }
    const bool little = scale < 0.0;
    RelativeInverseDepth d(width, height);
    for (int row = 0; row < height; ++row) {
        // PFM stores the bottom row first.
        const int y = height - 1 - row;
        const unsigned char* src = bytes.data() + pos + 4 * static_cast<std::size_t>(row) * width;
        for (int x = 0; x < width; ++x) {
            d(x, y) = decode_float(src + 4 * x, little);
        }
    }
    reject_non_finite(d, path);
    return d;
}

RelativeInverseDepth load_png16(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("depth file not found: " + path.string());
    }
    const cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) {
        throw FormatError("cannot decode depth PNG: " + path.string());
    }
    if (m.channels() != 1) {
        throw FormatError(path.string() + ": " + std::to_string(m.channels()) +
                          "-channel PNG, expected single-channel depth");
    }
    if (m.depth() != CV_16U) {
        throw FormatError(path.string() + ": expected 16-bit grayscale PNG");
    }
    RelativeInverseDepth d(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<std::uint16_t>(y);
        for (int x = 0; x < m.cols; ++x) {
            d(x, y) = row[x] / 65535.0;
        }
    }
    return d;
}

}  // namespace

DepthFormat depth_format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pfm") {
        return DepthFormat::pfm;
    }
    if (ext == ".png") {
        return DepthFormat::png16;
    }
    throw InvalidArgument("unknown depth file extension: " + path.string());
}

RelativeInverseDepth load_depth(const std::filesystem::path& path, DepthFormat format) {
    return format == DepthFormat::pfm ? load_pfm(path) : load_png16(path);
}

RelativeInverseDepth load_depth(const std::filesystem::path& path) {
    return load_depth(path, depth_format_from_path(path));
}

void write_pfm(const std::filesystem::path& path, const ScalarGrid& grid) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "Pf\n" << grid.width() << ' ' << grid.height() << "\n-1.0\n";
    std::vector<unsigned char> row(4 * static_cast<std::size_t>(grid.width()));
    for (int y = grid.height() - 1; y >= 0; --y) {
        for (int x = 0; x < grid.width(); ++x) {
            auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(grid(x, y)));
            for (int b = 0; b < 4; ++b) {
                row[4 * static_cast<std::size_t>(x) + b] = static_cast<unsigned char>(bits & 0xFF);
                bits >>= 8;
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) {
        throw IoError("short write to " + path.string());
    }
}

void write_png16(const std::filesystem::path& path, const ScalarGrid& grid) {
    cv::Mat m(grid.height(), grid.width(), CV_16UC1);
    for (int y = 0; y < grid.height(); ++y) {
        auto* row = m.ptr<std::uint16_t>(y);
        for (int x = 0; x < grid.width(); ++x) {
            row[x] = static_cast<std::uint16_t>(
                std::lround(std::clamp(grid(x, y), 0.0, 1.0) * 65535.0));
        }
    }
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    if (!cv::imwrite(path.string(), m)) {
        throw IoError("cannot write " + path.string());
    }
}

DepthCalibration calibrate(const SceneReference& ref) {
    if (!(ref.d_min > 0.0) || !std::isfinite(ref.d_max) || !(ref.d_min < ref.d_max)) {
        throw InvalidArgument("invalid scene reference: need 0 < d_min < d_max, got d_min=" +
                              std::to_string(ref.d_min) + " d_max=" + std::to_string(ref.d_max));
    }
    return {1.0 / ref.d_min - 1.0 / ref.d_max, 1.0 / ref.d_max};
}

MetricDepth to_metric(const RelativeInverseDepth& d, const DepthCalibration& cal) {
    if (!(cal.scale > 0.0) || !(cal.shift >= 0.0)) {
        throw InvalidArgument("invalid depth calibration: need scale > 0 and shift >= 0");
    }
    MetricDepth out(d.width(), d.height());
    std::size_t bad = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double inv = cal.scale * d[i] + cal.shift;
        if (!(inv > 0.0)) {
            ++bad;
            continue;
        }
        out[i] = 1.0 / inv;
    }
    if (bad > 0) {
        throw InvalidPixels(std::to_string(bad) +
                                " pixel(s) map to non-positive depth (miscalibration or "
                                "negative disparity)",
                            bad);
    }
    return out;
}

PseudoDepth to_pseudo_depth(const RelativeInverseDepth& d) {
    PseudoDepth result{MetricDepth(d.width(), d.height()), std::nullopt};
    result.depth.unit = DepthUnit::normalized;
    if (d.empty()) {
        throw InvalidArgument("empty depth map");
    }
    const auto [lo, hi] = d.minmax();
    if (!(hi > lo)) {
        std::fill(result.depth.values().begin(), result.depth.values().end(), 0.5);
        result.warning = "constant depth map (value " + std::to_string(lo) +
                         "); using uniform pseudo-depth 0.5";
        return result;
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double p = 1.0 - (d[i] - lo) / range;
        result.depth[i] = std::max(p, kPseudoDepthFloor);
    }
    return result;
}

}  // namespace fogsim::depth
