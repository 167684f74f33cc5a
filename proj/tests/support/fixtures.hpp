#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fogsim/depthio.hpp"
#include "fogsim/image_io.hpp"
#include "fogsim/raster.hpp"

namespace fixtures {

namespace fs = std::filesystem;

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        const auto base = fs::temp_directory_path();
        for (;;) {
            path_ = base / ("fogsim-test-" + std::to_string(rd()));
            if (fs::create_directory(path_)) {
                break;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const std::string& s) const { return path_ / s; }

private:
    fs::path path_;
};

inline fogsim::RasterImage random_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    fogsim::RasterImage img(w, h);
    for (auto& v : img.data()) {
        v = u(rng);
    }
    return img;
}

/// Random image whose values are exact 8-bit levels, so PNG round trips are lossless.
inline fogsim::RasterImage random_u8_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(0, 255);
    fogsim::RasterImage img(w, h);
    for (auto& v : img.data()) {
        v = u(rng) / 255.0;
    }
    return img;
}

inline fogsim::ScalarGrid random_grid(int w, int h, std::uint64_t seed, double lo = 0.0,
                                      double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    fogsim::ScalarGrid g(w, h);
    for (auto& v : g.values()) {
        v = u(rng);
    }
    return g;
}

inline void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct SequenceSpec {
    std::string name = "SEQ-01";
    int frames = 3;
    int width = 32;
    int height = 24;
    std::uint64_t seed = 1;
    std::string extension = ".png";
    bool write_depth = true;
    bool png16_depth = false;
};

/// MOT-style sequence: img1/ frames, depth/ inverse-depth maps growing toward
/// the bottom rows, gt/gt.txt and seqinfo.ini.
inline fs::path make_sequence(const fs::path& root, const SequenceSpec& s) {
    const fs::path seq = root / s.name;
    fs::create_directories(seq / "img1");
    fs::create_directories(seq / "gt");
    write_text(seq / "seqinfo.ini",
               "[Sequence]\nname=" + s.name + "\nimDir=img1\nframeRate=30\nseqLength=" +
                   std::to_string(s.frames) + "\nimWidth=" + std::to_string(s.width) +
                   "\nimHeight=" + std::to_string(s.height) + "\nimExt=" + s.extension + "\n");
    std::string gt;
    for (int f = 1; f <= s.frames; ++f) {
        char stem[16];
        std::snprintf(stem, sizeof stem, "%06d", f);
        fogsim::WriteOptions opt;
        opt.encoding = s.extension == ".png" ? fogsim::ImageEncoding::png : fogsim::ImageEncoding::jpeg;
        fogsim::write_image(seq / "img1" / (std::string(stem) + s.extension),
                            random_u8_image(s.width, s.height, s.seed * 1000 + f), opt);
        if (s.write_depth) {
            fogsim::ScalarGrid d(s.width, s.height);
            for (int y = 0; y < s.height; ++y) {
                for (int x = 0; x < s.width; ++x) {
                    d(x, y) = (y + 1.0) / s.height + 0.01 * std::sin(x + f);
                }
            }
            fs::create_directories(seq / "depth");
            if (s.png16_depth) {
                for (auto& v : d.values()) {
                    v = std::clamp(v, 0.0, 1.0);
                }
                fogsim::depth::write_png16(seq / "depth" / (std::string(stem) + ".png"), d);
            } else {
                fogsim::depth::write_pfm(seq / "depth" / (std::string(stem) + ".pfm"), d);
            }
        }
        gt += std::to_string(f) + ",1," + std::to_string(2 + f) + ",4,8,12,1,1,1\n";
        gt += std::to_string(f) + ",2,18,6,6,10,1,1,0.5\n";
    }
    write_text(seq / "gt" / "gt.txt", gt);
    return seq;
}

}  // namespace fixtures
