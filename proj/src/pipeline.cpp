#include "fogsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fogsim/checksum.hpp"
#include "fogsim/error.hpp"
#include "fogsim/image_io.hpp"

namespace fs = std::filesystem;

namespace fogsim::pipeline {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_image_file(const fs::path& p) {
    const auto ext = lower(p.extension().string());
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// seqinfo.ini is a flat key=value file under a [Sequence] header.
std::vector<std::pair<std::string, std::string>> read_ini(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line.front() == '[' || line.front() == ';' || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

struct PreparedDepth {
    depth::MetricDepth depth;
    std::optional<std::string> warning;
};

PreparedDepth prepare_depth(const SequenceDescriptor& seq, const std::string& frame,
                            const FogConfig& cfg) {
    const auto rel = depth::load_depth(find_depth_file(seq, frame));
    if (cfg.calibration) {
        return {depth::to_metric(rel, depth::calibrate(*cfg.calibration)), std::nullopt};
    }
    auto pseudo = depth::to_pseudo_depth(rel);
    if (pseudo.warning) {
        pseudo.warning = frame + ": " + *pseudo.warning;
    }
    return {std::move(pseudo.depth), std::move(pseudo.warning)};
}

void check_same_shape(const RasterImage& img, const depth::MetricDepth& d, const std::string& frame) {
    if (!img.same_shape(d)) {
        throw DimensionMismatch("frame " + frame + ": image is " + std::to_string(img.width()) +
                                "x" + std::to_string(img.height()) + " but depth is " +
                                std::to_string(d.width()) + "x" + std::to_string(d.height()));
    }
}

fog::AtmosphericLight estimate_light(const FogConfig& cfg, const RasterImage& img,
                                     const depth::MetricDepth& d) {
    switch (cfg.light_strategy) {
        case LightStrategy::dcp:
            return light::estimate_light_dcp(img, cfg.patch, cfg.top_fraction);
        case LightStrategy::sky:
            return light::estimate_light_sky(img, d, cfg.far_fraction);
        case LightStrategy::fixed:
            return fog::make_light(cfg.fixed_light);
    }
    throw InvalidArgument("unknown light strategy");
}

std::string intensity_label(const FogConfig& cfg) {
    std::string s = cfg.level ? "level:" + std::to_string(*cfg.level)
                              : "visibility:" + format_double(*cfg.visibility_m);
    if (cfg.beta_override) {
        s += " beta_override:" + format_double(*cfg.beta_override);
    }
    return s;
}

// Runs job(i) for i in [0, n) on up to `workers` threads; rethrows the first failure.
template <class Job>
void parallel_for(std::size_t n, unsigned workers, Job&& job) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = n;
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(run);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void copy_tree(const fs::path& from, const fs::path& to) {
    fs::create_directories(to);
    fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

}  // namespace

std::string to_string(FogMode mode) {
    return mode == FogMode::homogeneous ? "homogeneous" : "heterogeneous";
}

std::string to_string(LightStrategy strategy) {
    switch (strategy) {
        case LightStrategy::dcp:
            return "dcp";
        case LightStrategy::sky:
            return "sky";
        case LightStrategy::fixed:
            return "fixed";
    }
    return "?";
}

void FogConfig::validate() const {
    if (visibility_m.has_value() == level.has_value()) {
        throw InvalidArgument("exactly one of visibility or fog level must be set");
    }
    if (level && (*level < 1 || *level > fog::FogLevelLadder::kLevels)) {
        throw InvalidArgument("fog level must be in 1..4");
    }
    if (visibility_m && !(*visibility_m > 0.0)) {
        throw InvalidArgument("visibility must be positive");
    }
    if (visibility_m && !calibration) {
        throw InvalidArgument("visibility in meters needs metric depth: set d_min/d_max");
    }
    if (level && calibration) {
        throw InvalidArgument("fog levels use normalized pseudo-depth; d_min/d_max apply only "
                              "with a visibility");
    }
    if (calibration) {
        depth::calibrate(*calibration);
    }
    if (patch.size < 1) {
        throw InvalidArgument("patch size must be >= 1");
    }
    if (!(top_fraction > 0.0 && top_fraction <= 1.0) || !(far_fraction > 0.0 && far_fraction <= 1.0)) {
        throw InvalidArgument("light selection fractions must lie in (0, 1]");
    }
    if (octaves < 1 || base_cells < 1) {
        throw InvalidArgument("octaves and base lattice cells must be >= 1");
    }
    if (!(brightness > 0.0 && brightness <= 1.0)) {
        throw InvalidArgument("turbulence brightness must lie in (0, 1]");
    }
    if (light_strategy == LightStrategy::fixed) {
        fog::make_light(fixed_light);
    }
    if (jpeg_quality < 0 || jpeg_quality > 100) {
        throw InvalidArgument("JPEG quality must be in 0..100");
    }
    if (beta_override && !(*beta_override >= 0.0)) {
        throw InvalidArgument("beta override must be >= 0");
    }
}

fog::Attenuation FogConfig::attenuation() const {
    if (beta_override) {
        return *beta_override == 0.0 ? fog::Attenuation::clear()
                                     : fog::Attenuation::from_beta(*beta_override);
    }
    if (visibility_m) {
        return fog::Attenuation::from_visibility(*visibility_m);
    }
    return ladder.attenuation(level.value_or(0));
}

SequenceDescriptor describe_sequence(const fs::path& sequence_root,
                                     const std::optional<fs::path>& depth_root) {
    if (!fs::is_directory(sequence_root)) {
        throw IoError("sequence directory not found: " + sequence_root.string());
    }
    SequenceDescriptor seq;
    seq.root = sequence_root;
    seq.name = sequence_root.filename().string();
    if (seq.name.empty()) {
        seq.name = sequence_root.parent_path().filename().string();
    }
    std::string image_dir_name = "img1";
    const auto ini = sequence_root / "seqinfo.ini";
    if (fs::exists(ini)) {
        for (const auto& [key, value] : read_ini(ini)) {
            if (key == "imDir") {
                image_dir_name = value;
            } else if (key == "frameRate") {
                seq.frame_rate = std::atof(value.c_str());
            } else if (key == "imWidth") {
                seq.width = std::atoi(value.c_str());
            } else if (key == "imHeight") {
                seq.height = std::atoi(value.c_str());
            }
        }
    }
    seq.image_dir = sequence_root / image_dir_name;
    seq.depth_dir = depth_root ? *depth_root / seq.name : sequence_root / "depth";
    if (!fs::is_directory(seq.image_dir)) {
        throw IoError(seq.name + ": image directory not found: " + seq.image_dir.string());
    }
    for (const auto& entry : fs::directory_iterator(seq.image_dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            seq.frames.push_back(entry.path().filename().string());
        }
    }
    if (seq.frames.empty()) {
        throw IoError(seq.name + ": no frames in " + seq.image_dir.string());
    }
    std::sort(seq.frames.begin(), seq.frames.end());

    const std::size_t width = fs::path(seq.frames.front()).stem().string().size();
    long previous = -1;
    for (const auto& f : seq.frames) {
        const auto stem = fs::path(f).stem().string();
        if (!all_digits(stem) || stem.size() != width) {
            throw FormatError(seq.name + ": frame name '" + f +
                              "' is not a zero-padded integer of width " + std::to_string(width));
        }
        const long index = std::stol(stem);
        if (previous >= 0 && index != previous + 1) {
            throw FormatError(seq.name + ": frame numbering is not consecutive at '" + f + "'");
        }
        previous = index;
    }
    return seq;
}

fs::path find_depth_file(const SequenceDescriptor& seq, const std::string& frame) {
    const auto stem = fs::path(frame).stem().string();
    for (const char* ext : {".pfm", ".png"}) {
        auto p = seq.depth_dir / (stem + ext);
        if (fs::exists(p)) {
            return p;
        }
    }
    throw IoError(seq.name + ": missing depth file for frame " + frame + " in " +
                  seq.depth_dir.string());
}

std::string SequenceManifest::to_text() const {
    std::ostringstream out;
    out << "# fog render manifest\n";
    out << "sequence=" << sequence << '\n';
    out << "mode=" << to_string(mode) << '\n';
    out << "intensity=" << intensity << '\n';
    out << "beta=" << format_double(beta) << '\n';
    out << "seed=" << seed << '\n';
    out << "light_strategy=" << to_string(light_strategy) << '\n';
    out << "light=" << format_double(light[0]) << ',' << format_double(light[1]) << ','
        << format_double(light[2]) << '\n';
    out << "depth=" << (metric_depth ? "metric" : "normalized") << '\n';
    out << "tau_sha256=" << tau_sha256.value_or("none") << '\n';
    out << "frames=" << frames.size() << '\n';
    for (const auto& f : frames) {
        out << "frame=" << f.name << " in=" << f.input_sha256 << " out=" << f.output_sha256
            << " tau=" << f.tau_sha256.value_or("none")
            << " mean_t=" << format_double(f.mean_transmission) << '\n';
        if (f.warning) {
            out << "warning=" << *f.warning << '\n';
        }
    }
    return out.str();
}

SequenceManifest render_sequence(const SequenceDescriptor& seq, const FogConfig& cfg,
                                 const fs::path& out_root) {
    cfg.validate();
    if (seq.frames.empty()) {
        throw InvalidArgument(seq.name + ": sequence has no frames");
    }
    const fs::path out_seq = out_root / seq.name;
    const fs::path out_images = out_seq / seq.image_dir.filename();
    fs::create_directories(out_images);

    // Sequential prologue: airlight from the first frame, one turbulence texture.
    const RasterImage first = read_image(seq.image_dir / seq.frames.front());
    const PreparedDepth first_depth = prepare_depth(seq, seq.frames.front(), cfg);
    check_same_shape(first, first_depth.depth, seq.frames.front());

    SequenceManifest manifest;
    manifest.sequence = seq.name;
    manifest.mode = cfg.mode;
    manifest.intensity = intensity_label(cfg);
    manifest.seed = cfg.seed;
    manifest.light_strategy = cfg.light_strategy;
    manifest.metric_depth = cfg.calibration.has_value();

    const fog::AtmosphericLight airlight = estimate_light(cfg, first, first_depth.depth);
    const fog::Attenuation att = cfg.attenuation();
    manifest.light = airlight.color;
    manifest.beta = att.beta();

    std::optional<turbulence::TurbulenceMap> tau;
    if (cfg.mode == FogMode::heterogeneous) {
        tau = turbulence::turbulence_texture(first.width(), first.height(), cfg.octaves, cfg.seed,
                                             cfg.brightness, cfg.base_cells);
        manifest.tau_sha256 = grid_digest(*tau);
        if (cfg.debug_turbulence) {
            write_gray_png(out_seq / "turbulence.png", *tau);
        }
    }

    const WriteOptions write_options{cfg.lossless ? ImageEncoding::png : ImageEncoding::jpeg,
                                     cfg.jpeg_quality};
    manifest.frames.resize(seq.frames.size());
    parallel_for(seq.frames.size(), worker_count(), [&](std::size_t i) {
        const std::string& name = seq.frames[i];
        const fs::path in_path = seq.image_dir / name;
        const RasterImage img = read_image(in_path);
        const PreparedDepth d = prepare_depth(seq, name, cfg);
        check_same_shape(img, d.depth, name);

        fog::TransmissionMap t;
        FrameRecord rec;
        if (tau) {
            if (!img.same_shape(*tau)) {
                throw DimensionMismatch("frame " + name + " resolution differs from the first frame");
            }
            t = turbulence::heterogeneous_transmission(d.depth, *tau, att);
            rec.tau_sha256 = grid_digest(*tau);
        } else {
            t = fog::transmission(d.depth, att);
        }
        const fs::path out_path = out_images / name;
        write_image(out_path, fog::composite(img, t, airlight), write_options);

        rec.name = name;
        rec.input_sha256 = sha256_file(in_path);
        rec.output_sha256 = sha256_file(out_path);
        rec.mean_transmission = t.mean();
        rec.warning = d.warning;
        manifest.frames[i] = std::move(rec);
    });

    for (const auto& f : manifest.frames) {
        if (f.warning) {
            std::cerr << "warning: " << seq.name << ": " << *f.warning << '\n';
        }
    }
    std::ofstream(out_seq / kManifestName) << manifest.to_text();
    return manifest;
}

std::size_t DatasetResult::failures() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(sequences.begin(), sequences.end(), [](const auto& s) { return !s.ok(); }));
}

std::vector<fs::path> find_sequences(const fs::path& root) {
    if (!fs::is_directory(root)) {
        throw IoError("input directory not found: " + root.string());
    }
    const auto is_sequence = [](const fs::path& dir) {
        return fs::exists(dir / "seqinfo.ini") || fs::is_directory(dir / "img1");
    };
    if (is_sequence(root)) {
        return {root};
    }
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && is_sequence(entry.path())) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t sequence_seed(std::uint64_t seed, const std::string& sequence_name) {
    return seed ^ stable_hash64(sequence_name);
}

DatasetResult render_dataset(const fs::path& root, const FogConfig& cfg, const fs::path& out_root) {
    cfg.validate();
    const auto sequences = find_sequences(root);
    if (sequences.empty()) {
        throw IoError("no sequences found in " + root.string());
    }
    DatasetResult result;
    for (const auto& dir : sequences) {
        SequenceOutcome outcome;
        outcome.name = dir.filename().string();
        try {
            const auto seq = describe_sequence(dir, cfg.depth_dir);
            outcome.name = seq.name;
            FogConfig seq_cfg = cfg;
            seq_cfg.seed = sequence_seed(cfg.seed, seq.name);
            outcome.manifest = render_sequence(seq, seq_cfg, out_root);
            if (fs::is_directory(dir / "gt")) {
                copy_tree(dir / "gt", out_root / seq.name / "gt");
            }
            if (fs::exists(dir / "seqinfo.ini")) {
                fs::copy_file(dir / "seqinfo.ini", out_root / seq.name / "seqinfo.ini",
                              fs::copy_options::overwrite_existing);
            }
        } catch (const std::exception& e) {
            outcome.manifest.reset();
            outcome.error = e.what();
        }
        result.sequences.push_back(std::move(outcome));
    }
    return result;
}

unsigned worker_count() {
    if (const char* env = std::getenv("FOG_THREADS")) {
        unsigned n = 0;
        const std::string_view s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
        if (res.ec == std::errc{} && res.ptr == s.data() + s.size() && n > 0) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace fogsim::pipeline
