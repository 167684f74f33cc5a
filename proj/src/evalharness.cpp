#include "fogsim/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fogsim/error.hpp"
#include "fogsim/turbulence.hpp"

namespace fs = std::filesystem;

namespace fogsim::eval {

namespace {

// Pixel columns/rows touched by [lo, hi), clipped to [0, limit).
std::pair<int, int> pixel_span(double lo, double hi, int limit) {
    const int a = std::max(0, static_cast<int>(std::floor(lo)));
    const int b = std::min(limit, static_cast<int>(std::ceil(hi)));
    return {a, b};
}

// Objects are assigned to vertical lanes so drawn trajectories never overlap.
struct Lane {
    double x0;
    double x1;
};

Lane lane_for(const SceneSpec& spec, int i) {
    const double lane_w = static_cast<double>(spec.image_width) / spec.n_objects;
    if (lane_w < spec.box_width) {
        return {0.0, static_cast<double>(spec.image_width)};
    }
    return {lane_w * i, lane_w * (i + 1)};
}

bool inside(const SceneSpec& spec, const mot::Box& b) {
    return b.left >= 0.0 && b.top >= 0.0 && b.right() <= spec.image_width &&
           b.bottom() <= spec.image_height;
}

mot::Box box_at(const mot::Box& start, const Velocity& v, int frame_index) {
    return {start.left + v.dx * frame_index, start.top + v.dy * frame_index, start.width,
            start.height};
}

std::string fixed2(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
}

std::string short_number(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

}  // namespace

void SceneSpec::validate() const {
    if (n_objects < 1 || n_frames < 1) {
        throw InvalidArgument("scene needs at least one object and one frame");
    }
    if (image_width < 1 || image_height < 1) {
        throw InvalidArgument("scene image size must be positive");
    }
    if (!(box_width > 0.0 && box_height > 0.0) || box_width > image_width ||
        box_height > image_height) {
        throw InvalidArgument("box size must be positive and fit inside the image");
    }
    const auto n = static_cast<std::size_t>(n_objects);
    if (motion.size() > n || object_depth.size() > n || start.size() > n) {
        throw InvalidArgument("more per-object entries than objects");
    }
    for (double d : object_depth) {
        if (!(d > 0.0 && d <= 1.0)) {
            throw InvalidArgument("object depth must lie in (0, 1]");
        }
    }
    if (!(depth_scale_m > 0.0)) {
        throw InvalidArgument("depth scale must be positive");
    }
    const double span = n_frames - 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < start.size()) {
            const Velocity v = i < motion.size() ? motion[i] : Velocity{};
            const mot::Box first{start[i].left, start[i].top, box_width, box_height};
            if (!inside(*this, first) || !inside(*this, box_at(first, v, n_frames - 1))) {
                throw InvalidArgument("object " + std::to_string(i + 1) + " leaves the image");
            }
        } else if (i < motion.size()) {
            const auto& v = motion[i];
            if (box_width + std::abs(v.dx) * span > image_width ||
                box_height + std::abs(v.dy) * span > image_height) {
                throw InvalidArgument("object " + std::to_string(i + 1) +
                                      " would exit the frame at velocity (" +
                                      short_number(v.dx) + ", " + short_number(v.dy) + ")");
            }
        }
    }
}

Scene generate_scene(const SceneSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double span = std::max(1, spec.n_frames - 1);

    std::vector<mot::Box> starts;
    std::vector<Velocity> velocities;
    std::vector<double> depths;
    for (int i = 0; i < spec.n_objects; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const Lane lane = lane_for(spec, i);
        // Always consume the same draws so optional overrides do not shift
        // the random stream for later objects.
        const double r_dx = unit(rng);
        const double r_dy = unit(rng);
        const double r_x = unit(rng);
        const double r_y = unit(rng);
        const double r_d = unit(rng);

        Velocity v;
        if (k < spec.motion.size()) {
            v = spec.motion[k];
        } else {
            const double max_dx = 0.8 * (lane.x1 - lane.x0 - spec.box_width) / span;
            const double max_dy = 0.8 * (spec.image_height - spec.box_height) / span;
            v = {(2.0 * r_dx - 1.0) * max_dx, (2.0 * r_dy - 1.0) * max_dy};
        }
        mot::Box s{0.0, 0.0, spec.box_width, spec.box_height};
        if (k < spec.start.size()) {
            s.left = spec.start[k].left;
            s.top = spec.start[k].top;
        } else {
            // Feasible start interval keeping every frame inside the lane/image.
            const bool own_motion = k < spec.motion.size();
            const double x_lo = own_motion ? 0.0 : lane.x0;
            const double x_hi = own_motion ? spec.image_width : lane.x1;
            const double travel_x = v.dx * span;
            const double travel_y = v.dy * span;
            const double min_x = x_lo + std::max(0.0, -travel_x);
            const double max_x = x_hi - spec.box_width - std::max(0.0, travel_x);
            const double min_y = std::max(0.0, -travel_y);
            const double max_y = spec.image_height - spec.box_height - std::max(0.0, travel_y);
            s.left = min_x + r_x * std::max(0.0, max_x - min_x);
            s.top = min_y + r_y * std::max(0.0, max_y - min_y);
        }
        starts.push_back(s);
        velocities.push_back(v);
        depths.push_back(k < spec.object_depth.size() ? spec.object_depth[k] : 0.2 + 0.6 * r_d);
    }

    Scene scene;
    std::vector<std::size_t> paint_order(starts.size());
    for (std::size_t i = 0; i < paint_order.size(); ++i) {
        paint_order[i] = i;
    }
    // Far objects first so nearer ones overwrite them.
    std::stable_sort(paint_order.begin(), paint_order.end(),
                     [&](std::size_t a, std::size_t b) { return depths[a] > depths[b]; });

    for (int f = 0; f < spec.n_frames; ++f) {
        depth::MetricDepth d(spec.image_width, spec.image_height, 1.0);
        d.unit = depth::DepthUnit::normalized;
        for (std::size_t i = 0; i < starts.size(); ++i) {
            mot::TrackRecord r;
            r.frame = f + 1;
            r.id = static_cast<int>(i) + 1;
            r.box = box_at(starts[i], velocities[i], f);
            r.class_id = mot::kPedestrianClass;
            r.visibility = 1.0;
            if (!inside(spec, r.box)) {
                throw InvalidArgument("object " + std::to_string(r.id) + " leaves the image");
            }
            scene.gt.add(r);
        }
        for (std::size_t i : paint_order) {
            const mot::Box b = box_at(starts[i], velocities[i], f);
            const auto [x0, x1] = pixel_span(b.left, b.right(), spec.image_width);
            const auto [y0, y1] = pixel_span(b.top, b.bottom(), spec.image_height);
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    d(x, y) = depths[i];
                }
            }
        }
        scene.depth.push_back(std::move(d));
    }
    return scene;
}

double DegradationModel::keep_probability(double mean_transmission) const noexcept {
    return std::clamp(slope * mean_transmission + intercept, 0.0, 1.0);
}

double mean_box_transmission(const fog::TransmissionMap& t, const mot::Box& box) {
    const auto [x0, x1] = pixel_span(box.left, box.right(), t.width());
    const auto [y0, y1] = pixel_span(box.top, box.bottom(), t.height());
    if (x0 >= x1 || y0 >= y1) {
        return 0.0;
    }
    double sum = 0.0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            sum += t(x, y);
        }
    }
    return sum / (static_cast<double>(x1 - x0) * static_cast<double>(y1 - y0));
}

DetectionSet degrade_detections(const mot::TrackSet& gt,
                                const std::vector<fog::TransmissionMap>& transmission,
                                const DegradationModel& model) {
    std::mt19937_64 rng(model.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, model.noise_sigma > 0.0 ? model.noise_sigma : 1.0);

    DetectionSet out;
    for (const auto& [frame, records] : gt.by_frame()) {
        if (frame < 1 || static_cast<std::size_t>(frame) > transmission.size()) {
            throw DimensionMismatch("no transmission map for frame " + std::to_string(frame));
        }
        const auto& t = transmission[static_cast<std::size_t>(frame - 1)];
        for (const auto& r : records) {
            const double u = unit(rng);
            mot::Box b = r.box;
            if (model.noise_sigma > 0.0) {
                b.left += jitter(rng);
                b.top += jitter(rng);
                b.width = std::max(1.0, b.width + jitter(rng));
                b.height = std::max(1.0, b.height + jitter(rng));
            }
            if (u < model.keep_probability(mean_box_transmission(t, r.box))) {
                out.push_back({frame, b, 1.0});
            }
        }
    }
    return out;
}

mot::TrackSet reference_tracker(const DetectionSet& detections, const TrackerOptions& options) {
    std::map<int, std::vector<mot::Box>> frames;
    for (const auto& d : detections) {
        frames[d.frame].push_back(d.box);
    }
    struct Active {
        int id;
        mot::Box last;
        int last_frame;
    };
    std::vector<Active> active;
    int next_id = 1;
    mot::TrackSet out;

    for (const auto& [frame, boxes] : frames) {
        std::erase_if(active, [&](const Active& a) {
            return frame - a.last_frame - 1 > options.max_missed;
        });

        struct Candidate {
            double overlap;
            std::size_t track;
            std::size_t det;
        };
        std::vector<Candidate> candidates;
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t d = 0; d < boxes.size(); ++d) {
                const double o = mot::iou(active[a].last, boxes[d]);
                if (o >= options.iou_threshold) {
                    candidates.push_back({o, a, d});
                }
            }
        }
        std::sort(candidates.begin(), candidates.end(), [&](const auto& x, const auto& y) {
            if (x.overlap != y.overlap) {
                return x.overlap > y.overlap;
            }
            if (active[x.track].id != active[y.track].id) {
                return active[x.track].id < active[y.track].id;
            }
            return x.det < y.det;
        });

        std::vector<char> track_used(active.size(), 0);
        std::vector<int> det_track(boxes.size(), 0);
        for (const auto& c : candidates) {
            if (track_used[c.track] || det_track[c.det] != 0) {
                continue;
            }
            track_used[c.track] = 1;
            det_track[c.det] = active[c.track].id;
            active[c.track].last = boxes[c.det];
            active[c.track].last_frame = frame;
        }
        for (std::size_t d = 0; d < boxes.size(); ++d) {
            if (det_track[d] == 0) {
                det_track[d] = next_id++;
                active.push_back({det_track[d], boxes[d], frame});
            }
            mot::TrackRecord r;
            r.frame = frame;
            r.id = det_track[d];
            r.box = boxes[d];
            out.add(r);
        }
    }
    return out;
}

std::vector<SweepLevel> standard_levels(pipeline::FogMode mode, const std::vector<int>& levels,
                                        std::uint64_t seed) {
    std::vector<SweepLevel> out;
    for (int l : levels) {
        pipeline::FogConfig cfg;
        cfg.mode = mode;
        cfg.level = l;
        cfg.seed = seed;
        cfg.light_strategy = pipeline::LightStrategy::fixed;
        cfg.ladder.attenuation(l);
        out.push_back({"Fog " + std::to_string(l), cfg});
    }
    return out;
}

SweepReport sweep(const SceneSpec& spec, const std::vector<SweepLevel>& levels,
                  const SweepOptions& options) {
    const Scene scene = generate_scene(spec);
    const int w = spec.image_width;
    const int h = spec.image_height;

    const auto score = [&](const std::string& label, double beta,
                           const std::vector<fog::TransmissionMap>& t) {
        SweepRow row;
        row.label = label;
        row.beta = beta;
        double mean_t = 0.0;
        for (const auto& m : t) {
            mean_t += m.mean();
        }
        row.mean_transmission = mean_t / static_cast<double>(t.size());
        const DetectionSet dets = degrade_detections(scene.gt, t, options.degradation);
        row.detections = dets.size();
        const mot::TrackSet tracks = reference_tracker(dets, options.tracker);
        row.metrics = mot::evaluate(scene.gt, tracks, options.iou_threshold);
        return row;
    };

    SweepReport report;
    report.rows.push_back(score(
        "Clear", 0.0,
        std::vector<fog::TransmissionMap>(scene.depth.size(), fog::TransmissionMap(w, h, 1.0))));

    for (const auto& level : levels) {
        const auto& cfg = level.config;
        if (cfg.visibility_m.has_value() == cfg.level.has_value()) {
            throw InvalidArgument(level.label + ": exactly one of visibility or level must be set");
        }
        const fog::Attenuation att = cfg.attenuation();
        const double scale = cfg.visibility_m ? spec.depth_scale_m : 1.0;

        std::optional<turbulence::TurbulenceMap> tau;
        if (cfg.mode == pipeline::FogMode::heterogeneous) {
            tau = turbulence::turbulence_texture(w, h, cfg.octaves, cfg.seed, cfg.brightness,
                                                 cfg.base_cells);
        }
        std::vector<fog::TransmissionMap> t;
        t.reserve(scene.depth.size());
        for (const auto& d : scene.depth) {
            depth::MetricDepth scaled = d;
            for (double& v : scaled.values()) {
                v *= scale;
            }
            t.push_back(tau ? turbulence::heterogeneous_transmission(scaled, *tau, att)
                            : fog::transmission(scaled, att));
        }
        report.rows.push_back(score(level.label, att.beta(), t));
    }
    return report;
}

std::string SweepReport::to_csv() const {
    std::ostringstream out;
    out << "scene,beta,mean_transmission,detections,HOTA,MOTA,MOTP,IDF1,ID_Sw,FP,FN\n";
    for (const auto& r : rows) {
        out << r.label << ',' << short_number(r.beta) << ',' << short_number(r.mean_transmission)
            << ',' << r.detections << ',' << fixed2(r.metrics.hota) << ','
            << fixed2(r.metrics.mota) << ',' << fixed2(r.metrics.motp) << ','
            << fixed2(r.metrics.idf1) << ',' << r.metrics.id_switches << ',' << r.metrics.fp
            << ',' << r.metrics.fn << '\n';
    }
    return out.str();
}

std::string SweepReport::to_markdown() const {
    std::ostringstream out;
    out << "| Scene | HOTA | MOTA | MOTP | IDF1 | ID_Sw |\n";
    out << "|---|---:|---:|---:|---:|---:|\n";
    for (const auto& r : rows) {
        out << "| " << r.label << " | " << fixed2(r.metrics.hota) << " | "
            << fixed2(r.metrics.mota) << " | " << fixed2(r.metrics.motp) << " | "
            << fixed2(r.metrics.idf1) << " | " << r.metrics.id_switches << " |\n";
    }
    return out.str();
}

void SweepReport::write(const fs::path& dir) const {
    fs::create_directories(dir);
    std::ofstream(dir / "report.csv") << to_csv();
    std::ofstream(dir / "report.md") << to_markdown();
}

SweepSetup load_sweep_setup(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scene file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    SweepSetup s;
    try {
        auto& sc = s.scene;
        sc.n_objects = j.value("n_objects", sc.n_objects);
        sc.n_frames = j.value("n_frames", sc.n_frames);
        sc.image_width = j.value("image_width", sc.image_width);
        sc.image_height = j.value("image_height", sc.image_height);
        sc.box_width = j.value("box_width", sc.box_width);
        sc.box_height = j.value("box_height", sc.box_height);
        sc.seed = j.value("seed", sc.seed);
        sc.depth_scale_m = j.value("depth_scale_m", sc.depth_scale_m);
        for (const auto& v : j.value("motion", nlohmann::json::array())) {
            sc.motion.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
        sc.object_depth = j.value("object_depth", std::vector<double>{});
        for (const auto& v : j.value("start", nlohmann::json::array())) {
            sc.start.push_back({v.at(0).get<double>(), v.at(1).get<double>(), sc.box_width,
                                sc.box_height});
        }
        if (j.contains("degradation")) {
            const auto& d = j["degradation"];
            auto& m = s.options.degradation;
            m.slope = d.value("slope", m.slope);
            m.intercept = d.value("intercept", m.intercept);
            m.noise_sigma = d.value("noise_sigma", m.noise_sigma);
            m.seed = d.value("seed", m.seed);
        }
        if (j.contains("tracker")) {
            const auto& t = j["tracker"];
            s.options.tracker.iou_threshold = t.value("iou_threshold", s.options.tracker.iou_threshold);
            s.options.tracker.max_missed = t.value("max_missed", s.options.tracker.max_missed);
        }
        s.options.iou_threshold = j.value("iou_threshold", s.options.iou_threshold);
        const std::string mode = j.value("mode", std::string("homo"));
        if (mode == "homo" || mode == "homogeneous") {
            s.mode = pipeline::FogMode::homogeneous;
        } else if (mode == "hetero" || mode == "heterogeneous") {
            s.mode = pipeline::FogMode::heterogeneous;
        } else {
            throw FormatError(path.string() + ": unknown mode '" + mode + "'");
        }
        s.fog_seed = j.value("fog_seed", s.fog_seed);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    s.scene.validate();
    return s;
}

}  // namespace fogsim::eval
