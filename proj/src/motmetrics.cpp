#include "fogsim/motmetrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "fogsim/assignment.hpp"
#include "fogsim/error.hpp"

namespace fogsim::mot {

double iou(const Box& a, const Box& b) noexcept {
    const double iw = std::min(a.right(), b.right()) - std::max(a.left, b.left);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

// ---------------------------------------------------------------------------
// TrackSet

std::uint64_t TrackSet::key(int frame, int id) noexcept {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(frame)) << 32) |
           static_cast<std::uint32_t>(id);
}

TrackSet::TrackSet(std::vector<TrackRecord> records) {
    records_.reserve(records.size());
    for (const auto& r : records) {
        add(r);
    }
}

void TrackSet::add(const TrackRecord& r) {
    if (r.frame < 1) {
        throw InvalidArgument("frame indices start at 1, got " + std::to_string(r.frame));
    }
    if (!(r.box.width > 0.0) || !(r.box.height > 0.0) || !std::isfinite(r.box.left) ||
        !std::isfinite(r.box.top) || !std::isfinite(r.box.width) || !std::isfinite(r.box.height)) {
        throw InvalidArgument("box for frame " + std::to_string(r.frame) + " id " +
                              std::to_string(r.id) + " must be finite with positive size");
    }
    if (!keys_.insert(key(r.frame, r.id)).second) {
        throw InvalidArgument("duplicate (frame, id) = (" + std::to_string(r.frame) + ", " +
                              std::to_string(r.id) + ")");
    }
    records_.push_back(r);
}

std::map<int, std::vector<TrackRecord>> TrackSet::by_frame() const {
    std::map<int, std::vector<TrackRecord>> frames;
    for (const auto& r : records_) {
        frames[r.frame].push_back(r);
    }
    for (auto& [f, v] : frames) {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    }
    return frames;
}

// ---------------------------------------------------------------------------
// MOTChallenge text files

namespace {

std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

double parse_field(const std::string& field, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw FormatError(where + ": cannot parse number '" + field + "'");
    }
    return v;
}

int parse_int_field(const std::string& field, const std::string& where) {
    const double v = parse_field(field, where);
    if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max()) {
        throw FormatError(where + ": expected an integer, got '" + field + "'");
    }
    return static_cast<int>(v);
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

}  // namespace

TrackSet parse_mot(std::istream& in, MotFileKind kind, const std::string& source) {
    TrackSet set;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        if (fields.size() < 6) {
            throw FormatError(where + ": expected at least 6 comma-separated fields, got " +
                              std::to_string(fields.size()));
        }
        TrackRecord r;
        r.frame = parse_int_field(fields[0], where);
        r.id = parse_int_field(fields[1], where);
        r.box = {parse_field(fields[2], where), parse_field(fields[3], where),
                 parse_field(fields[4], where), parse_field(fields[5], where)};
        if (fields.size() > 6) {
            r.confidence = parse_field(fields[6], where);
        }
        if (kind == MotFileKind::ground_truth) {
            if (fields.size() > 7) {
                r.class_id = parse_int_field(fields[7], where);
            }
            if (fields.size() > 8) {
                r.visibility = parse_field(fields[8], where);
            }
        } else {
            for (std::size_t i = 7; i < fields.size(); ++i) {
                parse_field(fields[i], where);
            }
        }
        try {
            set.add(r);
        } catch (const InvalidArgument& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return set;
}

TrackSet load_mot_file(const std::filesystem::path& path, MotFileKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return parse_mot(in, kind, path.string());
}

void write_mot(std::ostream& out, const TrackSet& set, MotFileKind kind) {
    for (const auto& r : set.records()) {
        out << r.frame << ',' << r.id << ',' << format_number(r.box.left) << ','
            << format_number(r.box.top) << ',' << format_number(r.box.width) << ','
            << format_number(r.box.height) << ',' << format_number(r.confidence);
        if (kind == MotFileKind::ground_truth) {
            out << ',' << r.class_id << ',' << format_number(r.visibility) << '\n';
        } else {
            out << ",-1,-1,-1\n";
        }
    }
}

void write_mot_file(const std::filesystem::path& path, const TrackSet& set, MotFileKind kind) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_mot(out, set, kind);
}

TrackSet evaluation_subset(const TrackSet& gt) {
    TrackSet out;
    for (const auto& r : gt.records()) {
        const bool pedestrian = r.class_id < 0 || r.class_id == kPedestrianClass;
        if (r.confidence != 0.0 && pedestrian) {
            out.add(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

using FrameMap = std::map<int, std::vector<TrackRecord>>;

std::vector<int> sorted_frames(const FrameMap& a, const FrameMap& b) {
    std::vector<int> frames;
    for (const auto& [f, _] : a) {
        frames.push_back(f);
    }
    for (const auto& [f, _] : b) {
        frames.push_back(f);
    }
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    return frames;
}

const std::vector<TrackRecord>& objects_at(const FrameMap& m, int frame) {
    static const std::vector<TrackRecord> kEmpty;
    const auto it = m.find(frame);
    return it == m.end() ? kEmpty : it->second;
}

// Dense index for the ids in a track set, in ascending id order.
std::unordered_map<int, std::size_t> index_ids(const TrackSet& set, std::size_t& count) {
    std::vector<int> ids;
    for (const auto& r : set.records()) {
        ids.push_back(r.id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::unordered_map<int, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        index[ids[i]] = i;
    }
    count = ids.size();
    return index;
}

}  // namespace

ClearMotResult clear_mot(const TrackSet& gt, const TrackSet& pred, double iou_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw InvalidArgument("IoU threshold must lie in (0, 1]");
    }
    if (gt.empty()) {
        throw InvalidArgument("MOTA is undefined for empty ground truth");
    }
    const FrameMap gt_frames = gt.by_frame();
    const FrameMap pred_frames = pred.by_frame();

    ClearMotResult res;
    res.gt_count = static_cast<std::int64_t>(gt.size());
    double iou_sum = 0.0;

    std::unordered_map<int, int> last_match;      // gt id -> pred id at its latest match
    std::unordered_map<int, int> previous_frame;  // matches of frame f-1
    int previous_frame_index = std::numeric_limits<int>::min();

    for (const int f : sorted_frames(gt_frames, pred_frames)) {
        const auto& g = objects_at(gt_frames, f);
        const auto& p = objects_at(pred_frames, f);
        if (previous_frame_index != f - 1) {
            previous_frame.clear();
        }

        std::vector<double> sim(g.size() * p.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (std::size_t j = 0; j < p.size(); ++j) {
                sim[i * p.size() + j] = iou(g[i].box, p[j].box);
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> matched;
        std::vector<char> g_used(g.size(), 0);
        std::vector<char> p_used(p.size(), 0);

        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto it = previous_frame.find(g[i].id);
            if (it == previous_frame.end()) {
                continue;
            }
            for (std::size_t j = 0; j < p.size(); ++j) {
                if (p[j].id == it->second && !p_used[j] && sim[i * p.size() + j] >= iou_threshold) {
                    matched.emplace_back(i, j);
                    g_used[i] = p_used[j] = 1;
                    break;
                }
            }
        }

        std::vector<std::size_t> rows;
        std::vector<std::size_t> cols;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g_used[i]) {
                rows.push_back(i);
            }
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!p_used[j]) {
                cols.push_back(j);
            }
        }
        if (!rows.empty() && !cols.empty()) {
            // Forbidden pairs cost more than any set of allowed ones, so the
            // optimum maximises the number of allowed matches first.
            const double forbidden = static_cast<double>(std::min(rows.size(), cols.size())) + 2.0;
            CostMatrix cost(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    const double s = sim[rows[r] * p.size() + cols[c]];
                    cost(static_cast<int>(r), static_cast<int>(c)) =
                        s >= iou_threshold ? 1.0 - s : forbidden;
                }
            }
            const auto assignment = solve_assignment(cost);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const int c = assignment[r];
                if (c < 0) {
                    continue;
                }
                const std::size_t i = rows[r];
                const std::size_t j = cols[static_cast<std::size_t>(c)];
                if (sim[i * p.size() + j] >= iou_threshold) {
                    matched.emplace_back(i, j);
                }
            }
        }

        previous_frame.clear();
        for (const auto& [i, j] : matched) {
            const int gid = g[i].id;
            const int pid = p[j].id;
            const auto it = last_match.find(gid);
            if (it != last_match.end() && it->second != pid) {
                ++res.id_switches;
            }
            last_match[gid] = pid;
            previous_frame[gid] = pid;
            iou_sum += sim[i * p.size() + j];
        }
        previous_frame_index = f;
        const auto m = static_cast<std::int64_t>(matched.size());
        res.matches += m;
        res.fn += static_cast<std::int64_t>(g.size()) - m;
        res.fp += static_cast<std::int64_t>(p.size()) - m;
    }

    res.mota = 100.0 * (1.0 - static_cast<double>(res.fn + res.fp + res.id_switches) /
                                  static_cast<double>(res.gt_count));
    res.motp = res.matches > 0 ? 100.0 * iou_sum / static_cast<double>(res.matches) : 0.0;
    return res;
}

IdentityResult identity_metrics(const TrackSet& gt, const TrackSet& pred, double iou_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw InvalidArgument("IoU threshold must lie in (0, 1]");
    }
    IdentityResult res;
    if (gt.empty() && pred.empty()) {
        res.idf1 = 100.0;
        return res;
    }
    std::size_t n_gt = 0;
    std::size_t n_pred = 0;
    const auto gt_index = index_ids(gt, n_gt);
    const auto pred_index = index_ids(pred, n_pred);

    std::vector<std::int64_t> overlap(n_gt * n_pred, 0);
    const FrameMap gt_frames = gt.by_frame();
    const FrameMap pred_frames = pred.by_frame();
    for (const auto& [f, g] : gt_frames) {
        const auto& p = objects_at(pred_frames, f);
        for (const auto& a : g) {
            for (const auto& b : p) {
                if (iou(a.box, b.box) >= iou_threshold) {
                    ++overlap[gt_index.at(a.id) * n_pred + pred_index.at(b.id)];
                }
            }
        }
    }

    std::int64_t idtp = 0;
    if (n_gt > 0 && n_pred > 0) {
        CostMatrix cost(static_cast<int>(n_gt), static_cast<int>(n_pred));
        for (std::size_t i = 0; i < n_gt; ++i) {
            for (std::size_t j = 0; j < n_pred; ++j) {
                cost(static_cast<int>(i), static_cast<int>(j)) =
                    -static_cast<double>(overlap[i * n_pred + j]);
            }
        }
        const auto assignment = solve_assignment(cost);
        for (std::size_t i = 0; i < n_gt; ++i) {
            if (assignment[i] >= 0) {
                idtp += overlap[i * n_pred + static_cast<std::size_t>(assignment[i])];
            }
        }
    }
    res.idtp = idtp;
    res.idfn = static_cast<std::int64_t>(gt.size()) - idtp;
    res.idfp = static_cast<std::int64_t>(pred.size()) - idtp;
    res.idf1 = 100.0 * 2.0 * static_cast<double>(idtp) /
               static_cast<double>(gt.size() + pred.size());
    return res;
}

double idf1(const TrackSet& gt, const TrackSet& pred, double iou_threshold) {
    return identity_metrics(gt, pred, iou_threshold).idf1;
}

std::array<double, kHotaAlphaCount> hota_alphas() {
    std::array<double, kHotaAlphaCount> a{};
    for (int k = 0; k < kHotaAlphaCount; ++k) {
        a[static_cast<std::size_t>(k)] = 0.05 * (k + 1);
    }
    return a;
}

HotaResult hota_metrics(const TrackSet& gt, const TrackSet& pred) {
    if (gt.empty()) {
        throw InvalidArgument("HOTA is undefined for empty ground truth");
    }
    HotaResult res;
    if (pred.empty()) {
        return res;
    }
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    const auto alphas = hota_alphas();

    std::size_t n_gt = 0;
    std::size_t n_pred = 0;
    const auto gt_index = index_ids(gt, n_gt);
    const auto pred_index = index_ids(pred, n_pred);
    const FrameMap gt_frames = gt.by_frame();
    const FrameMap pred_frames = pred.by_frame();
    const auto frames = sorted_frames(gt_frames, pred_frames);

    // Pass 1: global alignment between every gt and predicted trajectory.
    std::vector<double> potential(n_gt * n_pred, 0.0);
    std::vector<double> gt_count(n_gt, 0.0);
    std::vector<double> pred_count(n_pred, 0.0);
    for (const int f : frames) {
        const auto& g = objects_at(gt_frames, f);
        const auto& p = objects_at(pred_frames, f);
        for (const auto& a : g) {
            gt_count[gt_index.at(a.id)] += 1.0;
        }
        for (const auto& b : p) {
            pred_count[pred_index.at(b.id)] += 1.0;
        }
        if (g.empty() || p.empty()) {
            continue;
        }
        std::vector<double> sim(g.size() * p.size());
        std::vector<double> row_sum(g.size(), 0.0);
        std::vector<double> col_sum(p.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (std::size_t j = 0; j < p.size(); ++j) {
                const double s = iou(g[i].box, p[j].box);
                sim[i * p.size() + j] = s;
                row_sum[i] += s;
                col_sum[j] += s;
            }
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (std::size_t j = 0; j < p.size(); ++j) {
                const double s = sim[i * p.size() + j];
                const double denom = row_sum[i] + col_sum[j] - s;
                if (denom > kEps) {
                    potential[gt_index.at(g[i].id) * n_pred + pred_index.at(p[j].id)] += s / denom;
                }
            }
        }
    }
    std::vector<double> alignment(n_gt * n_pred, 0.0);
    for (std::size_t i = 0; i < n_gt; ++i) {
        for (std::size_t j = 0; j < n_pred; ++j) {
            const double pm = potential[i * n_pred + j];
            alignment[i * n_pred + j] = pm / (gt_count[i] + pred_count[j] - pm);
        }
    }

    // Pass 2: per-frame matching, then per-alpha counting.
    std::vector<std::vector<double>> match_count(kHotaAlphaCount,
                                                 std::vector<double>(n_gt * n_pred, 0.0));
    std::array<double, kHotaAlphaCount> tp{};
    std::array<double, kHotaAlphaCount> fn{};
    std::array<double, kHotaAlphaCount> fp{};
    for (const int f : frames) {
        const auto& g = objects_at(gt_frames, f);
        const auto& p = objects_at(pred_frames, f);
        if (g.empty() || p.empty()) {
            for (std::size_t a = 0; a < alphas.size(); ++a) {
                fn[a] += static_cast<double>(g.size());
                fp[a] += static_cast<double>(p.size());
            }
            continue;
        }
        std::vector<double> sim(g.size() * p.size());
        CostMatrix cost(static_cast<int>(g.size()), static_cast<int>(p.size()));
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (std::size_t j = 0; j < p.size(); ++j) {
                const double s = iou(g[i].box, p[j].box);
                sim[i * p.size() + j] = s;
                cost(static_cast<int>(i), static_cast<int>(j)) =
                    -alignment[gt_index.at(g[i].id) * n_pred + pred_index.at(p[j].id)] * s;
            }
        }
        const auto assignment = solve_assignment(cost);
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            double frame_tp = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (assignment[i] < 0) {
                    continue;
                }
                const auto j = static_cast<std::size_t>(assignment[i]);
                if (sim[i * p.size() + j] >= alphas[a] - kEps) {
                    frame_tp += 1.0;
                    match_count[a][gt_index.at(g[i].id) * n_pred + pred_index.at(p[j].id)] += 1.0;
                }
            }
            tp[a] += frame_tp;
            fn[a] += static_cast<double>(g.size()) - frame_tp;
            fp[a] += static_cast<double>(p.size()) - frame_tp;
        }
    }

    for (std::size_t a = 0; a < alphas.size(); ++a) {
        double ass_sum = 0.0;
        for (std::size_t i = 0; i < n_gt; ++i) {
            for (std::size_t j = 0; j < n_pred; ++j) {
                const double m = match_count[a][i * n_pred + j];
                if (m > 0.0) {
                    ass_sum += m * m / std::max(1.0, gt_count[i] + pred_count[j] - m);
                }
            }
        }
        const double assa = ass_sum / std::max(1.0, tp[a]);
        const double deta = tp[a] / std::max(1.0, tp[a] + fn[a] + fp[a]);
        res.assa_per_alpha[a] = 100.0 * assa;
        res.deta_per_alpha[a] = 100.0 * deta;
        res.hota_per_alpha[a] = 100.0 * std::sqrt(deta * assa);
    }
    const auto mean = [](const std::array<double, kHotaAlphaCount>& v) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s / kHotaAlphaCount;
    };
    res.hota = mean(res.hota_per_alpha);
    res.deta = mean(res.deta_per_alpha);
    res.assa = mean(res.assa_per_alpha);
    return res;
}

double hota(const TrackSet& gt, const TrackSet& pred) {
    return hota_metrics(gt, pred).hota;
}

MetricReport evaluate(const TrackSet& gt, const TrackSet& pred, double iou_threshold) {
    const ClearMotResult clear = clear_mot(gt, pred, iou_threshold);
    MetricReport report;
    report.hota = hota(gt, pred);
    report.mota = clear.mota;
    report.motp = clear.motp;
    report.idf1 = idf1(gt, pred, iou_threshold);
    report.id_switches = clear.id_switches;
    report.fp = clear.fp;
    report.fn = clear.fn;
    report.gt_count = clear.gt_count;
    return report;
}

}  // namespace fogsim::mot
