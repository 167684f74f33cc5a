#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace fogsim::mot {

/// Axis-aligned box in MOTChallenge convention (top-left corner + size).
struct Box {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;

    double right() const noexcept { return left + width; }
    double bottom() const noexcept { return top + height; }
    double area() const noexcept { return width * height; }

    friend bool operator==(const Box&, const Box&) = default;
};

/// Intersection over union, in [0,1].
double iou(const Box& a, const Box& b) noexcept;

inline constexpr int kPedestrianClass = 1;

struct TrackRecord {
    int frame = 1;
    int id = 0;
    Box box;
    double confidence = 1.0;
    /// -1 when the file does not carry a class column.
    int class_id = -1;
    double visibility = -1.0;

    friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

/// Frame-indexed (track id, box) records with unique (frame, id) pairs,
/// frames >= 1 and boxes of positive size.
class TrackSet {
public:
    TrackSet() = default;
    explicit TrackSet(std::vector<TrackRecord> records);

    /// Throws InvalidArgument on a duplicate (frame, id) or an invalid record.
    void add(const TrackRecord& record);

    const std::vector<TrackRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    /// Records grouped by frame, each group sorted by id.
    std::map<int, std::vector<TrackRecord>> by_frame() const;

    friend bool operator==(const TrackSet& a, const TrackSet& b) { return a.records_ == b.records_; }

private:
    static std::uint64_t key(int frame, int id) noexcept;

    std::vector<TrackRecord> records_;
    std::unordered_set<std::uint64_t> keys_;
};

enum class MotFileKind {
    /// frame,id,left,top,width,height,conf,class,visibility
    ground_truth,
    /// frame,id,left,top,width,height,conf,x,y,z
    results,
};

TrackSet parse_mot(std::istream& in, MotFileKind kind, const std::string& source = "<stream>");
TrackSet load_mot_file(const std::filesystem::path& path, MotFileKind kind);
void write_mot(std::ostream& out, const TrackSet& set, MotFileKind kind);
void write_mot_file(const std::filesystem::path& path, const TrackSet& set, MotFileKind kind);

/// Ground truth restricted to what is scored: rows with non-zero confidence
/// and the pedestrian class (rows without a class column are kept).
TrackSet evaluation_subset(const TrackSet& gt);

inline constexpr double kDefaultIouThreshold = 0.5;

struct ClearMotResult {
    double mota = 0.0;  // percent, may be negative
    double motp = 0.0;  // percent: mean IoU of matched pairs x 100
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t id_switches = 0;
    std::int64_t matches = 0;
    std::int64_t gt_count = 0;
};

/// CLEAR-MOT. Per frame, correspondences from the previous frame that still
/// overlap by >= threshold are kept; the rest are matched by a minimum-cost
/// assignment on 1 - IoU over pairs with IoU >= threshold (maximum number of
/// matches first, then minimum cost). An identity switch is counted when a
/// ground-truth track is matched to a different prediction id than at its
/// previous match. Throws when gt is empty.
ClearMotResult clear_mot(const TrackSet& gt, const TrackSet& pred,
                         double iou_threshold = kDefaultIouThreshold);

struct IdentityResult {
    double idf1 = 0.0;  // percent
    std::int64_t idtp = 0;
    std::int64_t idfp = 0;
    std::int64_t idfn = 0;
};

/// Global one-to-one trajectory matching that maximises IDTP (frames where
/// both trajectories are present with IoU >= threshold).
IdentityResult identity_metrics(const TrackSet& gt, const TrackSet& pred,
                                double iou_threshold = kDefaultIouThreshold);
double idf1(const TrackSet& gt, const TrackSet& pred, double iou_threshold = kDefaultIouThreshold);

inline constexpr int kHotaAlphaCount = 19;

/// Localisation thresholds 0.05, 0.10, ..., 0.95.
std::array<double, kHotaAlphaCount> hota_alphas();

struct HotaResult {
    double hota = 0.0;  // percent, mean over alphas
    double deta = 0.0;
    double assa = 0.0;
    std::array<double, kHotaAlphaCount> hota_per_alpha{};
    std::array<double, kHotaAlphaCount> deta_per_alpha{};
    std::array<double, kHotaAlphaCount> assa_per_alpha{};
};

/// Higher Order Tracking Accuracy. Per frame, detections are matched once by
/// maximising global-alignment score x IoU; at each alpha only matched pairs
/// with IoU >= alpha count as true positives. Throws when gt is empty.
HotaResult hota_metrics(const TrackSet& gt, const TrackSet& pred);
double hota(const TrackSet& gt, const TrackSet& pred);

struct MetricReport {
    double hota = 0.0;
    double mota = 0.0;
    double motp = 0.0;
    double idf1 = 0.0;
    std::int64_t id_switches = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t gt_count = 0;
};

MetricReport evaluate(const TrackSet& gt, const TrackSet& pred,
                      double iou_threshold = kDefaultIouThreshold);

}  // namespace fogsim::mot
