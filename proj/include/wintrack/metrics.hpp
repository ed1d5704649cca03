#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wintrack/types.hpp"

namespace wintrack {

struct GroundTruthRecord {
    std::string scene_id;
    int frame_index = 0;
    double timestamp = 0.0;
    std::int64_t gt_track_id = 0;
    std::string class_label;
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;
    Vec3 size = Vec3::Ones();
};

/// One serialized tracker output line (see the file formats in the cli).
struct TrackRecord {
    std::string scene_id;
    int frame_index = 0;
    double timestamp = 0.0;
    std::int64_t track_id = 0;
    std::string class_label;
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;
    Vec3 size = Vec3::Ones();
    Vec3 velocity = Vec3::Zero();
    double score = 0.5;
    bool coasted = false;
};

struct FrameMatchDelta {
    int matches = 0;
    int fp = 0;
    int fn = 0;
    int ids = 0;
};

/// gt track id -> last matched tracker id; persists across unmatched frames so
/// a switch is counted against the most recent association.
using MatchState = std::map<std::int64_t, std::int64_t>;

/// Greedy 2D-center-distance matching under `threshold`, preferring
/// persistence of previous gt/track pairs, then ascending distance with
/// smaller ids first. Inputs must belong to one frame and one class.
/// `matched_scores`, when given, collects the scores of matched outputs.
FrameMatchDelta match_frame(const std::vector<const TrackRecord*>& outputs,
                            const std::vector<const GroundTruthRecord*>& gts,
                            double threshold, MatchState& state,
                            std::vector<double>* matched_scores = nullptr);

/// 1 - (FP + FN + IDS) / GT. Throws UndefinedMetricError when GT = 0.
double mota(std::int64_t fp, std::int64_t fn, std::int64_t ids, std::int64_t gt);

/// One AMOTA summand at recall r, clamped into [0, 1]:
/// 1 - (FP_r + FN_r + IDS_r - (1 - r) GT) / (r GT).
double amota_term(std::int64_t fp, std::int64_t fn, std::int64_t ids, std::int64_t gt,
                  double r);

struct RecallLevel {
    double recall = 0.0;       // target recall r
    bool reachable = false;
    double score_threshold = 0.0;
    std::int64_t fp = 0, fn = 0, ids = 0;
    double term = 0.0;  // clamped AMOTA summand (0 when unreachable)
};

struct ClassMetrics {
    std::string class_label;
    std::int64_t gt = 0, matches = 0, fp = 0, fn = 0, ids = 0;
    double mota_value = 0.0;  // meaningful when gt > 0
    double amota = 0.0;
    std::vector<RecallLevel> sweep;
};

struct MetricsReport {
    std::vector<ClassMetrics> per_class;  // every class seen in gt or tracks
    std::int64_t gt = 0, matches = 0, fp = 0, fn = 0, ids = 0;
    double mota_value = 0.0;
    double amota = 0.0;  // mean over classes with gt > 0
};

struct EvalOptions {
    double threshold_m = 2.0;
    int recall_levels = 40;
    bool include_coasted = false;
    std::vector<std::string> class_filter;  // empty = all classes
};

/// Full evaluation: per-scene, per-frame matching accumulated per class, plus
/// the AMOTA recall sweep (re-matching at each level's score threshold).
MetricsReport evaluate(const std::vector<TrackRecord>& tracks,
                       const std::vector<GroundTruthRecord>& ground_truth,
                       const EvalOptions& options);

/// Human-readable table form of a report.
std::string format_report(const MetricsReport& report);

}  // namespace wintrack
