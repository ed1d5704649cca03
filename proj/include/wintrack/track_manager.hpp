#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "wintrack/assignment.hpp"
#include "wintrack/assoc_graph.hpp"
#include "wintrack/hypothesis.hpp"
#include "wintrack/motion_filter.hpp"
#include "wintrack/types.hpp"

namespace wintrack {

enum class TrackStatus { kTentative, kActive, kDormant, kDeleted };

const char* to_string(TrackStatus status);

struct TrackHistoryEntry {
    int frame_index = 0;
    ObjectState state;
    std::optional<std::int64_t> detection_id;  // absent on coasted frames
    bool coasted = false;
};

/// A committed identity. History frames strictly increase and are never
/// rewritten; window revisions only influence frames not yet emitted.
struct Track {
    std::int64_t track_id = 0;
    std::string class_label;
    TrackStatus status = TrackStatus::kTentative;
    std::vector<TrackHistoryEntry> history;
    int miss_count = 0;
    int hit_count = 1;
    GaussianBelief belief;
    double belief_timestamp = 0.0;
    Vec3 size_sum = Vec3::Zero();
    int size_samples = 0;
    double last_yaw = 0.0;
    double last_llr = 0.0;  // score of the last selected hypothesis
    int last_obs_frame = -1;
    NodeId last_node = kInvalidNode;
    // Every (frame, detection_id) this identity has absorbed, including
    // window-revised assignments; used for overlap-based ID carryover.
    std::set<std::pair<int, std::int64_t>> committed;
    std::optional<std::int64_t> merged_into;
};

/// One output record for the current frame (active tracks only).
struct TrackOutput {
    std::int64_t track_id = 0;
    std::string class_label;
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;
    Vec3 size = Vec3::Ones();
    Vec3 velocity = Vec3::Zero();
    double score = 0.5;  // logistic of the hypothesis log-likelihood ratio
    bool coasted = false;
};

/// Running arithmetic mean of observed box sizes; updates the track in place
/// and returns the new mean.
Vec3 smooth_dimensions(Track& track, const Vec3& new_size);

/// Applies the per-window assignment to the committed track set: ID carryover
/// by committed-detection overlap (the most recent ID survives a merge),
/// two-hit initiation, miss counting and deletion, dormancy, coasted outputs.
class TrackManager {
  public:
    explicit TrackManager(const TrackerConfig& config);

    std::vector<TrackOutput> commit(const AssignmentSolution& solution, HypothesisMap& map,
                                    const AssociationGraph& graph, const FilterModel& filter,
                                    int frame_k, double timestamp_k);

    /// Latest-observation nodes of live confirmed tracks; these survive graph
    /// contraction as dormant anchors.
    std::unordered_set<NodeId> anchor_nodes() const;

    const std::map<std::int64_t, Track>& tracks() const { return tracks_; }
    std::set<std::int64_t> live_track_ids() const;

  private:
    Track& create_track(const std::string& class_label);

    TrackerConfig config_;
    std::map<std::int64_t, Track> tracks_;  // ordered for deterministic sweeps
    std::int64_t next_id_ = 1;
};

}  // namespace wintrack
