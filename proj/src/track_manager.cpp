#include "wintrack/track_manager.hpp"

#include <algorithm>

#include "wintrack/errors.hpp"
#include "wintrack/scoring.hpp"

namespace wintrack {

const char* to_string(TrackStatus status) {
    switch (status) {
        case TrackStatus::kTentative: return "tentative";
        case TrackStatus::kActive: return "active";
        case TrackStatus::kDormant: return "dormant";
        case TrackStatus::kDeleted: return "deleted";
    }
    return "?";
}

Vec3 smooth_dimensions(Track& track, const Vec3& new_size) {
    if ((new_size.array() <= 0.0).any()) {
        throw InvalidValueError("smooth_dimensions: size must be positive");
    }
    track.size_sum += new_size;
    track.size_samples += 1;
    return track.size_sum / track.size_samples;
}

TrackManager::TrackManager(const TrackerConfig& config) : config_(config) {}

Track& TrackManager::create_track(const std::string& class_label) {
    Track track;
    track.track_id = next_id_++;
    track.class_label = class_label;
    auto [it, inserted] = tracks_.emplace(track.track_id, std::move(track));
    return it->second;
}

std::unordered_set<NodeId> TrackManager::anchor_nodes() const {
    std::unordered_set<NodeId> anchors;
    for (const auto& [id, track] : tracks_) {
        if (track.status == TrackStatus::kDeleted || track.status == TrackStatus::kTentative) {
            continue;
        }
        if (track.last_node != kInvalidNode) anchors.insert(track.last_node);
    }
    return anchors;
}

std::set<std::int64_t> TrackManager::live_track_ids() const {
    std::set<std::int64_t> live;
    for (const auto& [id, track] : tracks_) {
        if (track.status != TrackStatus::kDeleted) live.insert(id);
    }
    return live;
}

std::vector<TrackOutput> TrackManager::commit(const AssignmentSolution& solution,
                                              HypothesisMap& map, const AssociationGraph& graph,
                                              const FilterModel& filter, int frame_k,
                                              double timestamp_k) {
    // Selected rows that end in a current-frame detection, strongest first so
    // the best evidence claims an existing identity.
    std::vector<std::size_t> closers;
    for (std::size_t idx : solution.selected) {
        if (idx >= map.size()) throw ConsistencyError("commit: solution index out of range");
        if (map.rows()[idx].last().frame_index == frame_k) closers.push_back(idx);
    }
    std::sort(closers.begin(), closers.end(), [&](std::size_t a, std::size_t b) {
        const double sa = map.rows()[a].score_total();
        const double sb = map.rows()[b].score_total();
        if (sa != sb) return sa > sb;
        return a < b;
    });

    std::set<std::int64_t> claimed;
    std::set<std::int64_t> used_detections;

    for (std::size_t idx : closers) {
        const Hypothesis& row = map.rows()[idx];
        const GraphNode& root = graph.node(row.last().node);
        const Detection& det = *root.detection;

        std::set<std::pair<int, std::int64_t>> row_pairs;
        for (const auto& entry : row.entries) {
            row_pairs.emplace(entry.frame_index, graph.node(entry.node).detection->detection_id);
        }

        // Live tracks whose committed detections intersect this row, plus the
        // row's origin track; ordered, so the merge survivor (max id) is the
        // most recently created one.
        std::set<std::int64_t> candidates;
        for (const auto& [tid, track] : tracks_) {
            if (track.status == TrackStatus::kDeleted || claimed.count(tid)) continue;
            bool overlaps = false;
            for (const auto& pair : row_pairs) {
                if (track.committed.count(pair)) {
                    overlaps = true;
                    break;
                }
            }
            if (overlaps) candidates.insert(tid);
        }
        if (row.origin_track) {
            auto it = tracks_.find(*row.origin_track);
            if (it != tracks_.end() && it->second.status != TrackStatus::kDeleted &&
                claimed.count(*row.origin_track) == 0) {
                candidates.insert(*row.origin_track);
            }
        }

        Track* track = nullptr;
        if (candidates.empty()) {
            // No live identity to carry: seed a fresh tentative one. Its past
            // in-window detections are absorbed silently — already-emitted
            // frames are never rewritten.
            track = &create_track(det.class_label);
            track->committed = row_pairs;
        } else {
            const std::int64_t survivor = *candidates.rbegin();
            track = &tracks_.at(survivor);
            for (std::int64_t tid : candidates) {
                if (tid == survivor) continue;
                Track& merged = tracks_.at(tid);
                merged.status = TrackStatus::kDeleted;  // retired permanently
                merged.merged_into = survivor;
                track->committed.insert(merged.committed.begin(), merged.committed.end());
            }
            track->committed.insert(row_pairs.begin(), row_pairs.end());
            track->hit_count += 1;
            if (track->status == TrackStatus::kTentative && track->hit_count >= config_.init_hits) {
                track->status = TrackStatus::kActive;
            } else if (track->status == TrackStatus::kDormant) {
                track->status = TrackStatus::kActive;
            }
        }

        track->miss_count = 0;
        track->belief = row.belief;
        track->belief_timestamp = timestamp_k;
        track->last_yaw = det.yaw;
        track->last_llr = row.score_total();
        track->last_obs_frame = frame_k;
        track->last_node = root.id;
        const Vec3 mean_size = smooth_dimensions(*track, det.size);

        ObjectState state;
        state.position = track->belief.mean.head<3>();
        state.velocity = track->belief.mean.tail<3>();
        state.yaw = det.yaw;
        state.size = mean_size;
        track->history.push_back({frame_k, state, det.detection_id, false});

        claimed.insert(track->track_id);
        used_detections.insert(det.detection_id);
        map.stamp_origin(idx, track->track_id);
    }

    // Unselected current-frame detections seed tentative single-hit tracks so
    // the two-hit initiation rule has a substrate next frame.
    for (const auto& layer : graph.layers()) {
        if (layer.frame_index != frame_k) continue;
        for (NodeId id : layer.nodes) {
            const Detection& det = *graph.node(id).detection;
            if (used_detections.count(det.detection_id)) continue;
            Track& track = create_track(det.class_label);
            track.committed.emplace(frame_k, det.detection_id);
            track.belief = filter.initial_belief(det);
            track.belief_timestamp = timestamp_k;
            track.last_yaw = det.yaw;
            track.last_obs_frame = frame_k;
            track.last_node = id;
            const Vec3 mean_size = smooth_dimensions(track, det.size);
            ObjectState state;
            state.position = track.belief.mean.head<3>();
            state.velocity = track.belief.mean.tail<3>();
            state.yaw = det.yaw;
            state.size = mean_size;
            track.history.push_back({frame_k, state, det.detection_id, false});
        }
    }

    // Miss bookkeeping, deletion, dormancy, and coasted emission.
    std::vector<TrackOutput> outputs;
    for (auto& [tid, track] : tracks_) {
        if (track.status == TrackStatus::kDeleted) continue;

        if (claimed.count(tid)) {
            if (track.status == TrackStatus::kActive) {
                const TrackHistoryEntry& h = track.history.back();
                outputs.push_back({tid, track.class_label, h.state.position, h.state.yaw,
                                   h.state.size, h.state.velocity,
                                   score_to_probability(track.last_llr), false});
            }
            continue;
        }
        if (track.last_obs_frame == frame_k) continue;  // seeded this frame

        track.miss_count += 1;
        if (track.miss_count >= config_.delete_misses) {
            track.status = TrackStatus::kDeleted;
            continue;
        }
        if (track.status == TrackStatus::kActive &&
            track.last_obs_frame < frame_k - config_.window_length_frames) {
            track.status = TrackStatus::kDormant;
        }
        if (track.status != TrackStatus::kActive) continue;

        // Coast: advance the belief to the current timestamp and publish the
        // predicted state, flagged so evaluation can exclude it.
        const double dt = timestamp_k - track.belief_timestamp;
        if (dt > 0.0) {
            track.belief = filter.predict(track.belief, dt);
            track.belief_timestamp = timestamp_k;
        }
        ObjectState state;
        state.position = track.belief.mean.head<3>();
        state.velocity = track.belief.mean.tail<3>();
        state.yaw = track.last_yaw;
        state.size = track.size_samples > 0 ? Vec3(track.size_sum / track.size_samples)
                                            : Vec3::Ones();
        track.history.push_back({frame_k, state, std::nullopt, true});
        outputs.push_back({tid, track.class_label, state.position, state.yaw, state.size,
                           state.velocity, score_to_probability(track.last_llr), true});
    }

    map.retain_origins(live_track_ids());

    std::sort(outputs.begin(), outputs.end(),
              [](const TrackOutput& a, const TrackOutput& b) { return a.track_id < b.track_id; });
    return outputs;
}

}  // namespace wintrack
