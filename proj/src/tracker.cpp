#include "wintrack/tracker.hpp"

#include "wintrack/errors.hpp"

namespace wintrack {

SlidingWindowTracker::SlidingWindowTracker(const TrackerConfig& config)
    : config_(config), filter_(config), graph_(config), map_(config), manager_(config) {
    const auto violations = validate_config(config);
    if (!violations.empty()) {
        throw InvalidValueError("tracker: invalid config: " + violations.front().field + ": " +
                                violations.front().message);
    }
}

std::vector<TrackOutput> SlidingWindowTracker::step(int frame_index, double timestamp,
                                                    std::vector<Detection> detections) {
    if (frame_index <= last_frame_) {
        throw SequencingError("step: frame index must strictly increase");
    }
    if (last_frame_ >= 0 && timestamp <= last_timestamp_) {
        throw InvalidValueError("step: timestamps must strictly increase with frame index");
    }

    std::vector<std::shared_ptr<const Detection>> shared;
    shared.reserve(detections.size());
    for (Detection& det : detections) {
        if (det.frame_index != frame_index) {
            throw InvalidValueError("step: detection frame_index mismatch");
        }
        if (det.timestamp != timestamp) {
            throw InvalidValueError("step: detection timestamp mismatch");
        }
        const auto problems = det.validate();
        if (!problems.empty()) {
            throw InvalidValueError("step: invalid detection: " + problems.front());
        }
        if (det.detection_id < 0) det.detection_id = next_detection_id_++;
        shared.push_back(std::make_shared<const Detection>(std::move(det)));
    }

    const std::vector<NodeId> removed =
        graph_.contract_window(frame_index, manager_.anchor_nodes());
    map_.contract_oldest(removed);

    const std::vector<NodeId> new_nodes = graph_.expand_frame(frame_index, shared);
    map_.branch_on_frame(graph_, frame_index, new_nodes, filter_);
    map_.prune_m_best();

    last_problem_ = build_problem(map_, graph_);
    try {
        last_solution_ = solve(last_problem_);
    } catch (const SolverResourceError& e) {
        // Exhausting the branch-and-bound budget still yields a feasible
        // incumbent; committing it keeps the run alive at slightly reduced
        // assignment quality.
        last_solution_ = e.incumbent;
        solver_fallbacks_ += 1;
    }

    auto outputs =
        manager_.commit(last_solution_, map_, graph_, filter_, frame_index, timestamp);
    last_frame_ = frame_index;
    last_timestamp_ = timestamp;
    return outputs;
}

}  // namespace wintrack
