#pragma once

#include <memory>
#include <vector>

#include "wintrack/assignment.hpp"
#include "wintrack/assoc_graph.hpp"
#include "wintrack/config.hpp"
#include "wintrack/hypothesis.hpp"
#include "wintrack/motion_filter.hpp"
#include "wintrack/track_manager.hpp"

namespace wintrack {

/// The per-frame pipeline over one scene: window contraction, graph
/// expansion, hypothesis branching and M-best pruning, assignment solve, and
/// the causal commit. Feed frames in strictly increasing order.
class SlidingWindowTracker {
  public:
    /// The config must already satisfy validate_config.
    explicit SlidingWindowTracker(const TrackerConfig& config);

    /// Processes one frame and returns the active-track outputs for it.
    /// Detections must all carry the given frame_index; ids are assigned
    /// sequentially when negative.
    std::vector<TrackOutput> step(int frame_index, double timestamp,
                                  std::vector<Detection> detections);

    const AssociationGraph& graph() const { return graph_; }
    const HypothesisMap& map() const { return map_; }
    const TrackManager& manager() const { return manager_; }
    const AssignmentProblem& last_problem() const { return last_problem_; }
    const AssignmentSolution& last_solution() const { return last_solution_; }
    /// Frames where the exact solver ran out of budget and the best-known
    /// incumbent was committed instead.
    int solver_fallbacks() const { return solver_fallbacks_; }

  private:
    TrackerConfig config_;
    FilterModel filter_;
    AssociationGraph graph_;
    HypothesisMap map_;
    TrackManager manager_;
    AssignmentProblem last_problem_;
    AssignmentSolution last_solution_;
    int last_frame_ = -1;
    double last_timestamp_ = 0.0;
    std::int64_t next_detection_id_ = 0;
    int solver_fallbacks_ = 0;
};

}  // namespace wintrack
