#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "wintrack/assoc_graph.hpp"
#include "wintrack/config.hpp"
#include "wintrack/motion_filter.hpp"
#include "wintrack/scoring.hpp"
#include "wintrack/types.hpp"

namespace wintrack {

// One detection picked up by a hypothesis. Entries are kept sparse: frames
// between (or after) entries are implicit skips whose increments have already
// been folded into the cumulative score.
struct HypothesisEntry {
    int frame_index = -1;
    NodeId node = kInvalidNode;
    int index_in_frame = 0;  // copied from the graph node for stable tie-breaks

    friend bool operator==(const HypothesisEntry& a, const HypothesisEntry& b) {
        return a.frame_index == b.frame_index && a.node == b.node;
    }
};

// A candidate track over the window: a node-or-skip sequence with cumulative
// log-likelihood-ratio score and the filter belief after its last detection.
// Invariant: entries ordered by strictly increasing frame; at least two
// entries unless origin_track is set (a coasting stub kept so a dormant track
// can resume through its anchor node).
struct Hypothesis {
    std::vector<HypothesisEntry> entries;
    ScoreIncrement score;
    GaussianBelief belief;
    double last_timestamp = 0.0;
    std::optional<std::int64_t> origin_track;

    double score_total() const { return score.total(); }
    const HypothesisEntry& last() const { return entries.back(); }
};

// Per-frame sequence with 0 = skip and 1-based node index otherwise, over
// [first_frame, last_frame]. Used for deterministic tie-breaking and tests.
std::vector<int> dense_sequence(const Hypothesis& hyp, int first_frame, int last_frame);

// Independent batch rescoring of a hypothesis from the current graph state;
// equals the incrementally accumulated score as long as no entry has been
// contracted away since creation. Trailing skips up to current_frame included.
ScoreIncrement recompute_score(const Hypothesis& hyp, const AssociationGraph& graph,
                               const FilterModel& filter, const TrackerConfig& config,
                               int current_frame);

// The hypothesis map: all candidate tracks under consideration, maintained
// frame to frame by branching on new detections, M-best pruning per root, and
// contraction in lockstep with the association graph.
class HypothesisMap {
  public:
    explicit HypothesisMap(const TrackerConfig& config);

    // Branches every row whose last node has an edge to a new frame-k node,
    // seeds fresh two-detection rows from each such edge (except from dormant
    // anchors, whose resumption rides on their coasting rows), then applies
    // the skip increment in place to every pre-existing row.
    void branch_on_frame(const AssociationGraph& graph, int frame_k,
                         const std::vector<NodeId>& new_frame_nodes,
                         const FilterModel& filter);

    // Keeps the M best rows per family rooted at each current-frame node,
    // ordered by descending score then lexicographically smaller dense
    // sequence. Rows not rooted at the current frame are untouched and keep
    // their relative order ahead of the rooted families.
    void prune_m_best();

    // Drops entries referencing nodes removed from the graph, removes rows
    // left with fewer than two detections and no origin track (or none at
    // all), and merges duplicate sequences keeping the higher score.
    void contract_oldest(const std::vector<NodeId>& removed_nodes);

    void stamp_origin(std::size_t row_index, std::int64_t track_id);
    // Clears origin_track on rows whose track is no longer live.
    void retain_origins(const std::set<std::int64_t>& live_tracks);

    const std::vector<Hypothesis>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    int current_frame() const { return current_frame_; }
    // Rows whose last entry sits at the current frame (detection-rooted).
    std::size_t rooted_row_count() const;

  private:
    Hypothesis extend(const Hypothesis& parent, const GraphNode& from, const GraphNode& to,
                      const FilterModel& filter,
                      const std::vector<Eigen::VectorXd>& prev_frame_embeddings) const;
    Hypothesis fresh_pair(const GraphNode& from, const GraphNode& to, const FilterModel& filter,
                          const std::vector<Eigen::VectorXd>& prev_frame_embeddings) const;

    TrackerConfig config_;
    std::vector<Hypothesis> rows_;
    int current_frame_ = -1;
};

}  // namespace wintrack
