#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wintrack/config.hpp"
#include "wintrack/types.hpp"

namespace wintrack {

using NodeId = std::uint64_t;
inline constexpr NodeId kInvalidNode = static_cast<NodeId>(-1);

struct GraphNode {
    NodeId id = kInvalidNode;
    int frame_index = 0;
    int index_in_frame = 0;  // 1-based position within the frame layer
    std::shared_ptr<const Detection> detection;
    bool is_dormant_anchor = false;  // last observation of a track older than k-T
};

struct GraphEdge {
    NodeId from = kInvalidNode;
    NodeId to = kInvalidNode;
    int frame_gap = 0;  // lifted iff > 1
};

/// Counts for the fully connected window graph with the given layer sizes:
/// order |V|, cross-frame size |E| = sum_{i<j} N_i N_j, and the number of
/// node-or-skip traversals with at least two detections,
/// |Z| = prod(N_i + 1) - sum N_i - 1.
struct DenseCounts {
    std::int64_t order = 0;
    std::int64_t size = 0;
    std::int64_t hypothesis_count = 0;
};

DenseCounts dense_counts(const std::vector<std::int64_t>& layer_sizes);

/// True iff both detections carry the same class label.
bool class_gate(const Detection& a, const Detection& b);

/// True iff the pair is kinematically reachable:
/// ||pos_a - pos_b|| <= min(v_lim * |dt|, cap). Throws InvalidValueError when
/// the timestamps coincide.
bool distance_gate(const Detection& a, const Detection& b, double v_lim_mps,
                   double cap_m);

/// Sliding-window association graph: one node layer per frame, forward edges
/// only, lifted edges across non-adjacent frames. Edges are pruned at insert
/// time by the class and distance gates. Dormant-track anchor nodes may
/// outlive the regular window by the configured horizon.
class AssociationGraph {
public:
    explicit AssociationGraph(const TrackerConfig& config);

    /// Adds one node per detection at frame `frame_index` (which must advance
    /// monotonically) and gated edges from every retained earlier node.
    /// Returns ids of the nodes added, in detection order.
    std::vector<NodeId> expand_frame(
        int frame_index, const std::vector<std::shared_ptr<const Detection>>& detections);

    /// Drops nodes older than new_k - T, keeping anchor nodes down to
    /// new_k - T - T_old. Returns the ids of the removed nodes.
    std::vector<NodeId> contract_window(int new_k,
                                        const std::unordered_set<NodeId>& anchors);

    const GraphNode& node(NodeId id) const;
    bool has_node(NodeId id) const { return nodes_.count(id) > 0; }
    /// Forward adjacency, in (frame, insertion) order.
    const std::vector<NodeId>& edges_from(NodeId id) const;
    std::vector<NodeId> incoming(NodeId id) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    int current_frame() const { return current_frame_; }

    struct FrameLayer {
        int frame_index = 0;
        std::vector<NodeId> nodes;  // insertion order
    };
    const std::deque<FrameLayer>& layers() const { return layers_; }

    /// Re-checks both gates on every stored edge (test hook).
    bool all_edges_gated() const;

    /// Node and edge lists in a stable text form for debugging and golden tests.
    std::string dump() const;

private:
    TrackerConfig config_;
    std::deque<FrameLayer> layers_;
    std::unordered_map<NodeId, GraphNode> nodes_;
    std::unordered_map<NodeId, std::vector<NodeId>> out_edges_;
    std::size_t edge_count_ = 0;
    NodeId next_id_ = 0;
    int current_frame_ = -1;

    bool edge_allowed(const Detection& a, const Detection& b) const;
};

}  // namespace wintrack
