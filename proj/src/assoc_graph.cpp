#include "wintrack/assoc_graph.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "wintrack/errors.hpp"

namespace wintrack {

DenseCounts dense_counts(const std::vector<std::int64_t>& layer_sizes) {
    DenseCounts c;
    // Note: a variant that also pairs nodes within one frame would add
    // sum_i N_i^2 terms; a track cannot use two detections at one timestamp,
    // so only cross-frame pairs are counted here.
    std::int64_t prod = 1;
    for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
        const std::int64_t n = layer_sizes[i];
        if (n < 0) throw InvalidValueError("dense_counts: negative layer size");
        for (std::size_t j = i + 1; j < layer_sizes.size(); ++j) {
            c.size += n * layer_sizes[j];
        }
        c.order += n;
        if (prod > std::numeric_limits<std::int64_t>::max() / (n + 1)) {
            throw InvalidValueError("dense_counts: hypothesis count overflows");
        }
        prod *= n + 1;
    }
    c.hypothesis_count = layer_sizes.empty() ? 0 : prod - c.order - 1;
    return c;
}

bool class_gate(const Detection& a, const Detection& b) {
    return a.class_label == b.class_label;
}

bool distance_gate(const Detection& a, const Detection& b, double v_lim_mps,
                   double cap_m) {
    const double dt = std::abs(a.timestamp - b.timestamp);
    if (dt == 0.0) {
        throw InvalidValueError("distance_gate: detections share a timestamp");
    }
    const double limit = std::min(v_lim_mps * dt, cap_m);
    return (a.position - b.position).norm() <= limit;
}

AssociationGraph::AssociationGraph(const TrackerConfig& config) : config_(config) {}

bool AssociationGraph::edge_allowed(const Detection& a, const Detection& b) const {
    if (!class_gate(a, b)) return false;
    return distance_gate(a, b, config_.velocity_limit_for(a.class_label),
                         config_.distance_cap_m);
}

std::vector<NodeId> AssociationGraph::expand_frame(
    int frame_index, const std::vector<std::shared_ptr<const Detection>>& detections) {
    if (frame_index <= current_frame_) {
        throw SequencingError("expand_frame: frame index must advance");
    }
    current_frame_ = frame_index;
    layers_.push_back({frame_index, {}});
    FrameLayer& layer = layers_.back();

    std::vector<NodeId> added;
    added.reserve(detections.size());
    for (const auto& det : detections) {
        GraphNode node;
        node.id = next_id_++;
        node.frame_index = frame_index;
        node.index_in_frame = static_cast<int>(layer.nodes.size()) + 1;
        node.detection = det;
        layer.nodes.push_back(node.id);
        added.push_back(node.id);
        nodes_.emplace(node.id, std::move(node));
    }

    // Gated edges from every retained node in earlier layers to each new node.
    for (const auto& layer_it : layers_) {
        if (layer_it.frame_index >= frame_index) continue;
        for (NodeId from : layer_it.nodes) {
            const GraphNode& from_node = nodes_.at(from);
            for (NodeId to : added) {
                if (edge_allowed(*from_node.detection, *nodes_.at(to).detection)) {
                    out_edges_[from].push_back(to);
                    ++edge_count_;
                }
            }
        }
    }
    return added;
}

std::vector<NodeId> AssociationGraph::contract_window(
    int new_k, const std::unordered_set<NodeId>& anchors) {
    const int window_floor = new_k - config_.window_length_frames;
    const int anchor_floor = window_floor - config_.dormant_horizon_frames;

    std::vector<NodeId> removed;
    for (auto it = layers_.begin(); it != layers_.end();) {
        if (it->frame_index >= window_floor) break;
        std::vector<NodeId> kept;
        for (NodeId id : it->nodes) {
            if (anchors.count(id) > 0 && it->frame_index >= anchor_floor) {
                nodes_.at(id).is_dormant_anchor = true;
                kept.push_back(id);
            } else {
                removed.push_back(id);
            }
        }
        if (kept.empty()) {
            it = layers_.erase(it);
        } else {
            it->nodes = std::move(kept);
            ++it;
        }
    }

    std::unordered_set<NodeId> gone(removed.begin(), removed.end());
    for (NodeId id : removed) {
        auto edge_it = out_edges_.find(id);
        if (edge_it != out_edges_.end()) {
            edge_count_ -= edge_it->second.size();
            out_edges_.erase(edge_it);
        }
        nodes_.erase(id);
    }
    // A retained anchor can point at a removed node in a newer sub-window
    // frame; prune those edges so traversals never see dangling targets.
    if (!gone.empty()) {
        for (auto& [from, outs] : out_edges_) {
            auto keep_end = std::remove_if(outs.begin(), outs.end(), [&](NodeId to) {
                return gone.count(to) > 0;
            });
            edge_count_ -= static_cast<std::size_t>(outs.end() - keep_end);
            outs.erase(keep_end, outs.end());
        }
    }
    return removed;
}

const GraphNode& AssociationGraph::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw ConsistencyError("graph: unknown node id " + std::to_string(id));
    }
    return it->second;
}

const std::vector<NodeId>& AssociationGraph::edges_from(NodeId id) const {
    static const std::vector<NodeId> kEmpty;
    auto it = out_edges_.find(id);
    return it == out_edges_.end() ? kEmpty : it->second;
}

std::vector<NodeId> AssociationGraph::incoming(NodeId id) const {
    std::vector<NodeId> in;
    for (const auto& layer : layers_) {
        for (NodeId from : layer.nodes) {
            const auto& outs = edges_from(from);
            if (std::find(outs.begin(), outs.end(), id) != outs.end()) {
                in.push_back(from);
            }
        }
    }
    return in;
}

bool AssociationGraph::all_edges_gated() const {
    for (const auto& [from, outs] : out_edges_) {
        const GraphNode& a = nodes_.at(from);
        for (NodeId to : outs) {
            const GraphNode& b = nodes_.at(to);
            if (b.frame_index <= a.frame_index) return false;
            if (!edge_allowed(*a.detection, *b.detection)) return false;
        }
    }
    return true;
}

std::string AssociationGraph::dump() const {
    std::ostringstream os;
    for (const auto& layer : layers_) {
        for (NodeId id : layer.nodes) {
            const GraphNode& n = nodes_.at(id);
            const auto& p = n.detection->position;
            os << "node " << id << " frame=" << n.frame_index << " class="
               << n.detection->class_label << " pos=(" << p.x() << "," << p.y()
               << "," << p.z() << ")" << (n.is_dormant_anchor ? " anchor" : "")
               << "\n";
        }
    }
    for (const auto& layer : layers_) {
        for (NodeId from : layer.nodes) {
            for (NodeId to : edges_from(from)) {
                os << "edge " << from << " -> " << to
                   << " gap=" << nodes_.at(to).frame_index - nodes_.at(from).frame_index
                   << "\n";
            }
        }
    }
    return os.str();
}

}  // namespace wintrack
