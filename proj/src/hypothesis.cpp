#include "wintrack/hypothesis.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "wintrack/errors.hpp"

namespace wintrack {

namespace {

// Embeddings present in one frame layer, in node order. This is the softmax
// candidate set for similarity scoring against that frame.
std::vector<Eigen::VectorXd> layer_embeddings(const AssociationGraph& graph,
                                              int frame_index) {
    std::vector<Eigen::VectorXd> embs;
    for (const auto& layer : graph.layers()) {
        if (layer.frame_index != frame_index) continue;
        for (NodeId id : layer.nodes) {
            const auto& det = *graph.node(id).detection;
            if (det.embedding) embs.push_back(*det.embedding);
        }
        break;
    }
    return embs;
}

}  // namespace

std::vector<int> dense_sequence(const Hypothesis& hyp, int first_frame, int last_frame) {
    std::vector<int> seq(static_cast<std::size_t>(last_frame - first_frame + 1), 0);
    for (const auto& e : hyp.entries) {
        if (e.frame_index < first_frame || e.frame_index > last_frame) {
            throw ConsistencyError("dense_sequence: entry outside requested range");
        }
        seq[static_cast<std::size_t>(e.frame_index - first_frame)] = e.index_in_frame;
    }
    return seq;
}

ScoreIncrement recompute_score(const Hypothesis& hyp, const AssociationGraph& graph,
                               const FilterModel& filter, const TrackerConfig& config,
                               int current_frame) {
    if (hyp.entries.empty()) throw ConsistencyError("recompute_score: empty hypothesis");
    const ScoreIncrement skip = skip_increment(config.detect_prob, config.false_alarm_prob);

    ScoreIncrement score;
    const Detection* prev_det = graph.node(hyp.entries.front().node).detection.get();
    score.conf = confidence_increment(prev_det->confidence);
    GaussianBelief belief = filter.initial_belief(*prev_det);

    for (std::size_t i = 1; i < hyp.entries.size(); ++i) {
        const auto& entry = hyp.entries[i];
        const Detection& det = *graph.node(entry.node).detection;
        const int gap = entry.frame_index - hyp.entries[i - 1].frame_index;
        score.conf += (gap - 1) * skip.conf;

        const GaussianBelief pred = filter.predict(belief, det.timestamp - prev_det->timestamp);
        const UpdateResult upd = filter.update(pred, filter.measurement_from(det));
        score.kin += kinematic_increment(upd.innovation, upd.innovation_cov,
                                         config.measurement_volume_m3);
        score.conf += confidence_increment(det.confidence);
        if (det.embedding && prev_det->embedding) {
            score.sim += similarity_increment(
                *det.embedding, *prev_det->embedding,
                layer_embeddings(graph, hyp.entries[i - 1].frame_index));
        }
        belief = upd.posterior;
        prev_det = &det;
    }
    score.conf += (current_frame - hyp.entries.back().frame_index) * skip.conf;
    return score;
}

HypothesisMap::HypothesisMap(const TrackerConfig& config) : config_(config) {}

Hypothesis HypothesisMap::extend(const Hypothesis& parent, const GraphNode& from,
                                 const GraphNode& to, const FilterModel& filter,
                                 const std::vector<Eigen::VectorXd>& prev_frame_embeddings) const {
    const Detection& det = *to.detection;
    const GaussianBelief pred = filter.predict(parent.belief, det.timestamp - parent.last_timestamp);
    const UpdateResult upd = filter.update(pred, filter.measurement_from(det));

    Hypothesis child;
    child.entries = parent.entries;
    child.entries.push_back({to.frame_index, to.id, to.index_in_frame});
    // The parent score already carries skip increments for every frame since
    // its last detection (applied in place as those frames were branched).
    child.score = parent.score;
    child.score.kin += kinematic_increment(upd.innovation, upd.innovation_cov,
                                           config_.measurement_volume_m3);
    child.score.conf += confidence_increment(det.confidence);
    if (det.embedding && from.detection->embedding) {
        child.score.sim += similarity_increment(*det.embedding, *from.detection->embedding,
                                                prev_frame_embeddings);
    }
    child.belief = upd.posterior;
    child.last_timestamp = det.timestamp;
    child.origin_track = parent.origin_track;
    return child;
}

Hypothesis HypothesisMap::fresh_pair(const GraphNode& from, const GraphNode& to,
                                     const FilterModel& filter,
                                     const std::vector<Eigen::VectorXd>& prev_frame_embeddings) const {
    const Detection& first = *from.detection;
    const Detection& second = *to.detection;
    const ScoreIncrement skip = skip_increment(config_.detect_prob, config_.false_alarm_prob);

    Hypothesis hyp;
    hyp.entries.push_back({from.frame_index, from.id, from.index_in_frame});
    hyp.entries.push_back({to.frame_index, to.id, to.index_in_frame});
    // A first detection contributes confidence only: no kinematic ratio exists
    // before there is a predicted belief.
    hyp.score.conf = confidence_increment(first.confidence);
    hyp.score.conf += (to.frame_index - from.frame_index - 1) * skip.conf;

    const GaussianBelief pred = filter.predict(filter.initial_belief(first),
                                               second.timestamp - first.timestamp);
    const UpdateResult upd = filter.update(pred, filter.measurement_from(second));
    hyp.score.kin = kinematic_increment(upd.innovation, upd.innovation_cov,
                                        config_.measurement_volume_m3);
    hyp.score.conf += confidence_increment(second.confidence);
    if (second.embedding && first.embedding) {
        hyp.score.sim = similarity_increment(*second.embedding, *first.embedding,
                                             prev_frame_embeddings);
    }
    hyp.belief = upd.posterior;
    hyp.last_timestamp = second.timestamp;
    return hyp;
}

void HypothesisMap::branch_on_frame(const AssociationGraph& graph, int frame_k,
                                    const std::vector<NodeId>& new_frame_nodes,
                                    const FilterModel& filter) {
    if (frame_k <= current_frame_) {
        throw SequencingError("branch_on_frame: frame index must advance");
    }
    // Frames with no detections at all never reach the tracker, so one step
    // can advance several frame indices; every one of them is a skip.
    const int step_gap = frame_k - current_frame_;
    current_frame_ = frame_k;

    // Rows indexed by their last node, so extensions cost O(edges) overall.
    std::unordered_map<NodeId, std::vector<std::size_t>> rows_by_last;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        rows_by_last[rows_[i].last().node].push_back(i);
    }

    // In-edges of the new nodes, gathered in layer order for determinism.
    std::unordered_map<NodeId, std::vector<NodeId>> in_edges;
    for (const auto& layer : graph.layers()) {
        if (layer.frame_index >= frame_k) continue;
        for (NodeId u : layer.nodes) {
            for (NodeId to : graph.edges_from(u)) {
                if (graph.node(to).frame_index == frame_k) in_edges[to].push_back(u);
            }
        }
    }

    std::map<int, std::vector<Eigen::VectorXd>> embedding_cache;
    auto embeddings_of = [&](int frame) -> const std::vector<Eigen::VectorXd>& {
        auto it = embedding_cache.find(frame);
        if (it == embedding_cache.end()) {
            it = embedding_cache.emplace(frame, layer_embeddings(graph, frame)).first;
        }
        return it->second;
    };

    const ScoreIncrement skip = skip_increment(config_.detect_prob, config_.false_alarm_prob);
    std::vector<Hypothesis> children;
    for (NodeId v : new_frame_nodes) {
        const GraphNode& to = graph.node(v);
        auto edges_it = in_edges.find(v);
        if (edges_it == in_edges.end()) continue;
        for (NodeId u : edges_it->second) {
            const GraphNode& from = graph.node(u);
            const auto& prev_embs = embeddings_of(from.frame_index);
            auto rows_it = rows_by_last.find(u);
            if (rows_it != rows_by_last.end()) {
                for (std::size_t parent_idx : rows_it->second) {
                    Hypothesis child = extend(rows_[parent_idx], from, to, filter, prev_embs);
                    // The parent snapshot accrued skips only up to the
                    // previous step; intermediate frames inside this step's
                    // gap are skips for the child as well.
                    child.score.conf += (step_gap - 1) * skip.conf;
                    children.push_back(std::move(child));
                }
            }
            // A dormant anchor spawns no fresh pair: resuming its track goes
            // through the coasting row so the sequence is not duplicated.
            if (!from.is_dormant_anchor) {
                children.push_back(fresh_pair(from, to, filter, prev_embs));
            }
        }
    }

    // Every pre-existing row becomes its own skip child, in place. Children
    // were derived from the pre-skip scores above.
    for (Hypothesis& row : rows_) row.score.conf += step_gap * skip.conf;

    rows_.insert(rows_.end(), std::make_move_iterator(children.begin()),
                 std::make_move_iterator(children.end()));
}

void HypothesisMap::prune_m_best() {
    if (rows_.empty()) return;

    int first_frame = rows_.front().entries.front().frame_index;
    for (const auto& row : rows_) {
        first_frame = std::min(first_frame, row.entries.front().frame_index);
    }

    std::vector<Hypothesis> kept;
    kept.reserve(rows_.size());
    std::map<NodeId, std::vector<std::size_t>> families;  // root node -> row indices
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].last().frame_index == current_frame_) {
            families[rows_[i].last().node].push_back(i);
        } else {
            kept.push_back(std::move(rows_[i]));  // coasting rows are untouched
        }
    }

    const std::size_t m = static_cast<std::size_t>(config_.max_hypotheses_per_root);
    for (auto& [root, indices] : families) {
        std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
            const double sa = rows_[a].score_total();
            const double sb = rows_[b].score_total();
            if (sa != sb) return sa > sb;
            return dense_sequence(rows_[a], first_frame, current_frame_) <
                   dense_sequence(rows_[b], first_frame, current_frame_);
        });
        if (indices.size() > m) indices.resize(m);
        for (std::size_t i : indices) kept.push_back(std::move(rows_[i]));
    }
    rows_ = std::move(kept);
}

void HypothesisMap::contract_oldest(const std::vector<NodeId>& removed_nodes) {
    const std::unordered_set<NodeId> gone(removed_nodes.begin(), removed_nodes.end());

    std::vector<Hypothesis> kept;
    kept.reserve(rows_.size());
    // Sequence -> index into kept, for merging rows that collapse to the same
    // suffix once their oldest entries disappear.
    std::map<std::vector<std::pair<int, NodeId>>, std::size_t> seen;

    for (Hypothesis& row : rows_) {
        auto cut = std::remove_if(row.entries.begin(), row.entries.end(),
                                  [&](const HypothesisEntry& e) { return gone.count(e.node) > 0; });
        row.entries.erase(cut, row.entries.end());
        if (row.entries.empty()) continue;
        if (row.entries.size() < 2 && !row.origin_track) continue;

        std::vector<std::pair<int, NodeId>> key;
        key.reserve(row.entries.size());
        for (const auto& e : row.entries) key.emplace_back(e.frame_index, e.node);

        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(std::move(key), kept.size());
            kept.push_back(std::move(row));
        } else {
            Hypothesis& winner = kept[it->second];
            const bool replace = row.score_total() > winner.score_total();
            std::optional<std::int64_t> origin = winner.origin_track ? winner.origin_track
                                                                     : row.origin_track;
            if (replace) winner = std::move(row);
            winner.origin_track = origin;
        }
    }
    rows_ = std::move(kept);
}

void HypothesisMap::stamp_origin(std::size_t row_index, std::int64_t track_id) {
    if (row_index >= rows_.size()) throw ConsistencyError("stamp_origin: row out of range");
    rows_[row_index].origin_track = track_id;
}

void HypothesisMap::retain_origins(const std::set<std::int64_t>& live_tracks) {
    for (Hypothesis& row : rows_) {
        if (row.origin_track && live_tracks.count(*row.origin_track) == 0) {
            row.origin_track.reset();
        }
    }
    // Rows that lost both their origin and their second detection die at the
    // next contraction; nothing else references them meanwhile.
}

std::size_t HypothesisMap::rooted_row_count() const {
    std::size_t n = 0;
    for (const auto& row : rows_) {
        if (row.last().frame_index == current_frame_) ++n;
    }
    return n;
}

}  // namespace wintrack
