#include "wintrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "wintrack/errors.hpp"

namespace wintrack {

namespace {

double ground_distance(const TrackRecord& out, const GroundTruthRecord& gt) {
    const double dx = out.position.x() - gt.position.x();
    const double dy = out.position.y() - gt.position.y();
    return std::hypot(dx, dy);
}

}  // namespace

FrameMatchDelta match_frame(const std::vector<const TrackRecord*>& outputs,
                            const std::vector<const GroundTruthRecord*>& gts,
                            double threshold, MatchState& state,
                            std::vector<double>* matched_scores) {
    // Sort both sides by id so the result does not depend on input order.
    std::vector<const TrackRecord*> outs = outputs;
    std::sort(outs.begin(), outs.end(), [](const TrackRecord* a, const TrackRecord* b) {
        return a->track_id < b->track_id;
    });
    std::vector<const GroundTruthRecord*> truths = gts;
    std::sort(truths.begin(), truths.end(),
              [](const GroundTruthRecord* a, const GroundTruthRecord* b) {
                  return a->gt_track_id < b->gt_track_id;
              });

    std::vector<bool> out_used(outs.size(), false);
    std::vector<bool> gt_used(truths.size(), false);
    // gt index -> matched output index
    std::vector<std::size_t> pair_of(truths.size(), outs.size());

    // Pass 1: keep an existing gt/track pairing alive whenever it is still
    // within the gate, so brief near-misses do not manufacture switches.
    for (std::size_t g = 0; g < truths.size(); ++g) {
        auto prev = state.find(truths[g]->gt_track_id);
        if (prev == state.end()) continue;
        for (std::size_t o = 0; o < outs.size(); ++o) {
            if (out_used[o] || outs[o]->track_id != prev->second) continue;
            if (ground_distance(*outs[o], *truths[g]) <= threshold) {
                out_used[o] = true;
                gt_used[g] = true;
                pair_of[g] = o;
            }
            break;  // ids are unique per frame; no second candidate
        }
    }

    // Pass 2: greedy nearest-first over the remaining pairs, ties broken by
    // smaller gt id then smaller track id.
    std::vector<std::tuple<double, std::int64_t, std::int64_t, std::size_t, std::size_t>> cands;
    for (std::size_t g = 0; g < truths.size(); ++g) {
        if (gt_used[g]) continue;
        for (std::size_t o = 0; o < outs.size(); ++o) {
            if (out_used[o]) continue;
            const double d = ground_distance(*outs[o], *truths[g]);
            if (d <= threshold) {
                cands.emplace_back(d, truths[g]->gt_track_id, outs[o]->track_id, g, o);
            }
        }
    }
    std::sort(cands.begin(), cands.end());
    for (const auto& [d, gid, tid, g, o] : cands) {
        (void)d;
        (void)gid;
        (void)tid;
        if (gt_used[g] || out_used[o]) continue;
        gt_used[g] = true;
        out_used[o] = true;
        pair_of[g] = o;
    }

    FrameMatchDelta delta;
    for (std::size_t g = 0; g < truths.size(); ++g) {
        if (!gt_used[g]) {
            delta.fn += 1;
            continue;
        }
        const TrackRecord& out = *outs[pair_of[g]];
        delta.matches += 1;
        auto prev = state.find(truths[g]->gt_track_id);
        if (prev != state.end() && prev->second != out.track_id) delta.ids += 1;
        state[truths[g]->gt_track_id] = out.track_id;
        if (matched_scores != nullptr) matched_scores->push_back(out.score);
    }
    for (std::size_t o = 0; o < outs.size(); ++o) {
        if (!out_used[o]) delta.fp += 1;
    }
    return delta;
}

double mota(std::int64_t fp, std::int64_t fn, std::int64_t ids, std::int64_t gt) {
    if (gt <= 0) throw UndefinedMetricError("mota: no ground-truth detections");
    return 1.0 - static_cast<double>(fp + fn + ids) / static_cast<double>(gt);
}

double amota_term(std::int64_t fp, std::int64_t fn, std::int64_t ids, std::int64_t gt,
                  double r) {
    if (gt <= 0 || r <= 0.0) {
        throw UndefinedMetricError("amota_term: needs gt > 0 and r > 0");
    }
    const double numer = static_cast<double>(fp + fn + ids) - (1.0 - r) * static_cast<double>(gt);
    const double term = 1.0 - numer / (r * static_cast<double>(gt));
    return std::clamp(term, 0.0, 1.0);
}

namespace {

// scene -> frame -> records, kept in maps so iteration order is canonical.
struct ClassData {
    std::map<std::string, std::map<int, std::vector<const TrackRecord*>>> outs;
    std::map<std::string, std::map<int, std::vector<const GroundTruthRecord*>>> gts;
};

struct MatchTotals {
    std::int64_t matches = 0, fp = 0, fn = 0, ids = 0;
};

/// One full pass over every scene and frame of a class, matching outputs with
/// score >= min_score. A fresh MatchState per scene: identities do not carry
/// across scenes.
MatchTotals run_matching(const ClassData& data, double threshold, double min_score,
                         std::vector<double>* matched_scores) {
    MatchTotals totals;
    std::set<std::string> scenes;
    for (const auto& [scene, frames] : data.outs) scenes.insert(scene);
    for (const auto& [scene, frames] : data.gts) scenes.insert(scene);
    for (const std::string& scene : scenes) {
        MatchState state;
        std::set<int> frames;
        auto out_it = data.outs.find(scene);
        auto gt_it = data.gts.find(scene);
        if (out_it != data.outs.end()) {
            for (const auto& [frame, recs] : out_it->second) frames.insert(frame);
        }
        if (gt_it != data.gts.end()) {
            for (const auto& [frame, recs] : gt_it->second) frames.insert(frame);
        }
        static const std::vector<const TrackRecord*> no_outs;
        static const std::vector<const GroundTruthRecord*> no_gts;
        for (int frame : frames) {
            const std::vector<const TrackRecord*>* outs = &no_outs;
            const std::vector<const GroundTruthRecord*>* gts = &no_gts;
            if (out_it != data.outs.end()) {
                auto f = out_it->second.find(frame);
                if (f != out_it->second.end()) outs = &f->second;
            }
            if (gt_it != data.gts.end()) {
                auto f = gt_it->second.find(frame);
                if (f != gt_it->second.end()) gts = &f->second;
            }
            std::vector<const TrackRecord*> kept;
            kept.reserve(outs->size());
            for (const TrackRecord* rec : *outs) {
                if (rec->score >= min_score) kept.push_back(rec);
            }
            FrameMatchDelta delta =
                match_frame(kept, *gts, threshold, state, matched_scores);
            totals.matches += delta.matches;
            totals.fp += delta.fp;
            totals.fn += delta.fn;
            totals.ids += delta.ids;
        }
    }
    return totals;
}

}  // namespace

MetricsReport evaluate(const std::vector<TrackRecord>& tracks,
                       const std::vector<GroundTruthRecord>& ground_truth,
                       const EvalOptions& options) {
    if (options.threshold_m <= 0.0) {
        throw InvalidValueError("evaluate: threshold_m must be positive");
    }
    if (options.recall_levels < 1) {
        throw InvalidValueError("evaluate: recall_levels must be >= 1");
    }
    const auto class_allowed = [&](const std::string& label) {
        if (options.class_filter.empty()) return true;
        return std::find(options.class_filter.begin(), options.class_filter.end(), label) !=
               options.class_filter.end();
    };

    std::map<std::string, ClassData> by_class;
    std::map<std::string, std::int64_t> gt_count;
    for (const GroundTruthRecord& rec : ground_truth) {
        if (!class_allowed(rec.class_label)) continue;
        by_class[rec.class_label].gts[rec.scene_id][rec.frame_index].push_back(&rec);
        gt_count[rec.class_label] += 1;
    }
    for (const TrackRecord& rec : tracks) {
        if (!class_allowed(rec.class_label)) continue;
        if (rec.coasted && !options.include_coasted) continue;
        by_class[rec.class_label].outs[rec.scene_id][rec.frame_index].push_back(&rec);
    }

    MetricsReport report;
    const int levels = options.recall_levels;
    double amota_sum = 0.0;
    int amota_classes = 0;
    for (auto& [label, data] : by_class) {
        ClassMetrics cm;
        cm.class_label = label;
        cm.gt = gt_count.count(label) != 0 ? gt_count[label] : 0;

        // Base pass at full recall: the headline FP/FN/IDS/MOTA counts, plus
        // the matched-score pool the recall sweep thresholds are drawn from.
        std::vector<double> matched_scores;
        MatchTotals base =
            run_matching(data, options.threshold_m, -std::numeric_limits<double>::infinity(),
                         &matched_scores);
        cm.matches = base.matches;
        cm.fp = base.fp;
        cm.fn = base.fn;
        cm.ids = base.ids;
        if (cm.gt > 0) cm.mota_value = mota(cm.fp, cm.fn, cm.ids, cm.gt);

        if (cm.gt > 0) {
            std::sort(matched_scores.begin(), matched_scores.end(), std::greater<double>());
            double term_sum = 0.0;
            for (int i = 1; i <= levels; ++i) {
                RecallLevel level;
                level.recall = static_cast<double>(i) / static_cast<double>(levels);
                const auto required = static_cast<std::int64_t>(
                    std::ceil(level.recall * static_cast<double>(cm.gt) - 1e-9));
                if (required > static_cast<std::int64_t>(matched_scores.size())) {
                    // The tracker never recalls this many boxes at any score
                    // threshold; the level contributes zero.
                    level.reachable = false;
                    level.term = 0.0;
                } else {
                    level.reachable = true;
                    level.score_threshold = matched_scores[required - 1];
                    MatchTotals at = run_matching(data, options.threshold_m,
                                                  level.score_threshold - 1e-12, nullptr);
                    level.fp = at.fp;
                    level.fn = at.fn;
                    level.ids = at.ids;
                    level.term = amota_term(at.fp, at.fn, at.ids, cm.gt, level.recall);
                }
                term_sum += level.term;
                cm.sweep.push_back(level);
            }
            cm.amota = term_sum / static_cast<double>(levels);
            amota_sum += cm.amota;
            amota_classes += 1;
        }

        report.gt += cm.gt;
        report.matches += cm.matches;
        report.fp += cm.fp;
        report.fn += cm.fn;
        report.ids += cm.ids;
        report.per_class.push_back(std::move(cm));
    }
    if (report.gt > 0) report.mota_value = mota(report.fp, report.fn, report.ids, report.gt);
    if (amota_classes > 0) report.amota = amota_sum / static_cast<double>(amota_classes);
    return report;
}

std::string format_report(const MetricsReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(14) << "class" << std::right << std::setw(8) << "gt"
        << std::setw(8) << "match" << std::setw(8) << "fp" << std::setw(8) << "fn"
        << std::setw(8) << "ids" << std::setw(10) << "mota" << std::setw(10) << "amota"
        << "\n";
    out << std::string(74, '-') << "\n";
    const auto row = [&out](const std::string& label, std::int64_t gt, std::int64_t matches,
                            std::int64_t fp, std::int64_t fn, std::int64_t ids, double mota_value,
                            double amota) {
        out << std::left << std::setw(14) << label << std::right << std::setw(8) << gt
            << std::setw(8) << matches << std::setw(8) << fp << std::setw(8) << fn << std::setw(8)
            << ids;
        if (gt > 0) {
            out << std::setw(10) << std::fixed << std::setprecision(4) << mota_value
                << std::setw(10) << amota;
        } else {
            out << std::setw(10) << "n/a" << std::setw(10) << "n/a";
        }
        out << "\n";
        out.unsetf(std::ios::fixed);
    };
    for (const ClassMetrics& cm : report.per_class) {
        row(cm.class_label, cm.gt, cm.matches, cm.fp, cm.fn, cm.ids, cm.mota_value, cm.amota);
    }
    out << std::string(74, '-') << "\n";
    row("overall", report.gt, report.matches, report.fp, report.fn, report.ids,
        report.mota_value, report.amota);
    return out.str();
}

}  // namespace wintrack
