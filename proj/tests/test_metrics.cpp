#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wintrack/errors.hpp"
#include "wintrack/metrics.hpp"

using namespace wintrack;

namespace {

GroundTruthRecord gt_at(int frame, std::int64_t id, double x, double y,
                        const std::string& cls = classes::kCar,
                        const std::string& scene = "s0") {
    GroundTruthRecord g;
    g.scene_id = scene;
    g.frame_index = frame;
    g.timestamp = 0.5 * frame;
    g.gt_track_id = id;
    g.class_label = cls;
    g.position = Vec3(x, y, 0.0);
    g.size = Vec3(4.0, 2.0, 1.5);
    return g;
}

TrackRecord tr_at(int frame, std::int64_t id, double x, double y,
                  const std::string& cls = classes::kCar,
                  const std::string& scene = "s0", double score = 0.9,
                  bool coasted = false) {
    TrackRecord t;
    t.scene_id = scene;
    t.frame_index = frame;
    t.timestamp = 0.5 * frame;
    t.track_id = id;
    t.class_label = cls;
    t.position = Vec3(x, y, 0.0);
    t.size = Vec3(4.0, 2.0, 1.5);
    t.score = score;
    t.coasted = coasted;
    return t;
}

FrameMatchDelta match_one(const std::vector<TrackRecord>& outs,
                          const std::vector<GroundTruthRecord>& gts,
                          MatchState& state, double threshold = 2.0) {
    std::vector<const TrackRecord*> op;
    std::vector<const GroundTruthRecord*> gp;
    for (const auto& o : outs) op.push_back(&o);
    for (const auto& g : gts) gp.push_back(&g);
    return match_frame(op, gp, threshold, state);
}

}  // namespace

TEST_CASE("mota frozen value and domain") {
    CHECK(mota(1, 2, 1, 10) == doctest::Approx(0.6));
    CHECK(mota(0, 0, 0, 5) == doctest::Approx(1.0));
    CHECK(mota(10, 10, 0, 5) == doctest::Approx(1.0 - 20.0 / 5.0));  // can go negative
    CHECK_THROWS_AS(mota(0, 0, 0, 0), UndefinedMetricError);
}

TEST_CASE("amota_term clamps into the unit interval") {
    // r = 1 reduces to the clamped MOTA term.
    CHECK(amota_term(1, 2, 1, 10, 1.0) == doctest::Approx(0.6));
    CHECK(amota_term(100, 0, 0, 10, 1.0) == doctest::Approx(0.0));  // clamped at 0
    CHECK(amota_term(0, 0, 0, 10, 0.5) == doctest::Approx(1.0));    // clamped at 1
    // 1 - (fp + fn + ids - (1 - r) gt) / (r gt).
    CHECK(amota_term(1, 5, 0, 10, 0.5) ==
          doctest::Approx(1.0 - (1.0 + 5.0 + 0.0 - 5.0) / 5.0));
    CHECK_THROWS_AS(amota_term(0, 0, 0, 0, 0.5), UndefinedMetricError);
    CHECK_THROWS_AS(amota_term(0, 0, 0, 10, 0.0), UndefinedMetricError);
}

TEST_CASE("match_frame counts matches, FP and FN") {
    MatchState state;
    const auto delta = match_one({tr_at(0, 1, 0.0, 0.0), tr_at(0, 2, 50.0, 0.0)},
                                 {gt_at(0, 10, 0.5, 0.0), gt_at(0, 11, 100.0, 0.0)},
                                 state);
    CHECK(delta.matches == 1);
    CHECK(delta.fp == 1);   // the track at x=50 matches nothing
    CHECK(delta.fn == 1);   // the gt at x=100 is unseen
    CHECK(delta.ids == 0);
    CHECK(state.at(10) == 1);
}

TEST_CASE("match_frame threshold boundary is inclusive") {
    MatchState state;
    CHECK(match_one({tr_at(0, 1, 2.0, 0.0)}, {gt_at(0, 10, 0.0, 0.0)}, state).matches == 1);
    MatchState state2;
    CHECK(match_one({tr_at(0, 1, 2.001, 0.0)}, {gt_at(0, 10, 0.0, 0.0)}, state2).matches == 0);
}

TEST_CASE("matching is 2D: height differences are ignored") {
    MatchState state;
    TrackRecord t = tr_at(0, 1, 0.0, 0.0);
    t.position.z() = 50.0;
    const auto delta = match_one({t}, {gt_at(0, 10, 0.5, 0.0)}, state);
    CHECK(delta.matches == 1);
}

TEST_CASE("persistence beats a closer newcomer") {
    MatchState state;
    // Frame 0 pairs gt 10 with track 1.
    match_one({tr_at(0, 1, 0.0, 0.0)}, {gt_at(0, 10, 0.0, 0.0)}, state);
    // Frame 1: track 2 is closer, but track 1 is still within the threshold,
    // so the old pairing persists and track 2 becomes an FP.
    const auto delta = match_one({tr_at(1, 1, 1.5, 0.0), tr_at(1, 2, 0.1, 0.0)},
                                 {gt_at(1, 10, 0.0, 0.0)}, state);
    CHECK(delta.matches == 1);
    CHECK(delta.fp == 1);
    CHECK(delta.ids == 0);
    CHECK(state.at(10) == 1);
}

TEST_CASE("a switch is counted once and the state follows") {
    MatchState state;
    match_one({tr_at(0, 1, 0.0, 0.0)}, {gt_at(0, 10, 0.0, 0.0)}, state);
    // Track 1 disappears; track 2 takes over: one IDS.
    const auto delta = match_one({tr_at(1, 2, 0.0, 0.0)}, {gt_at(1, 10, 0.0, 0.0)}, state);
    CHECK(delta.matches == 1);
    CHECK(delta.ids == 1);
    CHECK(state.at(10) == 2);
    // Staying on track 2 afterwards is clean.
    const auto delta2 = match_one({tr_at(2, 2, 0.0, 0.0)}, {gt_at(2, 10, 0.0, 0.0)}, state);
    CHECK(delta2.ids == 0);
}

TEST_CASE("switches persist across unmatched frames") {
    MatchState state;
    match_one({tr_at(0, 1, 0.0, 0.0)}, {gt_at(0, 10, 0.0, 0.0)}, state);
    // One empty frame: the gt goes unmatched (FN) but the pairing memory stays.
    const auto gap = match_one({}, {gt_at(1, 10, 0.0, 0.0)}, state);
    CHECK(gap.fn == 1);
    const auto resumed = match_one({tr_at(2, 7, 0.0, 0.0)}, {gt_at(2, 10, 0.0, 0.0)}, state);
    CHECK(resumed.ids == 1);  // 1 -> 7 counts even over the gap
}

TEST_CASE("greedy matching is order-independent and id-tie-broken") {
    // Two gts and two tracks all within range; distances pick the pairing:
    // t1-g10 at 0.1, t2-g11 at 0.1, cross pairs at 0.9.
    const std::vector<TrackRecord> outs = {tr_at(0, 2, 1.0, 0.0), tr_at(0, 1, 0.1, 0.0)};
    const std::vector<GroundTruthRecord> gts = {gt_at(0, 11, 0.9, 0.0), gt_at(0, 10, 0.0, 0.0)};
    MatchState a;
    const auto d1 = match_one(outs, gts, a);
    CHECK(d1.matches == 2);
    CHECK(a.at(10) == 1);
    CHECK(a.at(11) == 2);

    std::vector<TrackRecord> outs_rev = {outs[1], outs[0]};
    std::vector<GroundTruthRecord> gts_rev = {gts[1], gts[0]};
    MatchState b;
    const auto d2 = match_one(outs_rev, gts_rev, b);
    CHECK(d2.matches == 2);
    CHECK(b == a);

    // Exact distance tie: smaller gt id, then smaller track id, wins.
    MatchState c;
    match_one({tr_at(0, 5, 0.0, 1.0), tr_at(0, 3, 0.0, 1.0)},
              {gt_at(0, 20, 0.0, 0.0)}, c);
    CHECK(c.at(20) == 3);
}

TEST_CASE("hand-built three-frame switch yields exactly one IDS") {
    std::vector<GroundTruthRecord> gt;
    std::vector<TrackRecord> tracks;
    for (int f = 0; f < 3; ++f) {
        gt.push_back(gt_at(f, 10, 1.0 * f, 0.0));
        // Tracker id changes from 1 to 2 at frame 2.
        tracks.push_back(tr_at(f, f < 2 ? 1 : 2, 1.0 * f, 0.0));
    }
    const MetricsReport report = evaluate(tracks, gt, {});
    CHECK(report.ids == 1);
    CHECK(report.fp == 0);
    CHECK(report.fn == 0);
    CHECK(report.matches == 3);
    CHECK(report.mota_value == doctest::Approx(1.0 - 1.0 / 3.0));
}

TEST_CASE("evaluate separates classes and scenes") {
    std::vector<GroundTruthRecord> gt;
    std::vector<TrackRecord> tracks;
    // Scene s0: one car tracked cleanly. Scene s1: one pedestrian, an identical
    // track id re-used by a different scene must not leak.
    for (int f = 0; f < 4; ++f) {
        gt.push_back(gt_at(f, 1, 1.0 * f, 0.0, classes::kCar, "s0"));
        tracks.push_back(tr_at(f, 9, 1.0 * f, 0.0, classes::kCar, "s0"));
        gt.push_back(gt_at(f, 1, 0.0, 1.0 * f, classes::kPedestrian, "s1"));
        tracks.push_back(tr_at(f, 9, 0.0, 1.0 * f, classes::kPedestrian, "s1"));
    }
    const MetricsReport report = evaluate(tracks, gt, {});
    CHECK(report.gt == 8);
    CHECK(report.matches == 8);
    CHECK(report.ids == 0);
    REQUIRE(report.per_class.size() == 2);
    for (const auto& cm : report.per_class) {
        CHECK(cm.gt == 4);
        CHECK(cm.mota_value == doctest::Approx(1.0));
    }
    // Class mismatch never matches: a car track cannot claim a pedestrian gt.
    const MetricsReport cross =
        evaluate({tr_at(0, 1, 0.0, 0.0, classes::kCar)},
                 {gt_at(0, 1, 0.0, 0.0, classes::kPedestrian)}, {});
    CHECK(cross.matches == 0);
    CHECK(cross.fp == 1);
    CHECK(cross.fn == 1);
}

TEST_CASE("coasted outputs are excluded unless requested") {
    const std::vector<GroundTruthRecord> gt = {gt_at(0, 1, 0.0, 0.0)};
    const std::vector<TrackRecord> tracks = {
        tr_at(0, 5, 0.0, 0.0, classes::kCar, "s0", 0.9, /*coasted=*/true)};

    const MetricsReport without = evaluate(tracks, gt, {});
    CHECK(without.matches == 0);
    CHECK(without.fn == 1);
    CHECK(without.fp == 0);  // the coasted record is invisible, not an FP

    EvalOptions opts;
    opts.include_coasted = true;
    const MetricsReport with = evaluate(tracks, gt, opts);
    CHECK(with.matches == 1);
    CHECK(with.fn == 0);
}

TEST_CASE("class filter restricts the report") {
    const std::vector<GroundTruthRecord> gt = {
        gt_at(0, 1, 0.0, 0.0, classes::kCar),
        gt_at(0, 2, 10.0, 0.0, classes::kPedestrian)};
    const std::vector<TrackRecord> tracks = {
        tr_at(0, 1, 0.0, 0.0, classes::kCar),
        tr_at(0, 2, 10.0, 0.0, classes::kPedestrian)};

    EvalOptions opts;
    opts.class_filter = {classes::kPedestrian};
    const MetricsReport report = evaluate(tracks, gt, opts);
    REQUIRE(report.per_class.size() == 1);
    CHECK(report.per_class[0].class_label == classes::kPedestrian);
    CHECK(report.gt == 1);
}

TEST_CASE("amota sweep: perfect tracking scores 1 at every level") {
    std::vector<GroundTruthRecord> gt;
    std::vector<TrackRecord> tracks;
    for (int f = 0; f < 10; ++f) {
        gt.push_back(gt_at(f, 1, 1.0 * f, 0.0));
        tracks.push_back(tr_at(f, 3, 1.0 * f, 0.0));
    }
    EvalOptions opts;
    opts.recall_levels = 10;
    const MetricsReport report = evaluate(tracks, gt, opts);
    CHECK(report.amota == doctest::Approx(1.0));
    REQUIRE(report.per_class.size() == 1);
    const auto& sweep = report.per_class[0].sweep;
    REQUIRE(static_cast<int>(sweep.size()) == 10);
    for (const auto& level : sweep) {
        CHECK(level.reachable);
        CHECK(level.term == doctest::Approx(1.0));
    }
}

TEST_CASE("amota sweep: unreachable recalls contribute zero") {
    // Only half the gt frames are covered, so recalls above 0.5 cannot be hit.
    std::vector<GroundTruthRecord> gt;
    std::vector<TrackRecord> tracks;
    for (int f = 0; f < 10; ++f) {
        gt.push_back(gt_at(f, 1, 1.0 * f, 0.0));
        if (f < 5) tracks.push_back(tr_at(f, 3, 1.0 * f, 0.0));
    }
    EvalOptions opts;
    opts.recall_levels = 10;
    const MetricsReport report = evaluate(tracks, gt, opts);
    const auto& sweep = report.per_class[0].sweep;
    int unreachable = 0;
    for (const auto& level : sweep) {
        if (!level.reachable) {
            ++unreachable;
            CHECK(level.term == 0.0);
        }
    }
    CHECK(unreachable == 5);  // recalls 0.6 ... 1.0
    // The mean over levels includes the zeros.
    double mean = 0.0;
    for (const auto& level : sweep) mean += level.term;
    mean /= sweep.size();
    CHECK(report.amota == doctest::Approx(mean));
}

TEST_CASE("amota threshold honors the score ordering") {
    // Low-scoring noise tracks hurt only the lenient recall levels; at strict
    // thresholds they are filtered out.
    std::vector<GroundTruthRecord> gt;
    std::vector<TrackRecord> tracks;
    for (int f = 0; f < 8; ++f) {
        gt.push_back(gt_at(f, 1, 1.0 * f, 0.0));
        tracks.push_back(tr_at(f, 3, 1.0 * f, 0.0, classes::kCar, "s0", 0.95));
        tracks.push_back(tr_at(f, 50 + f, 60.0, 60.0, classes::kCar, "s0", 0.2));
    }
    EvalOptions opts;
    opts.recall_levels = 4;
    const MetricsReport report = evaluate(tracks, gt, opts);
    const auto& sweep = report.per_class[0].sweep;
    REQUIRE(sweep.size() == 4);
    // Every level is reachable (the real track scores 0.95 on all frames) and
    // the chosen threshold excludes the 0.2-score noise.
    for (const auto& level : sweep) {
        CHECK(level.reachable);
        CHECK(level.score_threshold > 0.2);
        CHECK(level.fp == 0);
        CHECK(level.term == doctest::Approx(1.0));
    }
    CHECK(report.per_class[0].amota == doctest::Approx(1.0));
    // The base counts, in contrast, see the noise.
    CHECK(report.fp == 8);
}

TEST_CASE("overall amota averages classes with ground truth") {
    // Car tracked perfectly; pedestrian gt exists but is never tracked; a
    // bicycle track has no gt at all and must not enter the average.
    std::vector<GroundTruthRecord> gt;
    std::vector<TrackRecord> tracks;
    for (int f = 0; f < 5; ++f) {
        gt.push_back(gt_at(f, 1, 1.0 * f, 0.0, classes::kCar));
        tracks.push_back(tr_at(f, 3, 1.0 * f, 0.0, classes::kCar));
        gt.push_back(gt_at(f, 2, 30.0, 1.0 * f, classes::kPedestrian));
        tracks.push_back(tr_at(f, 4, 70.0, 70.0, classes::kBicycle));
    }
    const MetricsReport report = evaluate(tracks, gt, {});
    REQUIRE(report.per_class.size() == 3);
    double car_amota = -1.0, ped_amota = -1.0;
    for (const auto& cm : report.per_class) {
        if (cm.class_label == classes::kCar) car_amota = cm.amota;
        if (cm.class_label == classes::kPedestrian) ped_amota = cm.amota;
        if (cm.class_label == classes::kBicycle) CHECK(cm.gt == 0);
    }
    CHECK(report.amota == doctest::Approx(0.5 * (car_amota + ped_amota)));
    CHECK(report.amota == doctest::Approx(0.5 * car_amota));  // ped contributes 0
}

TEST_CASE("evaluate rejects bad options") {
    EvalOptions opts;
    opts.threshold_m = 0.0;
    CHECK_THROWS_AS(evaluate({}, {}, opts), InvalidValueError);
    EvalOptions opts2;
    opts2.recall_levels = 0;
    CHECK_THROWS_AS(evaluate({}, {}, opts2), InvalidValueError);
}

TEST_CASE("format_report prints per-class rows and n/a for empty classes") {
    const std::vector<GroundTruthRecord> gt = {gt_at(0, 1, 0.0, 0.0)};
    const std::vector<TrackRecord> tracks = {
        tr_at(0, 1, 0.0, 0.0), tr_at(0, 2, 50.0, 50.0, classes::kBus)};
    const MetricsReport report = evaluate(tracks, gt, {});
    const std::string text = format_report(report);
    CHECK(text.find("car") != std::string::npos);
    CHECK(text.find("bus") != std::string::npos);
    CHECK(text.find("n/a") != std::string::npos);
    CHECK(text.find("overall") != std::string::npos);
}
