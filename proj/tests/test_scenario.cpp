#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "wintrack/errors.hpp"
#include "wintrack/scenario.hpp"

using namespace wintrack;

namespace {

ScenarioSpec base_spec() {
    ScenarioSpec spec;
    spec.seed = 11;
    spec.duration_frames = 20;
    spec.frame_rate_hz = 2.0;
    spec.class_counts = {{"car", 3}, {"pedestrian", 2}};
    spec.position_noise_sigma_m = 0.1;
    spec.region_min = Vec3(0, 0, 0);
    spec.region_max = Vec3(200, 200, 1);
    return spec;
}

}  // namespace

TEST_CASE("counter rng streams are deterministic and well-distributed") {
    CounterRng a(1, 2, 3, 4);
    CounterRng b(1, 2, 3, 4);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

    // Different key components give different streams.
    CounterRng c(1, 2, 3, 5);
    bool differs = false;
    CounterRng a2(1, 2, 3, 4);
    for (int i = 0; i < 10; ++i) {
        if (a2.uniform() != c.uniform()) differs = true;
    }
    CHECK(differs);

    CounterRng u(9, 0, 0, 1);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        sum += v;
        sumsq += v * v;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sumsq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("normal draws hit the requested moments within 5 percent") {
    CounterRng rng(123, 1, 2, 3);
    const double mean = 3.0, sigma = 1.7;
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal(mean, sigma);
        sum += v;
        sumsq += v * v;
    }
    const double m = sum / n;
    const double s = std::sqrt(sumsq / n - m * m);
    CHECK(std::abs(m - mean) < 0.05 * sigma);
    CHECK(std::abs(s - sigma) / sigma < 0.05);
}

TEST_CASE("poisson draws match the rate") {
    CounterRng rng(5, 4, 3, 2);
    const double rate = 2.5;
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = rng.poisson(rate);
        CHECK(k >= 0);
        sum += k;
    }
    CHECK(sum / n == doctest::Approx(rate).epsilon(0.05));
    CounterRng zero(5, 4, 3, 2);
    CHECK(zero.poisson(0.0) == 0);
}

TEST_CASE("generation is a pure function of spec and scene id") {
    const ScenarioSpec spec = base_spec();
    const GeneratedScene a = generate(spec, "sceneA");
    const GeneratedScene b = generate(spec, "sceneA");
    REQUIRE(a.detections.size() == b.detections.size());
    REQUIRE(a.ground_truth.size() == b.ground_truth.size());
    for (std::size_t i = 0; i < a.detections.size(); ++i) {
        CHECK(a.detections[i].position == b.detections[i].position);
        CHECK(a.detections[i].confidence == b.detections[i].confidence);
    }

    // Scene id enters through records only; the draws come from the seed.
    ScenarioSpec other = spec;
    other.seed = 12;
    const GeneratedScene c = generate(other, "sceneA");
    bool differs = a.detections.size() != c.detections.size();
    for (std::size_t i = 0; !differs && i < a.detections.size(); ++i) {
        differs = a.detections[i].position != c.detections[i].position;
    }
    CHECK(differs);
}

TEST_CASE("ground truth covers every object on every frame") {
    const ScenarioSpec spec = base_spec();
    const GeneratedScene scene = generate(spec, "s");
    CHECK(scene.ground_truth.size() ==
          static_cast<std::size_t>(spec.total_objects() * spec.duration_frames));

    std::map<int, std::set<std::int64_t>> ids_per_frame;
    for (const auto& g : scene.ground_truth) {
        CHECK(g.scene_id == "s");
        ids_per_frame[g.frame_index].insert(g.gt_track_id);
        // Objects hold class labels consistent with the enumeration order.
        CHECK(g.gt_track_id >= 0);
        CHECK(g.gt_track_id < spec.total_objects());
    }
    CHECK(static_cast<int>(ids_per_frame.size()) == spec.duration_frames);
    for (const auto& [frame, ids] : ids_per_frame) {
        CHECK(ids.size() == static_cast<std::size_t>(spec.total_objects()));
    }

    // Objects enumerate sorted by class: 3 cars then 2 pedestrians.
    for (const auto& g : scene.ground_truth) {
        if (g.gt_track_id < 3) CHECK(g.class_label == "car");
        else CHECK(g.class_label == "pedestrian");
    }
}

TEST_CASE("noise-free detections sit on the ground truth") {
    ScenarioSpec spec = base_spec();
    spec.position_noise_sigma_m = 0.0;
    const GeneratedScene scene = generate(spec, "s");
    CHECK(scene.detections.size() == scene.ground_truth.size());
    std::map<std::pair<int, int>, const GroundTruthRecord*> gt_index;
    for (const auto& g : scene.ground_truth) {
        gt_index[{g.frame_index, static_cast<int>(g.gt_track_id)}] = &g;
    }
    for (std::size_t i = 0; i < scene.detections.size(); ++i) {
        const Detection& d = scene.detections[i];
        const auto* g = gt_index.at({d.frame_index, static_cast<int>(i) %
                                     spec.total_objects()});
        CHECK((d.position - g->position).norm() < 1e-12);
    }
}

TEST_CASE("position noise sigma is honored within 5 percent") {
    ScenarioSpec spec = base_spec();
    spec.duration_frames = 400;
    spec.class_counts = {{"car", 10}};
    spec.position_noise_sigma_m = 0.3;
    const GeneratedScene scene = generate(spec, "s");

    std::map<std::pair<int, std::int64_t>, const GroundTruthRecord*> gt_index;
    for (const auto& g : scene.ground_truth) gt_index[{g.frame_index, g.gt_track_id}] = &g;

    // Detections are emitted objects-first per frame in object order, so the
    // i-th detection of a frame belongs to object i when nothing drops out.
    double sumsq = 0.0;
    std::size_t n = 0;
    std::map<int, int> index_in_frame;
    for (const auto& d : scene.detections) {
        const int obj = index_in_frame[d.frame_index]++;
        const auto* g = gt_index.at({d.frame_index, obj});
        const Vec3 delta = d.position - g->position;
        for (int axis = 0; axis < 3; ++axis) {
            sumsq += delta(axis) * delta(axis);
            n += 1;
        }
    }
    REQUIRE(n >= 10000);
    const double sigma = std::sqrt(sumsq / n);
    CHECK(std::abs(sigma - 0.3) / 0.3 < 0.05);
}

TEST_CASE("occluded frames produce no detection for that object") {
    ScenarioSpec spec = base_spec();
    spec.class_counts = {{"car", 2}};
    spec.occlusions = {{0, 5, 3}};  // object 0 hidden on frames 5, 6, 7
    const GeneratedScene scene = generate(spec, "s");

    std::map<int, int> det_count;
    for (const auto& d : scene.detections) det_count[d.frame_index] += 1;
    for (int f = 0; f < spec.duration_frames; ++f) {
        const bool occluded = f >= 5 && f < 8;
        CHECK(det_count[f] == (occluded ? 1 : 2));
    }
    // Ground truth still records the hidden object.
    int gt_frames_obj0 = 0;
    for (const auto& g : scene.ground_truth) {
        if (g.gt_track_id == 0) ++gt_frames_obj0;
    }
    CHECK(gt_frames_obj0 == spec.duration_frames);
}

TEST_CASE("dropout removes roughly the configured fraction") {
    ScenarioSpec spec = base_spec();
    spec.duration_frames = 400;
    spec.class_counts = {{"car", 5}};
    spec.dropout_prob = 0.3;
    const GeneratedScene scene = generate(spec, "s");
    const double expected = 400.0 * 5.0 * 0.7;
    CHECK(std::abs(scene.detections.size() - expected) / expected < 0.05);
}

TEST_CASE("clutter count and confidence behave as configured") {
    ScenarioSpec spec = base_spec();
    spec.duration_frames = 300;
    spec.class_counts = {{"car", 1}};
    spec.clutter_rate_per_frame = 2.0;
    spec.position_noise_sigma_m = 0.0;
    const GeneratedScene scene = generate(spec, "s");

    // Everything beyond one true detection per frame is clutter.
    const double clutter = static_cast<double>(scene.detections.size()) -
                           300.0;  // no dropout: the true object always shows
    CHECK(clutter / 300.0 == doctest::Approx(2.0).epsilon(0.1));

    for (const auto& d : scene.detections) {
        CHECK(d.confidence >= 0.05);
        CHECK(d.confidence <= 0.999);
        CHECK(d.validate().empty());
        // Clutter also lands inside the configured region.
        CHECK(d.position.x() >= spec.region_min.x() - 1.0);
        CHECK(d.position.x() <= spec.region_max.x() + 1.0);
    }
}

TEST_CASE("purpose streams are independent: clutter does not shift objects") {
    ScenarioSpec with = base_spec();
    with.clutter_rate_per_frame = 3.0;
    ScenarioSpec without = base_spec();
    without.clutter_rate_per_frame = 0.0;

    const GeneratedScene noisy = generate(with, "s");
    const GeneratedScene clean = generate(without, "s");

    // Same ground truth trajectories.
    REQUIRE(noisy.ground_truth.size() == clean.ground_truth.size());
    for (std::size_t i = 0; i < clean.ground_truth.size(); ++i) {
        CHECK(noisy.ground_truth[i].position == clean.ground_truth[i].position);
    }
    // The object detections (clutter has detection ids after them per frame)
    // keep identical positions and confidences.
    std::map<int, std::vector<const Detection*>> clean_by_frame, noisy_by_frame;
    for (const auto& d : clean.detections) clean_by_frame[d.frame_index].push_back(&d);
    for (const auto& d : noisy.detections) noisy_by_frame[d.frame_index].push_back(&d);
    for (const auto& [frame, dets] : clean_by_frame) {
        const auto& loud = noisy_by_frame.at(frame);
        REQUIRE(loud.size() >= dets.size());
        for (std::size_t i = 0; i < dets.size(); ++i) {
            CHECK(dets[i]->position == loud[i]->position);
            CHECK(dets[i]->confidence == loud[i]->confidence);
        }
    }
}

TEST_CASE("embeddings are unit norm when enabled") {
    ScenarioSpec spec = base_spec();
    spec.embedding_dim = 16;
    const GeneratedScene scene = generate(spec, "s");
    REQUIRE(!scene.detections.empty());
    for (const auto& d : scene.detections) {
        REQUIRE(d.embedding.has_value());
        CHECK(d.embedding->size() == 16);
        CHECK(d.embedding->norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("detection ids are sequential per scene emission order") {
    ScenarioSpec spec = base_spec();
    spec.clutter_rate_per_frame = 1.0;
    const GeneratedScene scene = generate(spec, "s");
    for (std::size_t i = 0; i < scene.detections.size(); ++i) {
        CHECK(scene.detections[i].detection_id == static_cast<std::int64_t>(i));
        if (i > 0) {
            CHECK(scene.detections[i].frame_index >=
                  scene.detections[i - 1].frame_index);
        }
    }
}

TEST_CASE("spec validation catches bad fields") {
    ScenarioSpec spec = base_spec();
    CHECK(spec.validate().empty());

    spec.duration_frames = 0;
    CHECK(!spec.validate().empty());

    spec = base_spec();
    spec.frame_rate_hz = 0.0;
    CHECK(!spec.validate().empty());

    spec = base_spec();
    spec.class_counts = {{"car", -1}};
    CHECK(!spec.validate().empty());

    spec = base_spec();
    spec.region_max = spec.region_min;  // empty volume
    CHECK(!spec.validate().empty());

    spec = base_spec();
    spec.dropout_prob = 1.5;
    CHECK(!spec.validate().empty());

    spec = base_spec();
    spec.occlusions = {{99, 0, 1}};  // object index out of range
    CHECK(!spec.validate().empty());

    spec = base_spec();
    spec.embedding_dim = -1;
    CHECK(!spec.validate().empty());

    spec = base_spec();
    spec.duration_frames = 0;
    CHECK_THROWS_AS(generate(spec, "s"), InvalidValueError);

    // Zero objects is legal: an empty scene, not an error.
    ScenarioSpec empty = base_spec();
    empty.class_counts.clear();
    const GeneratedScene scene = generate(empty, "s");
    CHECK(scene.ground_truth.empty());
    CHECK(scene.detections.empty());
}

TEST_CASE("volume and object count helpers") {
    ScenarioSpec spec = base_spec();
    CHECK(spec.total_objects() == 5);
    CHECK(spec.volume_m3() == doctest::Approx(200.0 * 200.0 * 1.0));
}

TEST_CASE("the occlusion preset is self-consistent") {
    const ScenarioSpec spec = preset_occlusion_benchmark();
    CHECK(spec.validate().empty());
    CHECK(spec.total_objects() == 5);
    CHECK(spec.class_counts.at("pedestrian") == 5);
    CHECK(spec.occlusions.size() == 5);
    for (const auto& occ : spec.occlusions) {
        CHECK(occ.length_frames == 2);
        CHECK(occ.start_frame == 18);
    }
    CHECK(spec.embedding_dim > 0);
    CHECK(spec.spawn_cluster_radius_m > 0.0);
    CHECK(spec.clutter_rate_per_frame > 0.0);

    // Every pedestrian disappears for exactly its occlusion window. Clutter
    // shares the pedestrian label here, so silence it for the count.
    ScenarioSpec no_clutter = spec;
    no_clutter.clutter_rate_per_frame = 0.0;
    const GeneratedScene scene = generate(no_clutter, "occ");
    std::map<int, int> det_count;
    for (const auto& d : scene.detections) det_count[d.frame_index] += 1;
    CHECK(det_count[17] == 5);
    CHECK(det_count[18] == 0);
    CHECK(det_count[19] == 0);
    CHECK(det_count[20] == 5);
}

TEST_CASE("group spawns stay inside the region and apart from each other") {
    const ScenarioSpec spec = preset_occlusion_benchmark();
    const GeneratedScene scene = generate(spec, "occ");
    std::vector<Vec3> first_frame;
    for (const auto& g : scene.ground_truth) {
        if (g.frame_index == 0) first_frame.push_back(g.position);
    }
    REQUIRE(first_frame.size() == 5);
    for (std::size_t i = 0; i < first_frame.size(); ++i) {
        for (std::size_t j = i + 1; j < first_frame.size(); ++j) {
            CHECK((first_frame[i] - first_frame[j]).norm() > 1.0);
        }
    }
}
