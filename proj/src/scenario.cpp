#include "wintrack/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wintrack/errors.hpp"

namespace wintrack {

namespace {

// splitmix64 finalizer; the standard constants give full avalanche.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace purpose {
constexpr std::uint64_t kSpawn = 1;
constexpr std::uint64_t kSize = 2;
constexpr std::uint64_t kLatent = 3;
constexpr std::uint64_t kNoise = 4;
constexpr std::uint64_t kDropout = 5;
constexpr std::uint64_t kConfidence = 6;
constexpr std::uint64_t kEmbedding = 7;
constexpr std::uint64_t kClutterCount = 8;
constexpr std::uint64_t kClutterPos = 9;
constexpr std::uint64_t kClutterClass = 10;
constexpr std::uint64_t kClutterConf = 11;
constexpr std::uint64_t kClutterEmb = 12;
}  // namespace purpose

// Object index reserved for draws that belong to the whole scene (the group
// spawn point) rather than any one object.
constexpr std::uint64_t kSceneObject = 0xffffffffULL;

struct ClassProfile {
    double speed_lo, speed_hi;  // m/s
    Vec3 base_size;             // (l, w, h) meters
};

ClassProfile profile_for(const std::string& label) {
    if (label == classes::kCar) return {5.0, 14.0, {4.5, 1.9, 1.6}};
    if (label == classes::kTruck) return {4.0, 10.0, {7.5, 2.5, 3.0}};
    if (label == classes::kBus) return {4.0, 10.0, {11.0, 2.9, 3.2}};
    if (label == classes::kTrailer) return {3.0, 8.0, {10.0, 2.6, 3.5}};
    if (label == classes::kPedestrian) return {0.7, 1.8, {0.7, 0.7, 1.7}};
    if (label == classes::kMotorcycle) return {5.0, 14.0, {2.1, 0.8, 1.4}};
    if (label == classes::kBicycle) return {2.0, 7.0, {1.7, 0.6, 1.3}};
    return {1.0, 10.0, {2.0, 2.0, 2.0}};
}

struct SimObject {
    std::string class_label;
    Vec3 position = Vec3::Zero();
    double heading = 0.0;
    double speed = 0.0;
    Vec3 size = Vec3::Ones();
    Eigen::VectorXd latent;  // unit appearance vector, empty when dim = 0
};

Vec3 heading_velocity(double heading, double speed) {
    return Vec3(speed * std::cos(heading), speed * std::sin(heading), 0.0);
}

/// Rotates a unit vector by an angle drawn from N(0, sigma) toward a random
/// direction orthogonal to it, so consecutive-frame cosines concentrate near 1.
Eigen::VectorXd perturb_unit(const Eigen::VectorXd& unit, double angle_sigma,
                             CounterRng& rng) {
    const double angle = rng.normal(0.0, angle_sigma);
    Eigen::VectorXd ortho(unit.size());
    for (Eigen::Index i = 0; i < ortho.size(); ++i) ortho[i] = rng.normal();
    ortho -= ortho.dot(unit) * unit;
    const double norm = ortho.norm();
    if (norm < 1e-12) return unit;  // degenerate draw; keep the latent as-is
    ortho /= norm;
    Eigen::VectorXd out = std::cos(angle) * unit + std::sin(angle) * ortho;
    out.normalize();
    return out;
}

Eigen::VectorXd sphere_uniform(int dim, CounterRng& rng) {
    Eigen::VectorXd v(dim);
    while (true) {
        for (int i = 0; i < dim; ++i) v[i] = rng.normal();
        const double norm = v.norm();
        if (norm > 1e-12) return v / norm;
    }
}

double clamp_confidence(double c) { return std::clamp(c, 0.05, 0.999); }

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t frame, std::uint64_t object,
                       std::uint64_t purpose) {
    key_ = mix64(mix64(mix64(mix64(seed) ^ frame) ^ object) ^ purpose);
}

std::uint64_t CounterRng::next_raw() {
    draw_ += 1;
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * draw_);
}

double CounterRng::uniform() {
    // 53 random mantissa bits -> [0, 1) with full double resolution.
    return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 nudged away from zero so the log is finite.
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(theta);
    has_spare_ = true;
    return radius * std::cos(theta);
}

double CounterRng::normal(double mean, double sigma) { return mean + sigma * normal(); }

int CounterRng::poisson(double rate) {
    if (rate <= 0.0) return 0;
    // Multiplicative inversion; fine for the modest per-frame rates used here.
    const double limit = std::exp(-rate);
    double product = 1.0;
    int count = -1;
    do {
        product *= uniform();
        count += 1;
    } while (product > limit);
    return count;
}

int ScenarioSpec::total_objects() const {
    int total = 0;
    for (const auto& [label, count] : class_counts) total += count;
    return total;
}

double ScenarioSpec::volume_m3() const {
    const Vec3 extent = region_max - region_min;
    return extent.x() * extent.y() * extent.z();
}

std::vector<std::string> ScenarioSpec::validate() const {
    std::vector<std::string> problems;
    const auto complain = [&problems](const std::string& field, const std::string& msg) {
        problems.push_back(field + ": " + msg);
    };
    if (duration_frames < 1) complain("duration_frames", "must be >= 1");
    if (!(frame_rate_hz > 0.0)) complain("frame_rate_hz", "must be > 0");
    for (const auto& [label, count] : class_counts) {
        if (count < 0) complain("class_counts[" + label + "]", "must be >= 0");
    }
    if (spawn_cluster_radius_m < 0.0) complain("spawn_cluster_radius_m", "must be >= 0");
    if (turn_every_frames < 0) complain("turn_every_frames", "must be >= 0");
    if (!(position_noise_sigma_m >= 0.0)) complain("position_noise_sigma_m", "must be >= 0");
    if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0)) {
        complain("dropout_prob", "must be in [0, 1]");
    }
    if (!(clutter_rate_per_frame >= 0.0)) complain("clutter_rate_per_frame", "must be >= 0");
    for (int axis = 0; axis < 3; ++axis) {
        if (!(region_max[axis] > region_min[axis])) {
            complain("region", "region_max must exceed region_min on every axis");
            break;
        }
    }
    const int objects = total_objects();
    for (std::size_t i = 0; i < occlusions.size(); ++i) {
        const OcclusionInterval& occ = occlusions[i];
        std::ostringstream field;
        field << "occlusions[" << i << "]";
        if (occ.object_index < 0 || occ.object_index >= objects) {
            complain(field.str(), "object_index out of range");
        }
        if (occ.start_frame < 0) complain(field.str(), "start_frame must be >= 0");
        if (occ.length_frames < 1) complain(field.str(), "length_frames must be >= 1");
    }
    if (embedding_dim < 0) complain("embedding_dim", "must be >= 0");
    if (embedding_dim == 1) complain("embedding_dim", "needs >= 2 dims to perturb on a sphere");
    if (!(embedding_angle_sigma_rad >= 0.0)) {
        complain("embedding_angle_sigma_rad", "must be >= 0");
    }
    if (!(true_confidence_sigma >= 0.0)) complain("true_confidence_sigma", "must be >= 0");
    if (!(clutter_confidence_sigma >= 0.0)) complain("clutter_confidence_sigma", "must be >= 0");
    return problems;
}

GeneratedScene generate(const ScenarioSpec& spec, const std::string& scene_id) {
    const std::vector<std::string> problems = spec.validate();
    if (!problems.empty()) {
        throw InvalidValueError("generate: invalid scenario spec: " + problems.front());
    }

    const double dt = 1.0 / spec.frame_rate_hz;
    const Vec3 extent = spec.region_max - spec.region_min;
    // Spawn inside a 10% margin so straight-line motion rarely hits the walls.
    const Vec3 margin = 0.1 * extent;
    const double mid_z = 0.5 * (spec.region_min.z() + spec.region_max.z());

    // --- Initial object states ------------------------------------------------
    // Cluster spawns place the objects on a ring around a common center with a
    // shared heading and near-equal speeds: a group that moves together and
    // never starts with two objects on top of each other.
    std::vector<SimObject> objects;
    objects.reserve(static_cast<std::size_t>(spec.total_objects()));
    const int total = spec.total_objects();
    Vec3 group_center = Vec3::Zero();
    double group_heading = 0.0;
    double ring_phase = 0.0;
    double group_speed_frac = 0.5;
    if (spec.spawn_cluster_radius_m > 0.0) {
        CounterRng rng(spec.seed, 0, kSceneObject, purpose::kSpawn);
        group_center.x() = rng.uniform(spec.region_min.x() + margin.x(),
                                       spec.region_max.x() - margin.x());
        group_center.y() = rng.uniform(spec.region_min.y() + margin.y(),
                                       spec.region_max.y() - margin.y());
        group_center.z() = mid_z;
        group_heading = rng.uniform(-M_PI, M_PI);
        ring_phase = rng.uniform(-M_PI, M_PI);
        group_speed_frac = rng.uniform();
    }
    std::uint64_t object_index = 0;
    for (const auto& [label, count] : spec.class_counts) {
        const ClassProfile profile = profile_for(label);
        for (int n = 0; n < count; ++n, ++object_index) {
            SimObject obj;
            obj.class_label = label;
            CounterRng spawn(spec.seed, 0, object_index, purpose::kSpawn);
            if (spec.spawn_cluster_radius_m > 0.0) {
                const double angle =
                    ring_phase + 2.0 * M_PI * static_cast<double>(object_index) /
                                     static_cast<double>(std::max(total, 1));
                const double radius = spec.spawn_cluster_radius_m * spawn.uniform(0.9, 1.1);
                obj.position = group_center +
                               Vec3(radius * std::cos(angle), radius * std::sin(angle), 0.0);
                obj.heading = normalize_yaw(group_heading + spawn.normal(0.0, 0.03));
                const double frac =
                    std::clamp(group_speed_frac + 0.08 * (spawn.uniform() - 0.5), 0.0, 1.0);
                obj.speed = profile.speed_lo + (profile.speed_hi - profile.speed_lo) * frac;
            } else {
                obj.position.x() = spawn.uniform(spec.region_min.x() + margin.x(),
                                                 spec.region_max.x() - margin.x());
                obj.position.y() = spawn.uniform(spec.region_min.y() + margin.y(),
                                                 spec.region_max.y() - margin.y());
                obj.position.z() = mid_z;
                obj.heading = spawn.uniform(-M_PI, M_PI);
                obj.speed = spawn.uniform(profile.speed_lo, profile.speed_hi);
            }
            CounterRng size_rng(spec.seed, 0, object_index, purpose::kSize);
            obj.size = profile.base_size * size_rng.uniform(0.9, 1.1);
            if (spec.embedding_dim > 0) {
                CounterRng latent(spec.seed, 0, object_index, purpose::kLatent);
                obj.latent = sphere_uniform(spec.embedding_dim, latent);
            }
            objects.push_back(std::move(obj));
        }
    }

    const auto occluded_at = [&spec](int object, int frame) {
        for (const OcclusionInterval& occ : spec.occlusions) {
            if (occ.object_index == object && frame >= occ.start_frame &&
                frame < occ.start_frame + occ.length_frames) {
                return true;
            }
        }
        return false;
    };

    // --- Frame loop -----------------------------------------------------------
    GeneratedScene scene;
    std::int64_t next_detection_id = 0;
    for (int frame = 0; frame < spec.duration_frames; ++frame) {
        const double timestamp = static_cast<double>(frame) / spec.frame_rate_hz;

        for (std::size_t i = 0; i < objects.size(); ++i) {
            SimObject& obj = objects[i];
            GroundTruthRecord gt;
            gt.scene_id = scene_id;
            gt.frame_index = frame;
            gt.timestamp = timestamp;
            gt.gt_track_id = static_cast<std::int64_t>(i);
            gt.class_label = obj.class_label;
            gt.position = obj.position;
            gt.yaw = obj.heading;
            gt.size = obj.size;
            scene.ground_truth.push_back(gt);

            const bool skip =
                occluded_at(static_cast<int>(i), frame) ||
                (spec.dropout_prob > 0.0 &&
                 CounterRng(spec.seed, static_cast<std::uint64_t>(frame), i,
                            purpose::kDropout)
                         .uniform() < spec.dropout_prob);
            if (!skip) {
                Detection det;
                det.detection_id = next_detection_id++;
                det.frame_index = frame;
                det.timestamp = timestamp;
                det.class_label = obj.class_label;
                CounterRng noise(spec.seed, static_cast<std::uint64_t>(frame), i,
                                 purpose::kNoise);
                det.position = obj.position;
                for (int axis = 0; axis < 3; ++axis) {
                    det.position[axis] += noise.normal(0.0, spec.position_noise_sigma_m);
                }
                det.yaw = obj.heading;
                det.size = obj.size;
                if (spec.emit_velocity) {
                    det.velocity = heading_velocity(obj.heading, obj.speed);
                }
                CounterRng conf(spec.seed, static_cast<std::uint64_t>(frame), i,
                                purpose::kConfidence);
                det.confidence = clamp_confidence(
                    conf.normal(spec.true_confidence_mean, spec.true_confidence_sigma));
                if (spec.embedding_dim > 0) {
                    CounterRng emb(spec.seed, static_cast<std::uint64_t>(frame), i,
                                   purpose::kEmbedding);
                    det.embedding =
                        perturb_unit(obj.latent, spec.embedding_angle_sigma_rad, emb);
                }
                scene.detections.push_back(std::move(det));
            }

            // Advance to the next frame's true state.
            if (spec.turn_every_frames > 0 && (frame + 1) % spec.turn_every_frames == 0) {
                obj.heading = normalize_yaw(obj.heading + spec.turn_angle_rad);
            }
            Vec3 next = obj.position + dt * heading_velocity(obj.heading, obj.speed);
            // Bounce off the region walls so long scenes stay inside V.
            if (next.x() < spec.region_min.x() || next.x() > spec.region_max.x()) {
                obj.heading = normalize_yaw(M_PI - obj.heading);
                next = obj.position + dt * heading_velocity(obj.heading, obj.speed);
            }
            if (next.y() < spec.region_min.y() || next.y() > spec.region_max.y()) {
                obj.heading = normalize_yaw(-obj.heading);
                next = obj.position + dt * heading_velocity(obj.heading, obj.speed);
            }
            obj.position = next;
        }

        // Clutter, appended after the true detections of the frame.
        std::vector<std::string> labels;
        for (const auto& [label, count] : spec.class_counts) {
            if (count > 0) labels.push_back(label);
        }
        if (labels.empty()) labels.push_back(classes::kCar);
        const int clutter_count =
            CounterRng(spec.seed, static_cast<std::uint64_t>(frame), kSceneObject,
                       purpose::kClutterCount)
                .poisson(spec.clutter_rate_per_frame);
        for (int j = 0; j < clutter_count; ++j) {
            Detection det;
            det.detection_id = next_detection_id++;
            det.frame_index = frame;
            det.timestamp = timestamp;
            CounterRng pos(spec.seed, static_cast<std::uint64_t>(frame),
                           static_cast<std::uint64_t>(j), purpose::kClutterPos);
            for (int axis = 0; axis < 3; ++axis) {
                det.position[axis] = pos.uniform(spec.region_min[axis], spec.region_max[axis]);
            }
            det.yaw = pos.uniform(-M_PI, M_PI);
            CounterRng cls(spec.seed, static_cast<std::uint64_t>(frame),
                           static_cast<std::uint64_t>(j), purpose::kClutterClass);
            det.class_label = labels[static_cast<std::size_t>(
                std::min<double>(cls.uniform() * static_cast<double>(labels.size()),
                                 static_cast<double>(labels.size() - 1)))];
            det.size = profile_for(det.class_label).base_size;
            CounterRng conf(spec.seed, static_cast<std::uint64_t>(frame),
                            static_cast<std::uint64_t>(j), purpose::kClutterConf);
            det.confidence = clamp_confidence(
                conf.normal(spec.clutter_confidence_mean, spec.clutter_confidence_sigma));
            if (spec.embedding_dim > 0) {
                CounterRng emb(spec.seed, static_cast<std::uint64_t>(frame),
                               static_cast<std::uint64_t>(j), purpose::kClutterEmb);
                det.embedding = sphere_uniform(spec.embedding_dim, emb);
            }
            scene.detections.push_back(std::move(det));
        }
    }
    return scene;
}

ScenarioSpec preset_occlusion_benchmark() {
    ScenarioSpec spec;
    spec.seed = 7;
    spec.duration_frames = 40;
    spec.frame_rate_hz = 2.0;
    spec.class_counts = {{classes::kPedestrian, 5}};
    spec.spawn_cluster_radius_m = 3.0;
    spec.position_noise_sigma_m = 0.1;
    spec.dropout_prob = 0.0;
    spec.clutter_rate_per_frame = 1.0;
    spec.region_min = Vec3(0.0, 0.0, 0.0);
    spec.region_max = Vec3(100.0, 100.0, 1.0);
    for (int object = 0; object < 5; ++object) {
        spec.occlusions.push_back({object, 18, 2});
    }
    spec.embedding_dim = 16;
    spec.embedding_angle_sigma_rad = 0.1;
    return spec;
}

}  // namespace wintrack
