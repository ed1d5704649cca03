#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wintrack/metrics.hpp"
#include "wintrack/types.hpp"

namespace wintrack {

/// Counter-based pseudorandom stream keyed by (seed, frame, object, purpose).
/// Streams are independent: adding draws to one purpose never shifts another,
/// so e.g. raising the clutter rate leaves object noise untouched.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t frame, std::uint64_t object,
               std::uint64_t purpose);

    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();                       // standard normal (Box-Muller)
    double normal(double mean, double sigma);
    int poisson(double rate);              // exponential inversion

private:
    std::uint64_t next_raw();

    std::uint64_t key_ = 0;
    std::uint64_t draw_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct OcclusionInterval {
    int object_index = 0;  // index into the scene's object enumeration
    int start_frame = 0;
    int length_frames = 1;
};

/// Full description of one synthetic scene family. The seed pins every draw;
/// generate() is a pure function of this struct plus the scene id.
struct ScenarioSpec {
    std::uint64_t seed = 1;
    int duration_frames = 40;
    double frame_rate_hz = 2.0;

    std::map<std::string, int> class_counts;  // objects per class label

    // When > 0, objects spawn on a ring of this radius around a common point
    // and move as a group (shared heading, near-equal speeds); otherwise
    // spawns are uniform over the region interior with independent headings.
    double spawn_cluster_radius_m = 0.0;

    // Optional piecewise-constant-velocity turns: every `turn_every_frames`
    // frames each object's heading rotates by `turn_angle_rad` (0 = straight).
    int turn_every_frames = 0;
    double turn_angle_rad = 0.0;

    double position_noise_sigma_m = 0.1;
    double dropout_prob = 0.0;
    double clutter_rate_per_frame = 0.0;

    // Axis-aligned volume clutter is uniform over; its product of extents is
    // the measurement volume V the tracker's clutter likelihood should use.
    Vec3 region_min = Vec3(0.0, 0.0, 0.0);
    Vec3 region_max = Vec3(100.0, 100.0, 1.0);

    std::vector<OcclusionInterval> occlusions;

    int embedding_dim = 0;  // 0 = detections carry no embedding
    double embedding_angle_sigma_rad = 0.1;

    // Confidence draws, clamped into [0.05, 0.999].
    double true_confidence_mean = 0.85;
    double true_confidence_sigma = 0.08;
    double clutter_confidence_mean = 0.3;
    double clutter_confidence_sigma = 0.1;

    bool emit_velocity = false;  // detections carry the true velocity

    int total_objects() const;
    double volume_m3() const;

    /// All invariant violations, field: message. Empty = valid.
    std::vector<std::string> validate() const;
};

struct GeneratedScene {
    std::vector<GroundTruthRecord> ground_truth;
    std::vector<Detection> detections;
};

/// Deterministically generates one scene. Objects are enumerated in sorted
/// class-label order and become gt_track_id 0..N-1; detection ids are
/// sequential in emission order (objects first, then clutter, per frame).
/// Throws InvalidValueError when the spec fails validate().
GeneratedScene generate(const ScenarioSpec& spec, const std::string& scene_id);

/// Canonical occlusion benchmark: a tight group of 5 pedestrians, every one
/// occluded for the same 2 frames mid-scene, light clutter, embeddings on.
ScenarioSpec preset_occlusion_benchmark();

}  // namespace wintrack
