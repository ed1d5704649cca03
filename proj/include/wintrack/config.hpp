#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

namespace wintrack {

/// Which measurement vector the Kalman filter consumes.
enum class ObservationMode {
    kPosition,          // y = [x y z]
    kPositionVelocity,  // y = [x y z vx vy vz]; falls back to position when a
                        // detection carries no velocity
};

/// Everything that parameterizes a tracking run. Serialized as a flat JSON
/// document with units spelled out in the key names.
struct TrackerConfig {
    int window_length_frames = 4;       // T: window spans frames [k-T, k]
    int dormant_horizon_frames = 0;     // T_old: extra frames dormant anchors survive
    int max_hypotheses_per_root = 200;  // M

    // Process noise intensity per second; prediction uses Q * dt.
    Eigen::VectorXd process_noise_diag;
    // Measurement noise variance, position (3) or position+velocity (6).
    Eigen::VectorXd measurement_noise_diag;

    double measurement_volume_m3 = 1.0e4;  // V in the clutter likelihood
    double detect_prob = 0.9;              // P_D
    double false_alarm_prob = 0.1;         // P_FA

    // Class -> 99.9th percentile speed. "default" is the fallback entry.
    std::map<std::string, double> velocity_limit_mps = {
        {"default", 15.0}, {"car", 30.0},        {"truck", 25.0},
        {"bus", 25.0},     {"trailer", 25.0},    {"pedestrian", 4.0},
        {"motorcycle", 30.0}, {"bicycle", 10.0},
    };
    double distance_cap_m = 30.0;  // upper bound on v_lim * dt

    int init_hits = 2;
    int delete_misses = 4;
    double metric_match_threshold_m = 2.0;
    int recall_levels = 40;  // L in the AMOTA sweep

    ObservationMode observation_mode = ObservationMode::kPosition;
    double initial_velocity_sigma_mps = 10.0;  // prior spread when velocity unmeasured

    TrackerConfig();

    double velocity_limit_for(const std::string& class_label) const;
    int state_dim() const { return 6; }
    int meas_dim() const {
        return observation_mode == ObservationMode::kPosition ? 3 : 6;
    }
};

struct ConfigViolation {
    std::string field;
    std::string message;
};

/// Checks every config invariant and returns the complete list of violations
/// (empty means the config is usable as-is).
std::vector<ConfigViolation> validate_config(const TrackerConfig& config);

const char* to_string(ObservationMode mode);
ObservationMode observation_mode_from_string(const std::string& s);

}  // namespace wintrack
