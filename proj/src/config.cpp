#include "wintrack/config.hpp"

#include <cmath>

#include "wintrack/errors.hpp"

namespace wintrack {

TrackerConfig::TrackerConfig() {
    process_noise_diag = Eigen::VectorXd(6);
    process_noise_diag << 0.05, 0.05, 0.05, 0.5, 0.5, 0.5;
    measurement_noise_diag = Eigen::VectorXd(3);
    measurement_noise_diag << 0.09, 0.09, 0.09;
}

double TrackerConfig::velocity_limit_for(const std::string& class_label) const {
    auto it = velocity_limit_mps.find(class_label);
    if (it != velocity_limit_mps.end()) return it->second;
    it = velocity_limit_mps.find("default");
    if (it != velocity_limit_mps.end()) return it->second;
    return 15.0;
}

std::vector<ConfigViolation> validate_config(const TrackerConfig& config) {
    std::vector<ConfigViolation> out;
    auto bad = [&out](const char* field, const std::string& msg) {
        out.push_back({field, msg});
    };

    if (config.window_length_frames < 2)
        bad("window_length_frames", "must be >= 2");
    if (config.dormant_horizon_frames < 0)
        bad("dormant_horizon_frames", "must be >= 0");
    if (config.max_hypotheses_per_root < 1)
        bad("max_hypotheses_per_root", "must be >= 1");
    if (!(config.measurement_volume_m3 > 0.0))
        bad("measurement_volume_m3", "must be > 0");
    if (!(config.detect_prob > 0.0 && config.detect_prob < 1.0))
        bad("detect_prob", "must be in the open interval (0, 1)");
    if (!(config.false_alarm_prob > 0.0 && config.false_alarm_prob < 1.0))
        bad("false_alarm_prob", "must be in the open interval (0, 1)");
    for (const auto& [cls, v] : config.velocity_limit_mps) {
        if (!(v > 0.0)) bad("velocity_limit_mps", "entry '" + cls + "' must be > 0");
    }
    if (!(config.distance_cap_m > 0.0)) bad("distance_cap_m", "must be > 0");
    if (config.init_hits < 1) bad("init_hits", "must be >= 1");
    if (config.delete_misses < 1) bad("delete_misses", "must be >= 1");
    if (!(config.metric_match_threshold_m > 0.0))
        bad("metric_match_threshold_m", "must be > 0");
    if (config.recall_levels < 1) bad("recall_levels", "must be >= 1");
    if (!(config.initial_velocity_sigma_mps > 0.0))
        bad("initial_velocity_sigma_mps", "must be > 0");

    if (config.process_noise_diag.size() != config.state_dim()) {
        bad("process_noise_diag", "must have 6 entries (position + velocity)");
    } else if ((config.process_noise_diag.array() < 0.0).any()) {
        bad("process_noise_diag", "entries must be >= 0");
    }
    const int m = config.meas_dim();
    if (config.measurement_noise_diag.size() != m) {
        bad("measurement_noise_diag",
            "must match the observation mode (" + std::to_string(m) + " entries)");
    } else if (!(config.measurement_noise_diag.array() > 0.0).all()) {
        bad("measurement_noise_diag", "entries must be > 0");
    }
    return out;
}

const char* to_string(ObservationMode mode) {
    return mode == ObservationMode::kPosition ? "position" : "position_velocity";
}

ObservationMode observation_mode_from_string(const std::string& s) {
    if (s == "position") return ObservationMode::kPosition;
    if (s == "position_velocity") return ObservationMode::kPositionVelocity;
    throw InvalidValueError("unknown observation_mode: " + s);
}

}  // namespace wintrack
