#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "wintrack/config.hpp"
#include "wintrack/errors.hpp"

using namespace wintrack;

namespace {

bool flags(const std::vector<ConfigViolation>& v, const std::string& field) {
    return std::any_of(v.begin(), v.end(),
                       [&](const ConfigViolation& c) { return c.field == field; });
}

}  // namespace

TEST_CASE("defaults validate cleanly") {
    CHECK(validate_config(TrackerConfig{}).empty());
}

TEST_CASE("each scalar invariant is flagged by field name") {
    TrackerConfig c;
    c.window_length_frames = 1;
    c.dormant_horizon_frames = -1;
    c.max_hypotheses_per_root = 0;
    c.measurement_volume_m3 = 0.0;
    c.detect_prob = 1.0;
    c.false_alarm_prob = 0.0;
    c.distance_cap_m = -1.0;
    c.init_hits = 0;
    c.delete_misses = 0;
    c.metric_match_threshold_m = 0.0;
    c.recall_levels = 0;
    c.initial_velocity_sigma_mps = 0.0;

    const auto v = validate_config(c);
    CHECK(flags(v, "window_length_frames"));
    CHECK(flags(v, "dormant_horizon_frames"));
    CHECK(flags(v, "max_hypotheses_per_root"));
    CHECK(flags(v, "measurement_volume_m3"));
    CHECK(flags(v, "detect_prob"));
    CHECK(flags(v, "false_alarm_prob"));
    CHECK(flags(v, "distance_cap_m"));
    CHECK(flags(v, "init_hits"));
    CHECK(flags(v, "delete_misses"));
    CHECK(flags(v, "metric_match_threshold_m"));
    CHECK(flags(v, "recall_levels"));
    CHECK(flags(v, "initial_velocity_sigma_mps"));
    // The list is complete, not first-error-only.
    CHECK(v.size() >= 12);
}

TEST_CASE("noise vector shapes follow the observation mode") {
    TrackerConfig c;
    c.process_noise_diag = Eigen::VectorXd::Ones(5);
    CHECK(flags(validate_config(c), "process_noise_diag"));

    c = TrackerConfig{};
    c.process_noise_diag(2) = -0.1;
    CHECK(flags(validate_config(c), "process_noise_diag"));

    c = TrackerConfig{};
    c.observation_mode = ObservationMode::kPositionVelocity;
    CHECK(c.meas_dim() == 6);
    CHECK(flags(validate_config(c), "measurement_noise_diag"));  // still sized 3

    c.measurement_noise_diag = Eigen::VectorXd::Constant(6, 0.09);
    CHECK(validate_config(c).empty());

    c.measurement_noise_diag(0) = 0.0;  // measurement noise must be strictly positive
    CHECK(flags(validate_config(c), "measurement_noise_diag"));
}

TEST_CASE("velocity limits must be positive and fall back to default") {
    TrackerConfig c;
    c.velocity_limit_mps["pedestrian"] = 0.0;
    CHECK(flags(validate_config(c), "velocity_limit_mps"));

    c = TrackerConfig{};
    CHECK(c.velocity_limit_for("pedestrian") == doctest::Approx(4.0));
    CHECK(c.velocity_limit_for("unheard_of_class") == doctest::Approx(15.0));
    c.velocity_limit_mps.erase("default");
    CHECK(c.velocity_limit_for("unheard_of_class") == doctest::Approx(15.0));
    c.velocity_limit_mps["default"] = 9.0;
    CHECK(c.velocity_limit_for("unheard_of_class") == doctest::Approx(9.0));
}

TEST_CASE("observation mode round-trips through strings") {
    CHECK(observation_mode_from_string(to_string(ObservationMode::kPosition)) ==
          ObservationMode::kPosition);
    CHECK(observation_mode_from_string(to_string(ObservationMode::kPositionVelocity)) ==
          ObservationMode::kPositionVelocity);
    CHECK_THROWS_AS(observation_mode_from_string("velocity"), InvalidValueError);
}

TEST_CASE("state and measurement dimensions") {
    TrackerConfig c;
    CHECK(c.state_dim() == 6);
    CHECK(c.meas_dim() == 3);
    c.observation_mode = ObservationMode::kPositionVelocity;
    CHECK(c.meas_dim() == 6);
}
