#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wintrack/errors.hpp"

namespace wintrack {

using Vec3 = Eigen::Vector3d;

// Common class labels. The label set is open: any string is accepted, these
// constants just keep spelling consistent across the simulator and tests.
namespace classes {
inline constexpr const char* kCar = "car";
inline constexpr const char* kTruck = "truck";
inline constexpr const char* kBus = "bus";
inline constexpr const char* kTrailer = "trailer";
inline constexpr const char* kPedestrian = "pedestrian";
inline constexpr const char* kMotorcycle = "motorcycle";
inline constexpr const char* kBicycle = "bicycle";
}  // namespace classes

/// Wraps an angle into (-pi, pi]. Idempotent. Throws InvalidValueError on
/// non-finite input.
double normalize_yaw(double angle);

/// One detector observation: oriented 3D box plus confidence and an optional
/// appearance embedding (unit norm when present).
struct Detection {
    std::int64_t detection_id = -1;   // unique within a scene (assigned at load)
    int frame_index = 0;
    double timestamp = 0.0;           // seconds, strictly increasing with frame_index
    std::string class_label;
    Vec3 position = Vec3::Zero();     // meters, global frame
    double yaw = 0.0;                 // radians in (-pi, pi]
    Vec3 size = Vec3::Ones();         // (l, w, h), meters, all > 0
    std::optional<Vec3> velocity;     // m/s, present when the detector regresses it
    double confidence = 1.0;          // in (0, 1]
    std::optional<Eigen::VectorXd> embedding;  // unit norm

    /// Returns human-readable invariant violations, empty when valid.
    std::vector<std::string> validate() const;
};

/// Tracked-object state as published in the output: filtered kinematics plus
/// the smoothed box.
struct ObjectState {
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;
    Vec3 velocity = Vec3::Zero();
    Vec3 size = Vec3::Ones();
};

/// Gaussian belief over the filtered sub-state (position + velocity).
struct GaussianBelief {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    /// Symmetry within 1e-9 and eigenvalues >= -1e-9.
    bool is_valid() const;
};

}  // namespace wintrack
