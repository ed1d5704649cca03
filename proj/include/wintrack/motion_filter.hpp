#pragma once

#include <Eigen/Core>

#include "wintrack/config.hpp"
#include "wintrack/types.hpp"

namespace wintrack {

/// Result of a Kalman update: posterior belief plus the innovation and its
/// covariance, which the kinematic score term consumes.
struct UpdateResult {
    GaussianBelief posterior;
    Eigen::VectorXd innovation;
    Eigen::MatrixXd innovation_cov;  // S = C * P_pred * C' + R
};

/// Constant-velocity linear-Gaussian model over [position, velocity] in 3D.
/// Yaw and box size are deliberately outside the filter: yaw follows the
/// latest detection and sizes are averaged by the track manager.
class FilterModel {
public:
    explicit FilterModel(const TrackerConfig& config);

    int state_dim() const { return 6; }

    /// mean' = A(dt) mean,  cov' = A cov A' + Q * dt.  Requires dt > 0.
    GaussianBelief predict(const GaussianBelief& belief, double dt) const;

    /// Standard Kalman update in Joseph form; the covariance is symmetrized
    /// afterwards. Throws NumericalDegeneracyError when S is singular or its
    /// estimated condition number exceeds 1e12.
    UpdateResult update(const GaussianBelief& belief,
                        const Eigen::VectorXd& measurement) const;

    /// Measurement vector for a detection under the configured observation
    /// mode. Detections without velocity always measure position only.
    Eigen::VectorXd measurement_from(const Detection& det) const;

    /// Prior belief seeded from a first detection: measured states take the
    /// measurement noise, unmeasured velocity takes the configured prior sigma.
    GaussianBelief initial_belief(const Detection& det) const;

    Eigen::MatrixXd transition(double dt) const;
    Eigen::MatrixXd observation(int meas_dim) const;

private:
    Eigen::VectorXd process_noise_diag_;
    Eigen::VectorXd meas_noise_diag_;  // sized 3 or 6 per observation mode
    ObservationMode mode_;
    double initial_velocity_sigma_;
};

/// innovation' * S^-1 * innovation. Throws NumericalDegeneracyError when S is
/// not positive definite.
double mahalanobis_sq(const Eigen::VectorXd& innovation,
                      const Eigen::MatrixXd& innovation_cov);

}  // namespace wintrack
