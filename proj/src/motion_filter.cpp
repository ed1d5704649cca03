#include "wintrack/motion_filter.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "wintrack/errors.hpp"

namespace wintrack {

namespace {

// Cholesky factor of S, shared by the update, the Mahalanobis distance and the
// degeneracy check. The diagonal ratio of L is a cheap condition estimate that
// is exact for diagonal S.
Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& s) {
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) {
        throw NumericalDegeneracyError("innovation covariance is not positive definite");
    }
    const auto diag = llt.matrixLLT().diagonal();
    const double dmax = diag.maxCoeff();
    const double dmin = diag.minCoeff();
    if (!(dmin > 0.0) || (dmax / dmin) * (dmax / dmin) > 1e12) {
        throw NumericalDegeneracyError("innovation covariance condition number exceeds 1e12");
    }
    return llt;
}

}  // namespace

FilterModel::FilterModel(const TrackerConfig& config)
    : process_noise_diag_(config.process_noise_diag),
      meas_noise_diag_(config.measurement_noise_diag),
      mode_(config.observation_mode),
      initial_velocity_sigma_(config.initial_velocity_sigma_mps) {}

Eigen::MatrixXd FilterModel::transition(double dt) const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(6, 6);
    a.block<3, 3>(0, 3) = dt * Eigen::Matrix3d::Identity();
    return a;
}

Eigen::MatrixXd FilterModel::observation(int meas_dim) const {
    return Eigen::MatrixXd::Identity(meas_dim, 6);
}

GaussianBelief FilterModel::predict(const GaussianBelief& belief, double dt) const {
    if (!(dt > 0.0)) {
        throw InvalidValueError("predict: dt must be > 0");
    }
    const Eigen::MatrixXd a = transition(dt);
    GaussianBelief out;
    out.mean = a * belief.mean;
    out.covariance = a * belief.covariance * a.transpose();
    out.covariance.diagonal() += dt * process_noise_diag_;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose().eval());
    return out;
}

UpdateResult FilterModel::update(const GaussianBelief& belief,
                                 const Eigen::VectorXd& measurement) const {
    const int m = static_cast<int>(measurement.size());
    const Eigen::MatrixXd c = observation(m);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        // Position-only fallback reuses the leading entries of the noise diag.
        r(i, i) = meas_noise_diag_(std::min<int>(i, meas_noise_diag_.size() - 1));
    }

    UpdateResult res;
    res.innovation = measurement - c * belief.mean;
    res.innovation_cov = c * belief.covariance * c.transpose() + r;

    const auto llt = checked_llt(res.innovation_cov);
    // K = P C' S^-1 via solving S K' = C P
    const Eigen::MatrixXd k = llt.solve(c * belief.covariance).transpose();

    res.posterior.mean = belief.mean + k * res.innovation;
    const Eigen::MatrixXd ikc = Eigen::MatrixXd::Identity(6, 6) - k * c;
    // Joseph form keeps the covariance PSD under roundoff.
    res.posterior.covariance =
        ikc * belief.covariance * ikc.transpose() + k * r * k.transpose();
    res.posterior.covariance =
        0.5 * (res.posterior.covariance + res.posterior.covariance.transpose().eval());
    return res;
}

Eigen::VectorXd FilterModel::measurement_from(const Detection& det) const {
    if (mode_ == ObservationMode::kPositionVelocity && det.velocity) {
        Eigen::VectorXd y(6);
        y << det.position, *det.velocity;
        return y;
    }
    return det.position;
}

GaussianBelief FilterModel::initial_belief(const Detection& det) const {
    GaussianBelief b;
    b.mean = Eigen::VectorXd::Zero(6);
    b.mean.head<3>() = det.position;
    Eigen::VectorXd var(6);
    for (int i = 0; i < 3; ++i) var(i) = meas_noise_diag_(i);
    const bool measured_velocity =
        mode_ == ObservationMode::kPositionVelocity && det.velocity.has_value();
    for (int i = 3; i < 6; ++i) {
        if (measured_velocity) {
            b.mean(i) = (*det.velocity)(i - 3);
            var(i) = meas_noise_diag_(std::min<int>(i, meas_noise_diag_.size() - 1));
        } else {
            var(i) = initial_velocity_sigma_ * initial_velocity_sigma_;
        }
    }
    b.covariance = var.asDiagonal();
    return b;
}

double mahalanobis_sq(const Eigen::VectorXd& innovation,
                      const Eigen::MatrixXd& innovation_cov) {
    const auto llt = checked_llt(innovation_cov);
    return innovation.dot(llt.solve(innovation));
}

}  // namespace wintrack
