#include "wintrack/types.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace wintrack {

double normalize_yaw(double angle) {
    if (!std::isfinite(angle)) {
        throw InvalidValueError("normalize_yaw: non-finite input");
    }
    // Reduce to [-pi, pi), then map -pi to +pi for the half-open (-pi, pi].
    double a = std::fmod(angle + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    a -= M_PI;
    if (a == -M_PI) a = M_PI;
    return a;
}

std::vector<std::string> Detection::validate() const {
    std::vector<std::string> problems;
    if (frame_index < 0) problems.push_back("frame_index must be >= 0");
    if (!(size.array() > 0.0).all()) problems.push_back("size components must be > 0");
    if (!(confidence > 0.0 && confidence <= 1.0)) problems.push_back("confidence must be in (0, 1]");
    if (!std::isfinite(yaw)) problems.push_back("yaw must be finite");
    if (!position.allFinite()) problems.push_back("position must be finite");
    if (velocity && !velocity->allFinite()) problems.push_back("velocity must be finite");
    if (embedding) {
        const double n = embedding->norm();
        if (std::abs(n - 1.0) > 1e-6) problems.push_back("embedding must be unit norm");
    }
    return problems;
}

bool GaussianBelief::is_valid() const {
    if (mean.size() == 0 || covariance.rows() != mean.size() ||
        covariance.cols() != mean.size()) {
        return false;
    }
    if (!mean.allFinite() || !covariance.allFinite()) return false;
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
    return es.eigenvalues().minCoeff() >= -1e-9;
}

}  // namespace wintrack
