#include "wintrack/scoring.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "wintrack/errors.hpp"
#include "wintrack/motion_filter.hpp"

namespace wintrack {

double kinematic_increment(const Eigen::VectorXd& innovation,
                           const Eigen::MatrixXd& innovation_cov,
                           double measurement_volume) {
    if (!(measurement_volume > 0.0)) {
        throw InvalidValueError("kinematic_increment: measurement volume must be > 0");
    }
    const int m = static_cast<int>(innovation.size());
    const double d2 = mahalanobis_sq(innovation, innovation_cov);

    Eigen::LLT<Eigen::MatrixXd> llt(innovation_cov);
    double log_det = 0.0;
    for (int i = 0; i < m; ++i) log_det += 2.0 * std::log(llt.matrixLLT()(i, i));

    return -0.5 * (m * std::log(2.0 * M_PI) + log_det) - 0.5 * d2 +
           std::log(measurement_volume);
}

double confidence_increment(double confidence) {
    if (!(confidence > 0.0 && confidence <= 1.0)) {
        throw InvalidValueError("confidence_increment: confidence must be in (0, 1]");
    }
    return std::log(confidence);
}

ScoreIncrement skip_increment(double detect_prob, double false_alarm_prob) {
    ScoreIncrement inc;
    inc.conf = std::log((1.0 - detect_prob) / (1.0 - false_alarm_prob));
    return inc;
}

double similarity_increment(const Eigen::VectorXd& query,
                            const Eigen::VectorXd& matched_prev,
                            const std::vector<Eigen::VectorXd>& prev_frame_embeddings) {
    if (prev_frame_embeddings.empty()) return 0.0;
    // Cosines live in [-1, 1], so the plain sum is numerically safe.
    double denom = 0.0;
    for (const auto& h : prev_frame_embeddings) {
        denom += std::exp(query.dot(h));
    }
    return query.dot(matched_prev) - std::log(denom);
}

double accumulate(double score, const ScoreIncrement& increment) {
    return score + increment.total();
}

double score_to_probability(double log_likelihood_ratio) {
    double p;
    if (log_likelihood_ratio >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-log_likelihood_ratio));
    } else {
        const double e = std::exp(log_likelihood_ratio);
        p = e / (1.0 + e);
    }
    // exp saturates beyond |s| ~ 37 and the quotient rounds to exactly 0 or
    // 1; pin the result inside the documented open interval instead.
    return std::clamp(p, std::numeric_limits<double>::denorm_min(),
                      std::nextafter(1.0, 0.0));
}

}  // namespace wintrack
