#pragma once

#include <Eigen/Core>
#include <vector>

namespace wintrack {

/// One frame's contribution to a hypothesis log-likelihood ratio, split into
/// its independent factors.
struct ScoreIncrement {
    double kin = 0.0;
    double conf = 0.0;
    double sim = 0.0;

    double total() const { return kin + conf + sim; }
};

/// Log ratio of the Gaussian measurement likelihood against a uniform clutter
/// density over volume V:
///   -1/2 log((2 pi)^m det S) - d^2/2 + log V,  d^2 = nu' S^-1 nu.
/// Strictly decreasing in d^2 for fixed S and V.
double kinematic_increment(const Eigen::VectorXd& innovation,
                           const Eigen::MatrixXd& innovation_cov,
                           double measurement_volume);

/// log(confidence); requires confidence in (0, 1].
double confidence_increment(double confidence);

/// Increment for a frame with no associated detection:
/// conf = log((1 - P_D) / (1 - P_FA)), kin = sim = 0.
ScoreIncrement skip_increment(double detect_prob, double false_alarm_prob);

/// Softmax log-probability that `query` continues the track whose previous
/// embedding is `matched_prev`, against every candidate embedding observed in
/// that previous frame (the matched one included, so the result is <= 0).
/// An empty candidate list carries no evidence and scores 0.
double similarity_increment(const Eigen::VectorXd& query,
                            const Eigen::VectorXd& matched_prev,
                            const std::vector<Eigen::VectorXd>& prev_frame_embeddings);

double accumulate(double score, const ScoreIncrement& increment);

/// Logistic map from a log-likelihood ratio to a probability in (0, 1).
double score_to_probability(double log_likelihood_ratio);

}  // namespace wintrack
