#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "wintrack/errors.hpp"
#include "wintrack/motion_filter.hpp"

using namespace wintrack;

namespace {

GaussianBelief belief_at(const Vec3& pos, const Vec3& vel, double var = 1.0) {
    GaussianBelief b;
    b.mean = Eigen::VectorXd(6);
    b.mean << pos, vel;
    b.covariance = var * Eigen::MatrixXd::Identity(6, 6);
    return b;
}

}  // namespace

TEST_CASE("predict applies constant-velocity motion") {
    TrackerConfig config;
    const FilterModel filter(config);
    const GaussianBelief prior = belief_at(Vec3(1.0, 2.0, 3.0), Vec3(2.0, -1.0, 0.5));

    const GaussianBelief pred = filter.predict(prior, 2.0);
    CHECK(pred.mean(0) == doctest::Approx(5.0));    // 1 + 2*2
    CHECK(pred.mean(1) == doctest::Approx(0.0));    // 2 - 1*2
    CHECK(pred.mean(2) == doctest::Approx(4.0));    // 3 + 0.5*2
    CHECK(pred.mean(3) == doctest::Approx(2.0));    // velocity unchanged
    CHECK(pred.mean(4) == doctest::Approx(-1.0));
    CHECK(pred.mean(5) == doctest::Approx(0.5));

    // Covariance against the closed form A P A' + Q dt for P = I.
    const double dt = 2.0;
    const Eigen::MatrixXd a = filter.transition(dt);
    Eigen::MatrixXd expected = a * prior.covariance * a.transpose();
    expected.diagonal() += dt * config.process_noise_diag;
    CHECK((pred.covariance - expected).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(filter.predict(prior, 0.0), InvalidValueError);
    CHECK_THROWS_AS(filter.predict(prior, -0.5), InvalidValueError);
}

TEST_CASE("update matches the scalar Kalman oracle per axis") {
    // With diagonal P, R and identity C the 6D update decouples into scalar
    // filters: K = p / (p + r), mean' = mean + K * innovation.
    TrackerConfig config;
    config.measurement_noise_diag = Eigen::VectorXd::Constant(3, 1.0);
    const FilterModel filter(config);

    GaussianBelief prior = belief_at(Vec3::Zero(), Vec3::Zero(), 1.0);
    Eigen::VectorXd y(3);
    y << 1.0, -2.0, 0.5;
    const UpdateResult res = filter.update(prior, y);

    // p = r = 1: S = 2, K = 1/2, posterior mean = y/2, posterior var = 1/2.
    CHECK(res.innovation.isApprox(y));
    CHECK(res.innovation_cov.isApprox(2.0 * Eigen::MatrixXd::Identity(3, 3), 1e-12));
    for (int i = 0; i < 3; ++i) {
        CHECK(res.posterior.mean(i) == doctest::Approx(y(i) / 2.0));
        CHECK(res.posterior.covariance(i, i) == doctest::Approx(0.5));
        // Velocity is unobserved and uncorrelated here: untouched.
        CHECK(res.posterior.mean(3 + i) == doctest::Approx(0.0));
        CHECK(res.posterior.covariance(3 + i, 3 + i) == doctest::Approx(1.0));
    }
}

TEST_CASE("update matches an independently computed dense Kalman step") {
    TrackerConfig config;
    const FilterModel filter(config);
    std::mt19937 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int trial = 0; trial < 100; ++trial) {
        GaussianBelief prior;
        prior.mean = Eigen::VectorXd::NullaryExpr(6, [&](int) { return gauss(rng); });
        Eigen::MatrixXd root =
            Eigen::MatrixXd::NullaryExpr(6, 6, [&](int, int) { return gauss(rng); });
        prior.covariance =
            root * root.transpose() + 0.5 * Eigen::MatrixXd::Identity(6, 6);

        Eigen::VectorXd y =
            Eigen::VectorXd::NullaryExpr(3, [&](int) { return 5.0 * gauss(rng); });
        const UpdateResult res = filter.update(prior, y);

        // Textbook K = P C' S^-1 with explicit inverses.
        const Eigen::MatrixXd c = filter.observation(3);
        Eigen::MatrixXd r = config.measurement_noise_diag.asDiagonal();
        const Eigen::MatrixXd s = c * prior.covariance * c.transpose() + r;
        const Eigen::MatrixXd k = prior.covariance * c.transpose() * s.inverse();
        const Eigen::VectorXd mean = prior.mean + k * (y - c * prior.mean);
        const Eigen::MatrixXd cov = (Eigen::MatrixXd::Identity(6, 6) - k * c) *
                                    prior.covariance;

        CHECK((res.innovation_cov - s).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((res.posterior.mean - mean).cwiseAbs().maxCoeff() < 1e-9);
        // Joseph form equals the standard form in exact arithmetic.
        CHECK((res.posterior.covariance - cov).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(res.posterior.is_valid());
    }
}

TEST_CASE("update rejects singular innovation covariance") {
    // With a zero prior covariance S equals R; one near-zero axis against two
    // unit axes puts the condition number far beyond the 1e12 guard.
    TrackerConfig config;
    config.measurement_noise_diag = Eigen::VectorXd::Ones(3);
    config.measurement_noise_diag(0) = 1e-30;
    const FilterModel filter(config);
    GaussianBelief prior = belief_at(Vec3::Zero(), Vec3::Zero(), 0.0);
    prior.covariance = Eigen::MatrixXd::Zero(6, 6);
    CHECK_THROWS_AS(filter.update(prior, Eigen::VectorXd::Zero(3)),
                    NumericalDegeneracyError);
}

TEST_CASE("measurement_from respects the observation mode") {
    Detection det;
    det.position = Vec3(1.0, 2.0, 3.0);
    det.velocity = Vec3(4.0, 5.0, 6.0);

    TrackerConfig pos_cfg;
    CHECK(FilterModel(pos_cfg).measurement_from(det).size() == 3);

    TrackerConfig pv_cfg;
    pv_cfg.observation_mode = ObservationMode::kPositionVelocity;
    pv_cfg.measurement_noise_diag = Eigen::VectorXd::Constant(6, 0.09);
    const FilterModel pv(pv_cfg);
    Eigen::VectorXd y = pv.measurement_from(det);
    REQUIRE(y.size() == 6);
    CHECK(y(3) == doctest::Approx(4.0));

    det.velocity.reset();  // falls back to position-only
    CHECK(pv.measurement_from(det).size() == 3);
}

TEST_CASE("initial_belief seeds measured and prior variances") {
    TrackerConfig config;
    const FilterModel filter(config);
    Detection det;
    det.position = Vec3(10.0, 20.0, 1.0);

    const GaussianBelief b = filter.initial_belief(det);
    REQUIRE(b.mean.size() == 6);
    CHECK(b.mean.head<3>().isApprox(det.position));
    CHECK(b.mean.tail<3>().isZero());
    for (int i = 0; i < 3; ++i) {
        CHECK(b.covariance(i, i) == doctest::Approx(config.measurement_noise_diag(i)));
        CHECK(b.covariance(3 + i, 3 + i) ==
              doctest::Approx(config.initial_velocity_sigma_mps *
                              config.initial_velocity_sigma_mps));
    }
    CHECK(b.is_valid());
}

TEST_CASE("mahalanobis with identity covariance is the squared norm") {
    std::mt19937 rng(9);
    std::normal_distribution<double> gauss(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 6);
        Eigen::VectorXd nu =
            Eigen::VectorXd::NullaryExpr(m, [&](int) { return gauss(rng); });
        CHECK(mahalanobis_sq(nu, Eigen::MatrixXd::Identity(m, m)) ==
              doctest::Approx(nu.squaredNorm()).epsilon(1e-12));
    }
    // Scaling S by 4 scales the distance by 1/4.
    Eigen::VectorXd nu(2);
    nu << 3.0, 4.0;
    CHECK(mahalanobis_sq(nu, 4.0 * Eigen::MatrixXd::Identity(2, 2)) ==
          doctest::Approx(25.0 / 4.0));
    CHECK_THROWS_AS(mahalanobis_sq(nu, -Eigen::MatrixXd::Identity(2, 2)),
                    NumericalDegeneracyError);
}

TEST_CASE("covariances stay symmetric PSD across random predict/update chains") {
    TrackerConfig config;
    const FilterModel filter(config);
    std::mt19937 rng(1234);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> step(0.05, 3.0);

    Detection det;
    det.position = Vec3(0.0, 0.0, 0.0);
    GaussianBelief belief = filter.initial_belief(det);
    for (int i = 0; i < 1000; ++i) {
        belief = filter.predict(belief, step(rng));
        Eigen::VectorXd y = belief.mean.head<3>();
        for (int j = 0; j < 3; ++j) y(j) += 2.0 * gauss(rng);
        belief = filter.update(belief, y).posterior;
        REQUIRE(belief.is_valid());
    }
}
