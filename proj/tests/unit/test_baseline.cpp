#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ect/baseline.hpp"
#include "ect/errors.hpp"

using namespace ect;

namespace {

SensitivityMatrix toy(const Eigen::MatrixXd& s) {
    SensitivityMatrix out;
    out.s = s;
    return out;
}

MeasurementVector meas(const Eigen::VectorXd& lambda) {
    MeasurementVector m;
    m.lambda = lambda;
    return m;
}

Eigen::MatrixXd random_matrix(int rows, int cols, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = dist(rng);
    return a;
}

}  // namespace

TEST_CASE("lbp endpoints and zero-column rule") {
    Eigen::MatrixXd s = random_matrix(6, 10, 1).cwiseAbs();
    s.col(4).setZero();
    const SensitivityMatrix sm = toy(s);

    CHECK(lbp(sm, meas(Eigen::VectorXd::Zero(6))).lpNorm<Eigen::Infinity>() == 0.0);

    const Eigen::VectorXd x = lbp(sm, meas(Eigen::VectorXd::Ones(6)));
    for (int p = 0; p < 10; ++p)
        CHECK(x[p] == doctest::Approx(p == 4 ? 0.0 : 1.0));
}

TEST_CASE("landweber first step is a scaled back projection") {
    const SensitivityMatrix sm = toy(random_matrix(5, 8, 2));
    const Eigen::VectorXd lambda = random_matrix(5, 1, 3).col(0);
    BaselineConfig cfg;
    cfg.iters = 1;
    cfg.step = 0.07;
    cfg.clamp = false;
    const Eigen::VectorXd x = landweber(sm, meas(lambda), cfg);
    const Eigen::VectorXd expect = 0.07 * sm.s.transpose() * lambda;
    CHECK((x - expect).lpNorm<Eigen::Infinity>() <= 1e-14);

    cfg.clamp = true;
    const Eigen::VectorXd xc = landweber(sm, meas(lambda), cfg);
    CHECK(xc.minCoeff() >= 0.0);
    CHECK(xc.maxCoeff() <= 1.0);
}

TEST_CASE("landweber solves a well-conditioned square system") {
    const Eigen::MatrixXd s =
        Eigen::MatrixXd::Identity(8, 8) + 0.1 * random_matrix(8, 8, 4);
    const Eigen::VectorXd x_true = 0.1 * random_matrix(8, 1, 5).col(0);
    const Eigen::VectorXd lambda = s * x_true;
    BaselineConfig cfg;
    cfg.iters = 20000;
    cfg.clamp = false;
    const Eigen::VectorXd x = landweber(toy(s), meas(lambda), cfg);
    const Eigen::VectorXd direct = s.partialPivLu().solve(lambda);
    CHECK((x - direct).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("landweber cost is nonincreasing under the descent step") {
    const Eigen::MatrixXd s = random_matrix(6, 12, 6);
    const Eigen::VectorXd lambda = random_matrix(6, 1, 7).col(0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s * s.transpose());
    BaselineConfig cfg;
    cfg.step = 1.0 / es.eigenvalues().maxCoeff();
    cfg.clamp = false;
    double prev = lambda.squaredNorm();  // cost at x0 = 0
    for (long k = 1; k <= 25; ++k) {
        cfg.iters = k;
        const double cost = (s * landweber(toy(s), meas(lambda), cfg) - lambda).squaredNorm();
        CHECK(cost <= prev * (1.0 + 1e-12));
        prev = cost;
    }
}

TEST_CASE("landweber reports divergence with the iteration index") {
    const Eigen::MatrixXd s = random_matrix(6, 12, 8);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s * s.transpose());
    BaselineConfig cfg;
    cfg.step = 50.0 / es.eigenvalues().maxCoeff();
    cfg.clamp = false;
    cfg.iters = 500;
    CHECK_THROWS_AS(landweber(toy(s), meas(random_matrix(6, 1, 9).col(0)), cfg),
                    SolverError);
}

TEST_CASE("kaczmarz projection zeroes a single-row residual") {
    const Eigen::MatrixXd s = random_matrix(1, 7, 10);
    const Eigen::VectorXd lambda = Eigen::VectorXd::Constant(1, 0.8);
    BaselineConfig cfg;
    cfg.iters = 1;
    cfg.relax = 1.0;
    cfg.clamp = false;
    const Eigen::VectorXd x = art(toy(s), meas(lambda), cfg);
    CHECK(std::abs(s.row(0).dot(x) - 0.8) <= 1e-13);

    cfg.relax = 0.0;
    CHECK(art(toy(s), meas(lambda), cfg).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("art solves a consistent square system") {
    const Eigen::MatrixXd s =
        Eigen::MatrixXd::Identity(8, 8) + 0.15 * random_matrix(8, 8, 11);
    const Eigen::VectorXd x_true = 0.1 * random_matrix(8, 1, 12).col(0).cwiseAbs();
    BaselineConfig cfg;
    cfg.iters = 5000;
    cfg.clamp = false;
    const Eigen::VectorXd x = art(toy(s), meas(s * x_true), cfg);
    CHECK((x - x_true).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("art iterates stay Fejer monotone toward the solution") {
    const Eigen::MatrixXd s = random_matrix(5, 5, 13);
    const Eigen::VectorXd x_true = random_matrix(5, 1, 14).col(0);
    const MeasurementVector m = meas(s * x_true);
    BaselineConfig cfg;
    cfg.clamp = false;
    cfg.relax = 1.2;
    double prev = x_true.norm();  // distance from x0 = 0
    for (long k = 1; k <= 20; ++k) {
        cfg.iters = k;
        const double dist = (art(toy(s), m, cfg) - x_true).norm();
        CHECK(dist <= prev * (1.0 + 1e-12));
        prev = dist;
    }
}

TEST_CASE("sirt with duplicated rows equals one relaxed kaczmarz step") {
    Eigen::MatrixXd s(2, 6);
    s.row(0) = random_matrix(1, 6, 15);
    s.row(1) = s.row(0);
    Eigen::VectorXd lambda(2);
    lambda << 0.6, 0.6;
    BaselineConfig cfg;
    cfg.iters = 1;
    cfg.relax = 0.7;
    cfg.clamp = false;
    const Eigen::VectorXd x = sirt(toy(s), meas(lambda), cfg);

    const Eigen::MatrixXd single = s.topRows(1);
    const Eigen::VectorXd x_art =
        art(toy(single), meas(Eigen::VectorXd::Constant(1, 0.6)), cfg);
    CHECK((x - x_art).lpNorm<Eigen::Infinity>() <= 1e-14);

    cfg.relax = 0.0;
    CHECK(sirt(toy(s), meas(lambda), cfg).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("sirt reaches the solution of a consistent overdetermined system") {
    const Eigen::MatrixXd s = random_matrix(12, 6, 16);
    const Eigen::VectorXd x_true = 0.1 * random_matrix(6, 1, 17).col(0);
    BaselineConfig cfg;
    cfg.iters = 10000;
    cfg.clamp = false;
    const Eigen::VectorXd x = sirt(toy(s), meas(s * x_true), cfg);
    CHECK((x - x_true).lpNorm<Eigen::Infinity>() <= 1e-4);
}

TEST_CASE("baseline solvers are deterministic") {
    const SensitivityMatrix sm = toy(random_matrix(10, 30, 18).cwiseAbs());
    const MeasurementVector m = meas(random_matrix(10, 1, 19).col(0).cwiseAbs() * 0.1);
    BaselineConfig cfg;
    cfg.iters = 50;
    CHECK(landweber(sm, m, cfg) == landweber(sm, m, cfg));
    CHECK(art(sm, m, cfg) == art(sm, m, cfg));
    CHECK(sirt(sm, m, cfg) == sirt(sm, m, cfg));
    CHECK(lbp(sm, m) == lbp(sm, m));
}

TEST_CASE("baseline configuration is validated") {
    const SensitivityMatrix sm = toy(random_matrix(4, 6, 20));
    const MeasurementVector m = meas(Eigen::VectorXd::Zero(4));
    BaselineConfig cfg;
    cfg.iters = 0;
    CHECK_THROWS_AS(landweber(sm, m, cfg), ConfigError);
    cfg.iters = 10;
    cfg.relax = 2.0;
    CHECK_THROWS_AS(art(sm, m, cfg), ConfigError);
    cfg.relax = -0.1;
    CHECK_THROWS_AS(sirt(sm, m, cfg), ConfigError);
    cfg.relax = 1.0;
    CHECK_THROWS_AS(art(sm, meas(Eigen::VectorXd::Zero(3)), cfg), std::invalid_argument);
}
