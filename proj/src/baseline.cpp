#include "ect/baseline.hpp"

#include <Eigen/Dense>
#include <iostream>

#include "ect/errors.hpp"

namespace ect {

namespace {

void validate(const BaselineConfig& cfg, Eigen::Index m_rows, Eigen::Index m_len) {
    if (cfg.iters < 1) throw ConfigError("solver iteration count must be at least 1");
    if (cfg.relax < 0.0 || cfg.relax >= 2.0)
        throw ConfigError("relaxation factor must lie in [0, 2)");
    if (m_rows != m_len)
        throw std::invalid_argument("measurement length does not match the matrix rows");
}

inline void clamp01(Eigen::VectorXd& x) {
    x = x.cwiseMax(0.0).cwiseMin(1.0);
}

double auto_step(const Eigen::MatrixXd& s) {
    const Eigen::MatrixXd gram = s * s.transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmax <= 0.0) throw NumericalError("sensitivity matrix is zero");
    return 1.8 / lmax;
}

/// Row squared norms; zero rows reported once on stderr.
Eigen::VectorXd row_norms_checked(const Eigen::MatrixXd& s, const char* who) {
    Eigen::VectorXd n2 = s.rowwise().squaredNorm();
    int zeros = 0;
    for (Eigen::Index l = 0; l < n2.size(); ++l)
        if (n2[l] == 0.0) ++zeros;
    if (zeros > 0)
        std::cerr << who << ": skipping " << zeros << " zero sensitivity row(s)\n";
    return n2;
}

}  // namespace

Eigen::VectorXd lbp(const SensitivityMatrix& s, const MeasurementVector& m) {
    if (s.s.rows() != m.lambda.size())
        throw std::invalid_argument("measurement length does not match the matrix rows");
    const Eigen::VectorXd num = s.s.transpose() * m.lambda;
    const Eigen::VectorXd den = s.s.transpose() * Eigen::VectorXd::Ones(s.s.rows());
    Eigen::VectorXd x(num.size());
    for (Eigen::Index p = 0; p < x.size(); ++p)
        x[p] = den[p] == 0.0 ? 0.0 : num[p] / den[p];
    return x;
}

Eigen::VectorXd landweber(const SensitivityMatrix& s, const MeasurementVector& m,
                          const BaselineConfig& cfg, std::vector<double>* residuals) {
    validate(cfg, s.s.rows(), m.lambda.size());
    const double step = cfg.step > 0.0 ? cfg.step : auto_step(s.s);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(s.s.cols());
    double prev_cost = std::numeric_limits<double>::infinity();
    int rising = 0;
    for (long k = 0; k < cfg.iters; ++k) {
        const Eigen::VectorXd r = s.s * x - m.lambda;
        const double cost = r.squaredNorm();
        if (cost > prev_cost) {
            if (++rising >= 10)
                throw SolverError("landweber diverged (cost rose 10 iterations in a row)",
                                  std::sqrt(cost), k);
        } else {
            rising = 0;
        }
        prev_cost = cost;
        x -= step * (s.s.transpose() * r);
        if (cfg.clamp) clamp01(x);
        if (residuals) residuals->push_back((s.s * x - m.lambda).norm());
    }
    return x;
}

Eigen::VectorXd art(const SensitivityMatrix& s, const MeasurementVector& m,
                    const BaselineConfig& cfg, std::vector<double>* residuals) {
    validate(cfg, s.s.rows(), m.lambda.size());
    const Eigen::VectorXd n2 = row_norms_checked(s.s, "art");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(s.s.cols());
    for (long k = 0; k < cfg.iters; ++k) {
        for (Eigen::Index l = 0; l < s.s.rows(); ++l) {
            if (n2[l] == 0.0) continue;
            const double r = m.lambda[l] - s.s.row(l).dot(x);
            x += (cfg.relax * r / n2[l]) * s.s.row(l).transpose();
        }
        if (cfg.clamp) clamp01(x);
        if (residuals) residuals->push_back((s.s * x - m.lambda).norm());
    }
    return x;
}

Eigen::VectorXd sirt(const SensitivityMatrix& s, const MeasurementVector& m,
                     const BaselineConfig& cfg, std::vector<double>* residuals) {
    validate(cfg, s.s.rows(), m.lambda.size());
    const Eigen::VectorXd n2 = row_norms_checked(s.s, "sirt");
    const Eigen::Index mm = s.s.rows();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(s.s.cols());
    Eigen::VectorXd weighted(mm);
    for (long k = 0; k < cfg.iters; ++k) {
        const Eigen::VectorXd r = m.lambda - s.s * x;
        for (Eigen::Index l = 0; l < mm; ++l)
            weighted[l] = n2[l] == 0.0 ? 0.0 : r[l] / n2[l];
        x += (cfg.relax / static_cast<double>(mm)) * (s.s.transpose() * weighted);
        if (cfg.clamp) clamp01(x);
        if (residuals) residuals->push_back((s.s * x - m.lambda).norm());
    }
    return x;
}

}  // namespace ect
