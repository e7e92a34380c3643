#pragma once

#include <Eigen/Core>
#include <vector>

#include "ect/forward.hpp"

namespace ect {

struct BaselineConfig {
    long iters = 500;
    double relax = 1.0;  ///< Kaczmarz/Cimmino relaxation, [0, 2)
    double step = 0.0;   ///< gradient step; <= 0 picks 1.8 / lambda_max(S S^T)
    bool clamp = true;   ///< project the image into [0, 1] after each iteration
};

/// Linear back projection: x = (S^T lambda) / (S^T 1) elementwise, with
/// zero-sensitivity-sum pixels set to 0.
Eigen::VectorXd lbp(const SensitivityMatrix& s, const MeasurementVector& m);

/// Gradient descent on ||S x - lambda||^2 from x0 = 0:
/// x_{k+1} = x_k - step * S^T (S x_k - lambda).
/// Throws SolverError if the residual grows 10 iterations in a row.
/// When given, residuals receives ||S x_k - lambda|| after every iteration.
Eigen::VectorXd landweber(const SensitivityMatrix& s, const MeasurementVector& m,
                          const BaselineConfig& cfg = {},
                          std::vector<double>* residuals = nullptr);

/// Relaxed Kaczmarz: cyclic row projections, cfg.iters full sweeps.
/// Zero rows are skipped with a warning on stderr.
Eigen::VectorXd art(const SensitivityMatrix& s, const MeasurementVector& m,
                    const BaselineConfig& cfg = {},
                    std::vector<double>* residuals = nullptr);

/// Relaxed Cimmino: simultaneous row projections averaged over M.
Eigen::VectorXd sirt(const SensitivityMatrix& s, const MeasurementVector& m,
                     const BaselineConfig& cfg = {},
                     std::vector<double>* residuals = nullptr);

}  // namespace ect
