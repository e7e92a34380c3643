#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <vector>

#include "ect/forward.hpp"
#include "ect/operators.hpp"

namespace ect {

enum class NonlinearMode { None, FittingCurve, AdaptiveFdm };

struct TvConfig {
    long k_max = 500;
    double beta = 0.0;          ///< gradient step; <= 0 derives it from the step bound
    double alpha_prime = 1e-4;  ///< shrinkage threshold
    double rho = 0.05;          ///< weight stabilizer, > 0
    int v = 25;                 ///< weight/sensitivity update period (iterations)
    double delta_eps = 0.0;     ///< expected permittivity excursion (fitting curve)
    double eps_ref = 1.0;       ///< reference permittivity (fitting curve)
    NonlinearMode nonlinear = NonlinearMode::None;
    bool project_box = false;   ///< clamp the image to [0, 1] after each update
    bool force_zero_momentum = false;  ///< disables the auxiliary sequence entirely
};

struct TraceRecord {
    long k = 0;
    double cost = 0.0;         ///< ||S x - lambda||^2 + (alpha'/beta) * tv
    double residual = 0.0;     ///< ||S x - lambda||
    double tv = 0.0;
    double weighted_tv = 0.0;  ///< sum of w .* gradient magnitude
};

struct TvResult {
    Eigen::VectorXd x;
    std::vector<TraceRecord> trace;  ///< k_max + 1 records, starting at k = 0
    double beta_used = 0.0;
};

/// Soft threshold (|b| - min(alpha, |b|)) .* sgn(b).
Eigen::VectorXd shrink(const Eigen::VectorXd& b, double alpha);

/// Momentum step sequence t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2.
inline double momentum_next(double t_k) {
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
}

/// Objective gradient in the gradient domain: components
/// G_i L^{-1} S^T (S x - lambda), i = 1, 2.
GradientPair tv_gradient_step(const SensitivityMatrix& s, const LaplacianSolver& solver,
                              const GradientTransforms& t, const Eigen::VectorXd& x,
                              const MeasurementVector& m);

/// 2D soft threshold on the pairwise magnitude, with per-pixel weights:
/// r(i) = T_alpha(w(i) ghat(i)) / (w(i) ghat(i)), zero where the weighted
/// magnitude vanishes; returns (r .* ghat1, r .* ghat2).
GradientPair weighted_shrink_2d(const GradientPair& ghat, const Eigen::VectorXd& w,
                                double alpha_prime);

/// w(i) = 1 / (|g(i)| + rho).
Eigen::VectorXd update_weights(const Eigen::VectorXd& g_magnitude, double rho);

/// Rowwise correction 2 eps / (delta_eps + 2 eps) compensating the
/// first-order linearization bias for an excursion of delta_eps around eps_ref.
SensitivityMatrix fitting_curve_sensitivity(const SensitivityMatrix& s, double eps_ref,
                                            double delta_eps);

/// Re-linearizes the sensitivity matrix at the permittivity field implied by
/// the normalized image x (clamped to [0, 1]; exterior takes wall_eps).
SensitivityMatrix adaptive_sensitivity(const Eigen::VectorXd& x, const Grid& grid,
                                       const ElectrodeLayout& layout, double eps_low,
                                       double eps_high, double wall_eps,
                                       const CapacitanceVector& c_low,
                                       const CapacitanceVector& c_high,
                                       const SolveOptions& opts = {});

/// Callback replacing the sensitivity matrix from the current image estimate.
using SensitivityRebuild = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Iterative shrinkage-thresholding on the total variation of the image,
/// iterating in the gradient domain: gradient step, 2D shrink, least-squares
/// image recovery, gradient re-derivation. Starts from zero. `reweight` and
/// `rebuild` behave exactly as in tv_fist.
TvResult tv_ist(const SensitivityMatrix& s, const LaplacianSolver& solver,
                const GradientTransforms& t, const MeasurementVector& m,
                const TvConfig& cfg, bool reweight = false,
                const SensitivityRebuild& rebuild = {});

/// Momentum-accelerated variant with auxiliary vectors and the step sequence
/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2. With `reweight` the shrink weights
/// refresh every cfg.v iterations from the current gradient magnitudes; with
/// cfg.nonlinear = FittingCurve the matrix is corrected once up front; with
/// AdaptiveFdm the `rebuild` callback replaces it every cfg.v iterations.
TvResult tv_fist(const SensitivityMatrix& s, const LaplacianSolver& solver,
                 const GradientTransforms& t, const MeasurementVector& m,
                 const TvConfig& cfg, bool reweight = false,
                 const SensitivityRebuild& rebuild = {});

}  // namespace ect
