#include "ect/tv.hpp"

#include <cmath>
#include <stdexcept>

#include "ect/errors.hpp"

namespace ect {

Eigen::VectorXd shrink(const Eigen::VectorXd& b, double alpha) {
    if (alpha < 0.0) throw ConfigError("shrinkage threshold must be nonnegative");
    Eigen::VectorXd out(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        const double a = std::abs(b[i]);
        out[i] = (a - std::min(alpha, a)) * (b[i] > 0.0 ? 1.0 : (b[i] < 0.0 ? -1.0 : 0.0));
    }
    return out;
}

GradientPair tv_gradient_step(const SensitivityMatrix& s, const LaplacianSolver& solver,
                              const GradientTransforms& t, const Eigen::VectorXd& x,
                              const MeasurementVector& m) {
    if (s.s.cols() != x.size() || s.s.rows() != m.lambda.size())
        throw std::invalid_argument("tv_gradient_step: dimensions disagree");
    const Eigen::VectorXd r = s.s * x - m.lambda;
    const Eigen::VectorXd back = solver.solve(s.s.transpose() * r);
    return t.apply(back);
}

GradientPair weighted_shrink_2d(const GradientPair& ghat, const Eigen::VectorXd& w,
                                double alpha_prime) {
    const Eigen::Index n = ghat.g1.size();
    if (ghat.g2.size() != n || w.size() != n)
        throw std::invalid_argument("weighted_shrink_2d: lengths disagree");
    if (alpha_prime < 0.0) throw ConfigError("shrinkage threshold must be nonnegative");
    GradientPair out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mag = std::sqrt(ghat.g1[i] * ghat.g1[i] + ghat.g2[i] * ghat.g2[i]);
        const double wm = w[i] * mag;
        if (wm == 0.0) {
            out.g1[i] = 0.0;
            out.g2[i] = 0.0;
            continue;
        }
        const double r = (wm - std::min(alpha_prime, wm)) / wm;
        out.g1[i] = r * ghat.g1[i];
        out.g2[i] = r * ghat.g2[i];
    }
    return out;
}

Eigen::VectorXd update_weights(const Eigen::VectorXd& g_magnitude, double rho) {
    if (rho <= 0.0) throw ConfigError("weight stabilizer rho must be positive");
    return (g_magnitude.array().abs() + rho).inverse();
}

SensitivityMatrix fitting_curve_sensitivity(const SensitivityMatrix& s, double eps_ref,
                                            double delta_eps) {
    const double den = delta_eps + 2.0 * eps_ref;
    if (std::abs(den) < 1e-12 * std::max(1.0, std::abs(eps_ref)))
        throw ConfigError("fitting curve: delta_eps + 2 eps_ref is too close to zero");
    SensitivityMatrix out = s;
    out.s *= 2.0 * eps_ref / den;
    return out;
}

SensitivityMatrix adaptive_sensitivity(const Eigen::VectorXd& x, const Grid& grid,
                                       const ElectrodeLayout& layout, double eps_low,
                                       double eps_high, double wall_eps,
                                       const CapacitanceVector& c_low,
                                       const CapacitanceVector& c_high,
                                       const SolveOptions& opts) {
    const Eigen::VectorXd clamped = x.cwiseMax(0.0).cwiseMin(1.0);
    const PermittivityField field =
        denormalized_field(grid, clamped, eps_low, eps_high, wall_eps);
    return sensitivity_matrix(field, grid, layout, c_low, c_high, opts);
}

namespace {

struct LoopFlags {
    bool momentum = false;
    bool reweight = false;
};

void validate(const TvConfig& cfg) {
    if (cfg.k_max < 1) throw ConfigError("k_max must be at least 1");
    if (cfg.alpha_prime < 0.0) throw ConfigError("alpha_prime must be nonnegative");
    if (cfg.rho <= 0.0) throw ConfigError("rho must be positive");
    if (cfg.v < 1) throw ConfigError("weight update period v must be at least 1");
}

TvResult run_loop(const SensitivityMatrix& s0, const LaplacianSolver& solver,
                  const GradientTransforms& t, const MeasurementVector& m,
                  const TvConfig& cfg, LoopFlags flags, const SensitivityRebuild& rebuild) {
    validate(cfg);
    const Eigen::Index n = t.n();
    if (s0.s.cols() != n || s0.s.rows() != m.lambda.size())
        throw std::invalid_argument("tv solver: dimensions disagree");

    // The fitting-curve factor is constant, so one upfront rescale covers
    // every iteration; the step bound then sees the corrected matrix.
    Eigen::MatrixXd s = s0.s;
    if (cfg.nonlinear == NonlinearMode::FittingCurve)
        s = fitting_curve_sensitivity(s0, cfg.eps_ref, cfg.delta_eps).s;
    if (cfg.nonlinear == NonlinearMode::AdaptiveFdm && !rebuild)
        throw ConfigError("adaptive sensitivity mode needs a rebuild callback");

    auto step_for = [&](const Eigen::MatrixXd& mat) {
        return estimate_step_bound(mat, solver, t).step;
    };
    double beta = cfg.beta > 0.0 ? cfg.beta : step_for(s);
    const double penalty = cfg.alpha_prime / beta;

    Eigen::VectorXd x_prev = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    double t_k = 1.0;

    TvResult out;
    out.trace.reserve(static_cast<size_t>(cfg.k_max) + 1);
    auto record = [&](long k) {
        const Eigen::VectorXd r = s * x - m.lambda;
        const GradientPair g = t.apply(x);
        const Eigen::VectorXd mag = g.magnitude();
        TraceRecord rec;
        rec.k = k;
        rec.residual = r.norm();
        rec.tv = mag.sum();
        rec.weighted_tv = w.dot(mag);
        rec.cost = r.squaredNorm() + penalty * rec.tv;
        out.trace.push_back(rec);
    };
    record(0);

    for (long k = 0; k < cfg.k_max; ++k) {
        if (flags.reweight && k % cfg.v == 0)
            w = update_weights(t.apply(x).magnitude(), cfg.rho);
        if (cfg.nonlinear == NonlinearMode::AdaptiveFdm && k > 0 && k % cfg.v == 0) {
            s = rebuild(x);
            if (cfg.beta <= 0.0) beta = step_for(s);
        }

        // Auxiliary image: gradients are re-derived from the image each
        // iteration, so the head solve L^{-1} G^T h collapses to y itself.
        Eigen::VectorXd y;
        if (flags.momentum) {
            const double t_next = momentum_next(t_k);
            const double theta = (t_k - 1.0) / t_next;
            y = x + theta * (x - x_prev);
            t_k = t_next;
        } else {
            y = x;
        }

        const Eigen::VectorXd residual = s * y - m.lambda;
        const Eigen::VectorXd z = y - beta * solver.solve(s.transpose() * residual);
        const GradientPair g_next = weighted_shrink_2d(t.apply(z), w, cfg.alpha_prime);

        x_prev = x;
        x = ls_invert(solver, t, g_next);
        if (cfg.project_box) x = x.cwiseMax(0.0).cwiseMin(1.0);
        if (!x.allFinite())
            throw NumericalError("tv solver produced non-finite values at iteration " +
                                 std::to_string(k + 1));
        record(k + 1);
    }
    out.x = x;
    out.beta_used = beta;
    return out;
}

}  // namespace

TvResult tv_ist(const SensitivityMatrix& s, const LaplacianSolver& solver,
                const GradientTransforms& t, const MeasurementVector& m,
                const TvConfig& cfg, bool reweight, const SensitivityRebuild& rebuild) {
    return run_loop(s, solver, t, m, cfg, {false, reweight}, rebuild);
}

TvResult tv_fist(const SensitivityMatrix& s, const LaplacianSolver& solver,
                 const GradientTransforms& t, const MeasurementVector& m,
                 const TvConfig& cfg, bool reweight, const SensitivityRebuild& rebuild) {
    return run_loop(s, solver, t, m, cfg, {!cfg.force_zero_momentum, reweight}, rebuild);
}

}  // namespace ect
