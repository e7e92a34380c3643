#include "ect/forward.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ect/errors.hpp"

namespace ect {

namespace {

inline double face_weight(double ea, double eb) { return 2.0 * ea * eb / (ea + eb); }

}  // namespace

PotentialField solve_dirichlet(const Grid& grid, const Eigen::VectorXd& eps,
                               const std::vector<unsigned char>& pinned,
                               const Eigen::VectorXd& pinned_values, double scale,
                               const SolveOptions& opts) {
    const int n1 = grid.n1, n2 = grid.n2, np = grid.n_pixels();
    if (eps.size() != np || pinned_values.size() != np ||
        static_cast<int>(pinned.size()) != np)
        throw std::invalid_argument("solve_dirichlet: array lengths disagree");
    if (eps.minCoeff() <= 0.0) throw ConfigError("permittivity must be positive everywhere");
    if (opts.tol <= 0.0) throw ConfigError("solver tolerance must be positive");
    if (opts.omega <= 0.0 || opts.omega >= 2.0)
        throw ConfigError("over-relaxation factor must lie in (0, 2)");
    if (scale <= 0.0) throw ConfigError("convergence scale must be positive");

    PotentialField out;
    if (opts.warm_start) {
        if (opts.warm_start->size() != np)
            throw std::invalid_argument("solve_dirichlet: warm start has wrong length");
        out.phi = *opts.warm_start;
    } else {
        out.phi = Eigen::VectorXd::Zero(np);
    }
    for (int p = 0; p < np; ++p)
        if (pinned[static_cast<size_t>(p)]) out.phi[p] = pinned_values[p];

    double* phi = out.phi.data();
    const double* e = eps.data();
    const double tol_abs = opts.tol * scale;

    double max_upd = 0.0;
    for (long sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        max_upd = 0.0;
        for (int color = 0; color < 2; ++color) {
            for (int i = 0; i < n1; ++i) {
                const int jstart = (i + color) & 1;
                for (int j = jstart; j < n2; j += 2) {
                    const int p = i * n2 + j;
                    if (pinned[static_cast<size_t>(p)]) continue;
                    double num = 0.0, den = 0.0;
                    if (i > 0) {
                        const double w = face_weight(e[p], e[p - n2]);
                        num += w * phi[p - n2];
                        den += w;
                    }
                    if (i + 1 < n1) {
                        const double w = face_weight(e[p], e[p + n2]);
                        num += w * phi[p + n2];
                        den += w;
                    }
                    if (j > 0) {
                        const double w = face_weight(e[p], e[p - 1]);
                        num += w * phi[p - 1];
                        den += w;
                    }
                    if (j + 1 < n2) {
                        const double w = face_weight(e[p], e[p + 1]);
                        num += w * phi[p + 1];
                        den += w;
                    }
                    if (den == 0.0) continue;  // isolated pixel, nothing to relax
                    const double upd = opts.omega * (num / den - phi[p]);
                    phi[p] += upd;
                    const double a = std::abs(upd);
                    if (a > max_upd) max_upd = a;
                }
            }
        }
        out.sweeps = sweep;
        if (max_upd <= tol_abs) {
            out.residual = max_upd / scale;
            return out;
        }
    }
    throw SolverError("potential solve did not converge in " +
                          std::to_string(opts.max_sweeps) + " sweeps",
                      max_upd / scale, opts.max_sweeps);
}

PotentialField solve_potential(const PermittivityField& field, const Grid& grid,
                               const ElectrodeLayout& layout, int excited,
                               const SolveOptions& opts) {
    if (excited < 0 || excited >= layout.n_electrodes)
        throw std::invalid_argument("solve_potential: electrode index out of range");
    const int np = grid.n_pixels();
    std::vector<unsigned char> pinned(static_cast<size_t>(np), 0);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(np);
    for (int e = 0; e < layout.n_electrodes; ++e) {
        const double v = (e == excited) ? layout.v_c : 0.0;
        for (int p : layout.arcs[static_cast<size_t>(e)]) {
            pinned[static_cast<size_t>(p)] = 1;
            values[p] = v;
        }
    }
    PotentialField out = solve_dirichlet(grid, field.eps, pinned, values, layout.v_c, opts);
    out.excited = excited;
    return out;
}

double compute_capacitance(const PotentialField& phi, const PermittivityField& field,
                           const Grid& grid, const ElectrodeLayout& layout, int detect) {
    if (detect < 0 || detect >= layout.n_electrodes)
        throw std::invalid_argument("compute_capacitance: electrode index out of range");
    if (detect == phi.excited)
        throw std::invalid_argument("compute_capacitance: detect equals excited");
    if (phi.phi.size() != grid.n_pixels())
        throw std::invalid_argument("compute_capacitance: potential has wrong length");

    static constexpr int di4[4] = {-1, 1, 0, 0};
    static constexpr int dj4[4] = {0, 0, -1, 1};
    double flux = 0.0;
    for (int p : layout.arcs[static_cast<size_t>(detect)]) {
        const int i = grid.row_of(p), j = grid.col_of(p);
        for (int d = 0; d < 4; ++d) {
            const int ii = i + di4[d], jj = j + dj4[d];
            if (!grid.in_lattice(ii, jj)) continue;
            const int q = grid.flat(ii, jj);
            const int owner = layout.electrode_of(q);
            if (owner == detect) continue;  // internal face, no net flux
            if (owner >= 0)
                throw GeometryError("flux contour touches electrode " +
                                    std::to_string(owner + 1));
            flux += face_weight(field.eps[p], field.eps[q]) * (phi.phi[q] - phi.phi[p]);
        }
    }
    return flux / layout.v_c;
}

CapacitanceVector capacitance_vector(const PermittivityField& field, const Grid& grid,
                                     const ElectrodeLayout& layout,
                                     const SolveOptions& opts) {
    std::vector<PotentialField> solves;
    solves.reserve(static_cast<size_t>(layout.n_electrodes));
    for (int e = 0; e < layout.n_electrodes; ++e)
        solves.push_back(solve_potential(field, grid, layout, e, opts));

    CapacitanceVector out;
    out.pairs = layout.pairs();
    out.c.resize(layout.m());
    for (int l = 0; l < layout.m(); ++l) {
        const auto [i, j] = out.pairs[static_cast<size_t>(l)];
        out.c[l] = compute_capacitance(solves[static_cast<size_t>(i)], field, grid, layout, j);
    }
    return out;
}

SensitivityMatrix sensitivity_matrix(const PermittivityField& base, const Grid& grid,
                                     const ElectrodeLayout& layout,
                                     const CapacitanceVector& c_low,
                                     const CapacitanceVector& c_high,
                                     const SolveOptions& opts) {
    const int m = layout.m(), n = grid.n_roi();
    if (c_low.c.size() != m || c_high.c.size() != m)
        throw CalibrationError("calibration vectors do not match the pair count");

    std::vector<PotentialField> solves;
    solves.reserve(static_cast<size_t>(layout.n_electrodes));
    for (int e = 0; e < layout.n_electrodes; ++e)
        solves.push_back(solve_potential(base, grid, layout, e, opts));

    // Central-difference gradients of every excitation potential at ROI
    // centers. ROI pixels always have all four lattice neighbors.
    const double inv2h = 1.0 / (2.0 * grid.pitch);
    Eigen::MatrixXd gr(layout.n_electrodes, n), gc(layout.n_electrodes, n);
    for (int e = 0; e < layout.n_electrodes; ++e) {
        const Eigen::VectorXd& phi = solves[static_cast<size_t>(e)].phi;
        for (int k = 0; k < n; ++k) {
            const int p = grid.roi_pixel(k);
            const int i = grid.row_of(p), j = grid.col_of(p);
            gr(e, k) = (phi[grid.flat(i + 1, j)] - phi[grid.flat(i - 1, j)]) * inv2h;
            gc(e, k) = (phi[grid.flat(i, j + 1)] - phi[grid.flat(i, j - 1)]) * inv2h;
        }
    }

    SensitivityMatrix out;
    out.base_field = base;
    out.pairs = layout.pairs();
    out.s.resize(m, n);
    const double area = grid.pitch * grid.pitch;
    const double vc2 = layout.v_c * layout.v_c;
    const double eps_span = base.eps_high - base.eps_low;
    for (int l = 0; l < m; ++l) {
        const auto [i, j] = out.pairs[static_cast<size_t>(l)];
        const double dc = c_high.c[l] - c_low.c[l];
        if (dc == 0.0)
            throw CalibrationError("degenerate calibration for pair " + std::to_string(l));
        const double row_scale = eps_span / dc;
        for (int k = 0; k < n; ++k) {
            const double raw =
                -(gr(i, k) * gr(j, k) + gc(i, k) * gc(j, k)) * area / vc2;
            out.s(l, k) = raw * row_scale;
        }
    }
    if (!out.s.allFinite()) throw NumericalError("sensitivity matrix has non-finite entries");
    return out;
}

MeasurementVector normalize_measurements(const CapacitanceVector& c,
                                         const CapacitanceVector& c_low,
                                         const CapacitanceVector& c_high) {
    const Eigen::Index m = c.c.size();
    if (c_low.c.size() != m || c_high.c.size() != m)
        throw CalibrationError("calibration vectors do not match the measurement length");
    MeasurementVector out;
    out.lambda.resize(m);
    for (Eigen::Index l = 0; l < m; ++l) {
        const double span = c_high.c[l] - c_low.c[l];
        if (span == 0.0)
            throw CalibrationError("degenerate calibration for pair " + std::to_string(l));
        out.lambda[l] = (c.c[l] - c_low.c[l]) / span;
    }
    return out;
}

CapacitanceVector denormalize_measurements(const MeasurementVector& m,
                                           const CapacitanceVector& c_low,
                                           const CapacitanceVector& c_high) {
    const Eigen::Index n = m.lambda.size();
    if (c_low.c.size() != n || c_high.c.size() != n)
        throw CalibrationError("calibration vectors do not match the measurement length");
    CapacitanceVector out;
    out.pairs = c_low.pairs;
    out.c = c_low.c + (m.lambda.array() * (c_high.c - c_low.c).array()).matrix();
    return out;
}

MeasurementVector add_noise(const MeasurementVector& m, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db)) return m;
    if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite or +infinity");
    MeasurementVector out = m;
    out.snr_db = snr_db;
    const Eigen::Index n = m.lambda.size();
    if (n == 0) return out;
    // Per-sample sigma so that E[||noise||^2] = ||lambda||^2 * 10^(-snr/10).
    const double sigma = m.lambda.norm() * std::pow(10.0, -snr_db / 20.0) /
                         std::sqrt(static_cast<double>(n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Eigen::Index l = 0; l < n; ++l) out.lambda[l] += sigma * dist(rng);
    return out;
}

}  // namespace ect
