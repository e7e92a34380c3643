#pragma once

#include <Eigen/Core>
#include <limits>
#include <utility>
#include <vector>

#include "ect/grid.hpp"

namespace ect {

struct SolveOptions {
    double tol = 1e-6;        ///< convergence: max applied update <= tol * scale
    long max_sweeps = 50000;
    double omega = 1.8;       ///< over-relaxation factor
    const Eigen::VectorXd* warm_start = nullptr;  ///< optional initial potential
};

struct PotentialField {
    Eigen::VectorXd phi;   ///< per-pixel potential over the full lattice (V)
    int excited = -1;      ///< electrode driven at v_c; others grounded
    double residual = 0.0; ///< final max update / v_c
    long sweeps = 0;
};

/// Red-black Gauss-Seidel SOR for div(eps grad phi) = 0 with per-pixel
/// Dirichlet pins and zero-flux lattice edges. Face conductances are harmonic
/// means of the adjacent permittivities, which keeps the discrete operator
/// symmetric. `scale` sets the convergence reference (typically the drive
/// voltage). Throws SolverError if max_sweeps is reached.
PotentialField solve_dirichlet(const Grid& grid, const Eigen::VectorXd& eps,
                               const std::vector<unsigned char>& pinned,
                               const Eigen::VectorXd& pinned_values, double scale,
                               const SolveOptions& opts = {});

/// Potential with electrode `excited` at layout.v_c and all other electrodes
/// grounded.
PotentialField solve_potential(const PermittivityField& field, const Grid& grid,
                               const ElectrodeLayout& layout, int excited,
                               const SolveOptions& opts = {});

/// Mutual capacitance per unit depth from the flux through the faces between
/// the detect electrode and its non-electrode neighbors: C = (1/v_c) * sum of
/// w_face * (phi_neighbor - phi_electrode). Discrete conservation makes this
/// equal to the flux through any contour enclosing the electrode.
double compute_capacitance(const PotentialField& phi, const PermittivityField& field,
                           const Grid& grid, const ElectrodeLayout& layout, int detect);

struct CapacitanceVector {
    Eigen::VectorXd c;  ///< length M, ordered (1,2), (1,3), ..., (n-1,n)
    std::vector<std::pair<int, int>> pairs;
};

/// All M pair capacitances from n potential solves (each electrode excited
/// once; pair (i,j) read from excitation i, detection j).
CapacitanceVector capacitance_vector(const PermittivityField& field, const Grid& grid,
                                     const ElectrodeLayout& layout,
                                     const SolveOptions& opts = {});

struct SensitivityMatrix {
    Eigen::MatrixXd s;  ///< M x N, rows in pair order, columns in ROI order
    PermittivityField base_field;
    std::vector<std::pair<int, int>> pairs;
};

/// Linearized measurement response at `base`: row l, pixel p holds
/// -(grad phi_i . grad phi_j)(p) * area / v_c^2, gradients by central
/// differences, rescaled to normalized units by
/// (eps_high - eps_low) / (c_high(l) - c_low(l)).
SensitivityMatrix sensitivity_matrix(const PermittivityField& base, const Grid& grid,
                                     const ElectrodeLayout& layout,
                                     const CapacitanceVector& c_low,
                                     const CapacitanceVector& c_high,
                                     const SolveOptions& opts = {});

struct MeasurementVector {
    Eigen::VectorXd lambda;  ///< normalized capacitances
    double snr_db = std::numeric_limits<double>::infinity();
};

/// lambda(l) = (c(l) - c_low(l)) / (c_high(l) - c_low(l)).
MeasurementVector normalize_measurements(const CapacitanceVector& c,
                                         const CapacitanceVector& c_low,
                                         const CapacitanceVector& c_high);

/// Inverse of normalize_measurements.
CapacitanceVector denormalize_measurements(const MeasurementVector& m,
                                           const CapacitanceVector& c_low,
                                           const CapacitanceVector& c_high);

/// Additive white Gaussian noise calibrated so the expected signal-to-noise
/// ratio over the whole vector equals snr_db. Infinite snr_db is a no-op.
/// Deterministic for a fixed seed.
MeasurementVector add_noise(const MeasurementVector& m, double snr_db,
                            std::uint64_t seed);

}  // namespace ect
