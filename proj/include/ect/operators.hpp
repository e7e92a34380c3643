#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <vector>

#include "ect/grid.hpp"

namespace ect {

/// Forward-difference gradient components of an ROI image, paired per pixel:
/// row p of g1 is x(right neighbor) - x(p), row p of g2 is x(down neighbor)
/// - x(p). Neighbors outside the imaging region are pinned to zero;
/// differences past the lattice edge are dropped.
struct GradientPair {
    Eigen::VectorXd g1;
    Eigen::VectorXd g2;

    /// Per-pixel magnitude sqrt(g1^2 + g2^2).
    Eigen::VectorXd magnitude() const {
        return (g1.array().square() + g2.array().square()).sqrt();
    }
};

/// Sparse N x N difference matrices over the ROI ordering of a grid.
class GradientTransforms {
public:
    Eigen::SparseMatrix<double> g1_op;
    Eigen::SparseMatrix<double> g2_op;

    int n() const { return static_cast<int>(g1_op.cols()); }

    GradientPair apply(const Eigen::VectorXd& x) const;

    /// G1^T h1 + G2^T h2.
    Eigen::VectorXd adjoint(const GradientPair& h) const;
};

GradientTransforms build_gradient_transforms(const Grid& grid);

GradientPair apply_gradients(const GradientTransforms& t, const Eigen::VectorXd& x);

/// Isotropic total variation: sum over pixels of the gradient magnitude.
double tv_norm(const GradientTransforms& t, const Eigen::VectorXd& x);

/// Prefactored L = G1^T G1 + G2^T G2. Positive definite on a circular ROI
/// because boundary differences pin the exterior to zero. Falls back to
/// conjugate gradients above 65536 unknowns, where the direct factor gets
/// expensive.
class LaplacianSolver {
public:
    explicit LaplacianSolver(const GradientTransforms& t);

    const Eigen::SparseMatrix<double>& matrix() const { return l_op_; }
    int n() const { return static_cast<int>(l_op_.rows()); }

    /// Solves L x = b. Throws NumericalError on breakdown.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

private:
    Eigen::SparseMatrix<double> l_op_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    bool use_direct_ = true;
};

/// Least-squares image from gradient components: argmin_x
/// ||h.g1 - G1 x||^2 + ||h.g2 - G2 x||^2, i.e. x = L^{-1}(G1^T h1 + G2^T h2).
Eigen::VectorXd ls_invert(const LaplacianSolver& solver, const GradientTransforms& t,
                          const GradientPair& h);

struct StepBound {
    double step = 0.0;        ///< safe gradient step: 0.95 / lambda_max
    double lambda_max = 0.0;  ///< largest eigenvalue estimate of the composite operator
    int iterations = 0;
    bool converged = false;
    std::vector<double> rayleigh;  ///< per-iteration quotient, nondecreasing for PSD input
};

/// Largest eigenvalue of T^T T for the gradient-domain forward map
/// T = S L^{-1} [G1^T G2^T]. Since G1^T G1 + G2^T G2 = L, T T^T = S L^{-1} S^T,
/// so the power iteration runs matrix-free on measurement-sized vectors.
StepBound estimate_step_bound(const Eigen::MatrixXd& s, const LaplacianSolver& solver,
                              const GradientTransforms& t);

}  // namespace ect
