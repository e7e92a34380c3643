#include "ect/operators.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ect/errors.hpp"

namespace ect {

GradientPair GradientTransforms::apply(const Eigen::VectorXd& x) const {
    if (x.size() != n()) throw std::invalid_argument("apply: image vector has wrong length");
    return {g1_op * x, g2_op * x};
}

Eigen::VectorXd GradientTransforms::adjoint(const GradientPair& h) const {
    if (h.g1.size() != n() || h.g2.size() != n())
        throw std::invalid_argument("adjoint: gradient vectors have wrong length");
    return g1_op.transpose() * h.g1 + g2_op.transpose() * h.g2;
}

GradientTransforms build_gradient_transforms(const Grid& grid) {
    const int n = grid.n_roi();
    if (n == 0) throw GeometryError("grid has no imaging-region pixels");

    std::vector<Eigen::Triplet<double>> t1, t2;
    t1.reserve(static_cast<size_t>(2 * n));
    t2.reserve(static_cast<size_t>(2 * n));
    for (int k = 0; k < n; ++k) {
        const int p = grid.roi_pixel(k);
        const int i = grid.row_of(p), j = grid.col_of(p);
        // Horizontal difference toward the right neighbor.
        if (grid.in_lattice(i, j + 1)) {
            t1.emplace_back(k, k, -1.0);
            const int q = grid.flat(i, j + 1);
            if (grid.is_roi(q)) t1.emplace_back(k, grid.roi_index(q), 1.0);
        }
        // Vertical difference toward the neighbor below.
        if (grid.in_lattice(i + 1, j)) {
            t2.emplace_back(k, k, -1.0);
            const int q = grid.flat(i + 1, j);
            if (grid.is_roi(q)) t2.emplace_back(k, grid.roi_index(q), 1.0);
        }
    }
    GradientTransforms t;
    t.g1_op.resize(n, n);
    t.g2_op.resize(n, n);
    t.g1_op.setFromTriplets(t1.begin(), t1.end());
    t.g2_op.setFromTriplets(t2.begin(), t2.end());
    t.g1_op.makeCompressed();
    t.g2_op.makeCompressed();
    return t;
}

GradientPair apply_gradients(const GradientTransforms& t, const Eigen::VectorXd& x) {
    return t.apply(x);
}

double tv_norm(const GradientTransforms& t, const Eigen::VectorXd& x) {
    return t.apply(x).magnitude().sum();
}

LaplacianSolver::LaplacianSolver(const GradientTransforms& t) {
    l_op_ = Eigen::SparseMatrix<double>(t.g1_op.transpose() * t.g1_op) +
            Eigen::SparseMatrix<double>(t.g2_op.transpose() * t.g2_op);
    l_op_.makeCompressed();
    use_direct_ = n() <= 65536;
    if (use_direct_) {
        ldlt_.compute(l_op_);
        if (ldlt_.info() != Eigen::Success)
            throw NumericalError("Laplacian factorization failed (singular operator?)");
    }
}

Eigen::VectorXd LaplacianSolver::solve(const Eigen::VectorXd& b) const {
    if (b.size() != n()) throw std::invalid_argument("solve: rhs has wrong length");
    if (use_direct_) {
        Eigen::VectorXd x = ldlt_.solve(b);
        if (ldlt_.info() != Eigen::Success)
            throw NumericalError("Laplacian solve failed");
        return x;
    }
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-10);
    cg.compute(l_op_);
    Eigen::VectorXd x = cg.solve(b);
    if (cg.info() != Eigen::Success)
        throw NumericalError("Laplacian CG solve did not converge");
    return x;
}

Eigen::VectorXd ls_invert(const LaplacianSolver& solver, const GradientTransforms& t,
                          const GradientPair& h) {
    return solver.solve(t.adjoint(h));
}

StepBound estimate_step_bound(const Eigen::MatrixXd& s, const LaplacianSolver& solver,
                              const GradientTransforms& t) {
    if (s.cols() != solver.n() || s.cols() != t.n())
        throw std::invalid_argument("estimate_step_bound: operator sizes disagree");
    const int m = static_cast<int>(s.rows());

    // T T^T v = S L^{-1} S^T v, an m x m symmetric PSD operator.
    const auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return s * solver.solve(s.transpose() * v);
    };

    StepBound out;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m).normalized();
    double lambda_prev = 0.0;
    for (int it = 1; it <= 100; ++it) {
        Eigen::VectorXd w = apply(v);
        const double lambda = v.dot(w);
        out.iterations = it;
        out.rayleigh.push_back(lambda);
        const double norm = w.norm();
        if (norm == 0.0) {
            out.lambda_max = 0.0;
            out.converged = true;
            break;
        }
        v = w / norm;
        out.lambda_max = lambda;
        if (it > 1 && std::abs(lambda - lambda_prev) < 1e-6 * std::abs(lambda)) {
            out.converged = true;
            break;
        }
        lambda_prev = lambda;
    }
    if (!out.converged || out.lambda_max <= 0.0) {
        // trace(S L^{-1} S^T) = ||T||_F^2 bounds lambda_max from above.
        double trace = 0.0;
        for (int l = 0; l < m; ++l) {
            const Eigen::VectorXd col = s.row(l).transpose();
            trace += col.dot(solver.solve(col));
        }
        out.lambda_max = trace;
        out.converged = false;
    }
    if (out.lambda_max <= 0.0) throw NumericalError("step bound: operator has no spectrum");
    out.step = 0.95 / out.lambda_max;
    return out;
}

}  // namespace ect
