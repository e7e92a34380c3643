#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ect/grid.hpp"
#include "ect/operators.hpp"

using namespace ect;

namespace {

Eigen::VectorXd random_vec(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("constant image has zero gradients on a rectangle") {
    const Grid g = Grid::rectangle(6, 9);
    const GradientTransforms t = build_gradient_transforms(g);
    const GradientPair h = t.apply(Eigen::VectorXd::Constant(g.n_roi(), 3.7));
    CHECK(h.g1.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(h.g2.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("horizontal ramp gives unit horizontal differences") {
    const Grid g = Grid::rectangle(5, 8);
    Eigen::VectorXd x(g.n_roi());
    for (int k = 0; k < g.n_roi(); ++k) x[k] = g.col_of(g.roi_pixel(k));
    const GradientPair h = build_gradient_transforms(g).apply(x);
    for (int k = 0; k < g.n_roi(); ++k) {
        const int j = g.col_of(g.roi_pixel(k));
        CHECK(h.g1[k] == (j < 7 ? 1.0 : 0.0));  // last column has no forward edge
        CHECK(h.g2[k] == 0.0);
    }
}

TEST_CASE("single bright pixel touches two rows of each transform") {
    const Grid g = build_grid(16, 16, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(g.n_roi());
    x[g.roi_index(g.flat(8, 8))] = 1.0;
    const GradientPair h = t.apply(x);
    CHECK((h.g1.array() != 0.0).count() == 2);
    CHECK((h.g2.array() != 0.0).count() == 2);
}

TEST_CASE("gradient rows have the advertised sparsity pattern") {
    const Grid g = build_grid(16, 16, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);
    for (const auto* op : {&t.g1_op, &t.g2_op}) {
        for (int k = 0; k < op->outerSize(); ++k) {
            int nnz = 0;
            double sum = 0.0;
            for (Eigen::SparseMatrix<double>::InnerIterator it(*op, k); it; ++it) {
                ++nnz;
                sum += it.value();
                CHECK((it.value() == 1.0 || it.value() == -1.0));
            }
            CHECK(nnz <= 2);
            if (nnz == 2) CHECK(sum == 0.0);
        }
    }
}

TEST_CASE("adjoint identity holds to machine precision") {
    const Grid g = build_grid(24, 24, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);
    for (unsigned seed = 0; seed < 5; ++seed) {
        const Eigen::VectorXd x = random_vec(g.n_roi(), 100 + seed);
        const Eigen::VectorXd y = random_vec(g.n_roi(), 200 + seed);
        const double lhs = (t.g1_op * x).dot(y);
        const double rhs = x.dot(t.g1_op.transpose() * y);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        const double lhs2 = (t.g2_op * x).dot(y);
        const double rhs2 = x.dot(t.g2_op.transpose() * y);
        CHECK(std::abs(lhs2 - rhs2) <= 1e-12 * std::max(1.0, std::abs(lhs2)));
    }
}

TEST_CASE("tv norm matches hand-enumerated stencils") {
    const Grid g = build_grid(16, 16, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);

    // Constants are TV-free only on rectangles; the circular region pins the
    // exterior to zero, so a constant pays at its boundary.
    const Grid rect = Grid::rectangle(6, 6);
    CHECK(tv_norm(build_gradient_transforms(rect),
                  Eigen::VectorXd::Constant(rect.n_roi(), 2.5)) == doctest::Approx(0.0));

    // Lone unit pixel: its own two differences give sqrt(2); the left and
    // upper neighbors each see a single unit difference.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(g.n_roi());
    x[g.roi_index(g.flat(8, 8))] = 1.0;
    CHECK(tv_norm(t, x) == doctest::Approx(std::sqrt(2.0) + 2.0));

    // Positive homogeneity.
    const Eigen::VectorXd y = random_vec(g.n_roi(), 7);
    CHECK(tv_norm(t, -3.0 * y) == doctest::Approx(3.0 * tv_norm(t, y)));

    // Definition chaining through the magnitude vector.
    CHECK(tv_norm(t, y) == doctest::Approx(t.apply(y).magnitude().sum()));
}

TEST_CASE("laplacian equals the normal-equation assembly exactly") {
    const Grid g = build_grid(12, 12, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);
    const LaplacianSolver solver(t);
    const Eigen::MatrixXd l = Eigen::MatrixXd(solver.matrix());
    const Eigen::MatrixXd ref =
        Eigen::MatrixXd(t.g1_op).transpose() * Eigen::MatrixXd(t.g1_op) +
        Eigen::MatrixXd(t.g2_op).transpose() * Eigen::MatrixXd(t.g2_op);
    CHECK((l - ref).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((l - l.transpose()).lpNorm<Eigen::Infinity>() == 0.0);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("ls_invert round-trips images through gradients") {
    const Grid g = build_grid(16, 16, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);
    const LaplacianSolver solver(t);
    for (unsigned seed = 0; seed < 3; ++seed) {
        const Eigen::VectorXd x = random_vec(g.n_roi(), seed);
        const Eigen::VectorXd back = ls_invert(solver, t, t.apply(x));
        CHECK((back - x).norm() <= 1e-6 * x.norm());
    }
    const GradientPair zero{Eigen::VectorXd::Zero(g.n_roi()), Eigen::VectorXd::Zero(g.n_roi())};
    CHECK(ls_invert(solver, t, zero).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("ls_invert is linear") {
    const Grid g = build_grid(12, 12, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);
    const LaplacianSolver solver(t);
    const GradientPair ha = t.apply(random_vec(g.n_roi(), 11));
    const GradientPair hb = t.apply(random_vec(g.n_roi(), 12));
    GradientPair mix{2.0 * ha.g1 - 0.5 * hb.g1, 2.0 * ha.g2 - 0.5 * hb.g2};
    const Eigen::VectorXd lhs = ls_invert(solver, t, mix);
    const Eigen::VectorXd rhs =
        2.0 * ls_invert(solver, t, ha) - 0.5 * ls_invert(solver, t, hb);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("step bound matches a dense eigendecomposition on a tiny grid") {
    const Grid g = build_grid(4, 4, 0.5);
    REQUIRE(g.n_roi() > 0);
    const GradientTransforms t = build_gradient_transforms(g);
    const LaplacianSolver solver(t);

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, g.n_roi());
    for (int l = 0; l < 3; ++l)
        for (int k = 0; k < g.n_roi(); ++k) s(l, k) = 0.1 + 0.05 * ((l + 2 * k) % 7);

    const StepBound b = estimate_step_bound(s, solver, t);
    CHECK(b.converged);

    // Dense oracle: assemble T = S L^{-1} [G1^T G2^T] and take eigenvalues.
    const Eigen::MatrixXd l_dense = Eigen::MatrixXd(solver.matrix());
    const Eigen::MatrixXd g1 = Eigen::MatrixXd(t.g1_op);
    const Eigen::MatrixXd g2 = Eigen::MatrixXd(t.g2_op);
    Eigen::MatrixXd gt(g.n_roi(), 2 * g.n_roi());
    gt << g1.transpose(), g2.transpose();
    const Eigen::MatrixXd big = s * l_dense.ldlt().solve(gt);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big * big.transpose());
    const double lambda_ref = es.eigenvalues().maxCoeff();
    CHECK(b.lambda_max == doctest::Approx(lambda_ref).epsilon(1e-4));
    CHECK(b.step == doctest::Approx(0.95 / lambda_ref).epsilon(1e-4));
}

TEST_CASE("step bound scales inversely with the square of the operator") {
    const Grid g = build_grid(8, 8, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);
    const LaplacianSolver solver(t);
    Eigen::MatrixXd s(2, g.n_roi());
    s.row(0) = random_vec(g.n_roi(), 3).transpose();
    s.row(1) = random_vec(g.n_roi(), 4).transpose();
    const StepBound a = estimate_step_bound(s, solver, t);
    const StepBound b = estimate_step_bound(Eigen::MatrixXd(5.0 * s), solver, t);
    CHECK(b.lambda_max == doctest::Approx(25.0 * a.lambda_max).epsilon(1e-6));
    CHECK(b.step == doctest::Approx(a.step / 25.0).epsilon(1e-6));
}

TEST_CASE("power iteration rayleigh quotients do not decrease") {
    const Grid g = build_grid(10, 10, 0.45);
    const GradientTransforms t = build_gradient_transforms(g);
    const LaplacianSolver solver(t);
    Eigen::MatrixXd s(4, g.n_roi());
    for (int l = 0; l < 4; ++l) s.row(l) = random_vec(g.n_roi(), 40 + l).transpose();
    const StepBound b = estimate_step_bound(s, solver, t);
    REQUIRE(b.rayleigh.size() >= 2);
    for (size_t i = 1; i < b.rayleigh.size(); ++i)
        CHECK(b.rayleigh[i] >= b.rayleigh[i - 1] - 1e-9 * std::abs(b.rayleigh[i]));
}
