#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "ect/errors.hpp"
#include "ect/grid.hpp"

using namespace ect;

TEST_CASE("circular region pixel count tracks the disc area") {
    const Grid g = build_grid(64, 64, 0.45);
    const double r = 0.45 * 64;
    const double area = std::numbers::pi * r * r;
    CHECK(std::abs(g.n_roi() - area) <= 0.02 * area);

    // Independent recount from the strict-interior rule.
    int count = 0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            if ((i - 31.5) * (i - 31.5) + (j - 31.5) * (j - 31.5) < r * r) ++count;
    CHECK(g.n_roi() == count);
}

TEST_CASE("8x8 half-radius grid classifies pixels as expected") {
    const Grid g = build_grid(8, 8, 0.5);
    CHECK(g.n_roi() == 52);  // hand count of centers with (i-3.5)^2+(j-3.5)^2 < 16
    CHECK(g.is_roi(g.flat(3, 3)));
    CHECK(g.is_roi(g.flat(0, 3)));
    CHECK_FALSE(g.is_roi(g.flat(0, 0)));
    CHECK_FALSE(g.is_roi(g.flat(7, 7)));

    // The boundary ring is exterior and touches the region.
    for (int p : g.boundary_ring()) {
        CHECK_FALSE(g.is_roi(p));
        const int i = g.row_of(p), j = g.col_of(p);
        bool touches = false;
        const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d)
            if (g.in_lattice(i + di[d], j + dj[d]) && g.is_roi(g.flat(i + di[d], j + dj[d])))
                touches = true;
        CHECK(touches);
    }
}

TEST_CASE("grid construction is deterministic") {
    const Grid a = build_grid(32, 32, 0.45);
    const Grid b = build_grid(32, 32, 0.45);
    CHECK(a.roi_pixels() == b.roi_pixels());
    CHECK(a.boundary_ring() == b.boundary_ring());
}

TEST_CASE("roi indexing is a row-major bijection") {
    const Grid g = build_grid(16, 16, 0.4);
    int prev = -1;
    for (int k = 0; k < g.n_roi(); ++k) {
        const int p = g.roi_pixel(k);
        CHECK(p > prev);
        prev = p;
        CHECK(g.roi_index(p) == k);
    }
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(g.n_roi(), 0.0, 1.0);
    CHECK(g.restrict_to_roi(g.embed(x)).isApprox(x));
}

TEST_CASE("rectangle grids have no exterior") {
    const Grid g = Grid::rectangle(5, 7);
    CHECK(g.n_roi() == 35);
    CHECK(g.boundary_ring().empty());
    CHECK(g.roi_index(g.flat(4, 6)) == 34);
}

TEST_CASE("pixel angles run counter-clockwise from the +col axis") {
    const Grid g = build_grid(64, 64, 0.45);
    CHECK(g.pixel_angle(g.flat(31, 63)) == doctest::Approx(0.0).epsilon(0.05));
    CHECK(g.pixel_angle(g.flat(0, 31)) ==
          doctest::Approx(std::numbers::pi / 2).epsilon(0.05));
    CHECK(g.pixel_angle(g.flat(31, 0)) == doctest::Approx(std::numbers::pi).epsilon(0.05));
    CHECK(g.pixel_angle(g.flat(63, 31)) ==
          doctest::Approx(3 * std::numbers::pi / 2).epsilon(0.05));
}

TEST_CASE("electrode pair enumeration") {
    const Grid g = build_grid(64, 64, 0.45);
    for (int n : {2, 8, 12}) {
        const ElectrodeLayout layout = place_electrodes(g, n, 0.8);
        CHECK(layout.m() == n * (n - 1) / 2);
        CHECK(static_cast<int>(layout.pairs().size()) == layout.m());
        CHECK(layout.pairs().front() == std::pair<int, int>(0, 1));
        CHECK(layout.pairs().back() == std::pair<int, int>(n - 2, n - 1));
    }
    CHECK(place_electrodes(g, 8, 0.8).m() == 28);
    CHECK(place_electrodes(g, 12, 0.8).m() == 66);
}

TEST_CASE("electrodes sit on the boundary ring in angular slots") {
    const Grid g = build_grid(64, 64, 0.45);
    const ElectrodeLayout layout = place_electrodes(g, 12, 0.8);
    std::set<int> ring(g.boundary_ring().begin(), g.boundary_ring().end());
    const double slot = 2 * std::numbers::pi / 12;
    int covered = 0;
    for (int e = 0; e < 12; ++e) {
        CHECK_FALSE(layout.arcs[e].empty());
        for (int p : layout.arcs[e]) {
            CHECK(ring.count(p) == 1);
            CHECK(layout.electrode_of(p) == e);
            double delta = g.pixel_angle(p) - e * slot;
            if (delta > std::numbers::pi) delta -= 2 * std::numbers::pi;
            if (delta < -std::numbers::pi) delta += 2 * std::numbers::pi;
            CHECK(std::abs(delta) <= 0.5 * 0.8 * slot + 1e-12);
            ++covered;
        }
    }
    CHECK(covered > 12);                              // arcs are wider than one pixel
    CHECK(covered < static_cast<int>(ring.size()));   // gaps remain between electrodes
    CHECK(layout.electrode_of(g.roi_pixel(0)) == -1);
}

TEST_CASE("touching electrodes are rejected") {
    const Grid g = build_grid(16, 16, 0.45);
    // Two single-pixel electrodes on 4-adjacent ring sites.
    const auto& ring = g.boundary_ring();
    int a = -1, b = -1;
    for (size_t u = 0; u < ring.size() && a < 0; ++u)
        for (size_t v = u + 1; v < ring.size(); ++v) {
            const int du = std::abs(g.row_of(ring[u]) - g.row_of(ring[v]));
            const int dv = std::abs(g.col_of(ring[u]) - g.col_of(ring[v]));
            if (du + dv == 1) {
                a = ring[u];
                b = ring[v];
                break;
            }
        }
    REQUIRE(a >= 0);
    CHECK_THROWS_AS(ElectrodeLayout::from_arcs(g, {{a}, {b}}), GeometryError);
    CHECK_THROWS_AS(ElectrodeLayout::from_arcs(g, {{a}, {a}}), GeometryError);
    CHECK_THROWS_AS(ElectrodeLayout::from_arcs(g, {{a}, {g.roi_pixel(0)}}), GeometryError);
}

TEST_CASE("phantom rasterization hits the expected values") {
    const Grid g = build_grid(64, 64, 0.45);
    PhantomSpec spec;
    spec.background_eps = 3.3;
    spec.shapes.push_back({PhantomShape::Kind::Disc, 36, 26, 8, 0, 0, 0, 360, 1.0});
    spec.shapes.push_back({PhantomShape::Kind::Disc, 25, 41, 5, 0, 0, 0, 360, 1.22});
    const PermittivityField f = make_phantom(g, spec, 1.0, 3.3);
    CHECK(f.eps.minCoeff() == doctest::Approx(1.0));
    CHECK(f.eps.maxCoeff() == doctest::Approx(3.3));
    std::set<double> values;
    for (int k = 0; k < g.n_roi(); ++k) values.insert(f.eps[g.roi_pixel(k)]);
    CHECK(values == std::set<double>{1.0, 1.22, 3.3});
    CHECK(f.eps[g.flat(36, 26)] == doctest::Approx(1.0));
    CHECK(f.eps[g.flat(25, 41)] == doctest::Approx(1.22));
    CHECK(f.eps[g.flat(5, 31)] == doctest::Approx(3.3));
}

TEST_CASE("phantom shapes must stay inside the imaging region") {
    const Grid g = build_grid(64, 64, 0.45);
    PhantomSpec spec;
    spec.background_eps = 1.0;
    spec.shapes.push_back({PhantomShape::Kind::Disc, 31.5, 31.5, 40, 0, 0, 0, 360, 2.0});
    CHECK_THROWS_AS(make_phantom(g, spec, 1.0, 3.3), GeometryError);

    PhantomSpec bad_eps;
    bad_eps.background_eps = 1.0;
    bad_eps.shapes.push_back({PhantomShape::Kind::Disc, 31.5, 31.5, 4, 0, 0, 0, 360, 9.0});
    CHECK_THROWS_AS(make_phantom(g, bad_eps, 1.0, 3.3), ConfigError);
}

TEST_CASE("annular arc selects a radius band and angle interval") {
    const Grid g = build_grid(64, 64, 0.45);
    PhantomSpec spec;
    spec.background_eps = 1.0;
    spec.shapes.push_back(
        {PhantomShape::Kind::AnnularArc, 31.5, 31.5, 0, 18, 26, 30, 150, 2.0});
    const PermittivityField f = make_phantom(g, spec, 1.0, 3.0);
    // A point at radius 22, angle 90 deg lies inside the arc.
    CHECK(f.eps[g.flat(31 - 22, 31)] == doctest::Approx(2.0));
    // Outside the angular interval at the same radius.
    CHECK(f.eps[g.flat(31 + 22, 31)] == doctest::Approx(1.0));
    // Inside the angular interval but below r_inner.
    CHECK(f.eps[g.flat(31 - 10, 31)] == doctest::Approx(1.0));
}

TEST_CASE("normalization maps the permittivity range onto [0, 1]") {
    const Grid g = build_grid(32, 32, 0.45);
    PhantomSpec spec;
    spec.background_eps = 1.0;
    spec.shapes.push_back({PhantomShape::Kind::Disc, 15.5, 15.5, 4, 0, 0, 0, 360, 3.3});
    const PermittivityField f = make_phantom(g, spec, 1.0, 3.3);
    const Eigen::VectorXd x = normalized_image(g, f);
    CHECK(x.minCoeff() == doctest::Approx(0.0));
    CHECK(x.maxCoeff() == doctest::Approx(1.0));

    const PermittivityField back = denormalized_field(g, x, 1.0, 3.3, 1.0);
    for (int k = 0; k < g.n_roi(); ++k)
        CHECK(back.eps[g.roi_pixel(k)] == doctest::Approx(f.eps[g.roi_pixel(k)]));
}
