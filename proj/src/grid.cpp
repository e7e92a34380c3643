#include "ect/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ect/errors.hpp"

namespace ect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

}  // namespace

double Grid::pixel_angle(int p) const {
    // Image rows grow downward; flip the row axis so angles run counter-clockwise.
    const double dy = -(static_cast<double>(row_of(p)) - center_row);
    const double dx = static_cast<double>(col_of(p)) - center_col;
    return wrap_angle(std::atan2(dy, dx));
}

Eigen::VectorXd Grid::embed(const Eigen::VectorXd& x_roi) const {
    if (x_roi.size() != n_roi())
        throw std::invalid_argument("embed: ROI vector has wrong length");
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n_pixels());
    for (int k = 0; k < n_roi(); ++k) full[roi_flat_[static_cast<size_t>(k)]] = x_roi[k];
    return full;
}

Eigen::VectorXd Grid::restrict_to_roi(const Eigen::VectorXd& full) const {
    if (full.size() != n_pixels())
        throw std::invalid_argument("restrict_to_roi: image has wrong length");
    Eigen::VectorXd out(n_roi());
    for (int k = 0; k < n_roi(); ++k) out[k] = full[roi_flat_[static_cast<size_t>(k)]];
    return out;
}

void Grid::index_rois() {
    roi_flat_.clear();
    for (int p = 0; p < n_pixels(); ++p)
        if (roi_index_[static_cast<size_t>(p)] == 0) roi_flat_.push_back(p);
    // Re-number in row-major order.
    std::int32_t next = 0;
    for (std::int32_t p : roi_flat_) roi_index_[static_cast<size_t>(p)] = next++;
}

Grid Grid::rectangle(int n1, int n2, double pitch) {
    if (n1 < 1 || n2 < 1) throw GeometryError("grid dimensions must be positive");
    if (pitch <= 0.0) throw GeometryError("pixel pitch must be positive");
    Grid g;
    g.n1 = n1;
    g.n2 = n2;
    g.pitch = pitch;
    g.center_row = (n1 - 1) / 2.0;
    g.center_col = (n2 - 1) / 2.0;
    g.roi_radius = 0.0;
    g.roi_index_.assign(static_cast<size_t>(g.n_pixels()), 0);
    g.index_rois();
    return g;
}

Grid Grid::framed_rectangle(int n1, int n2, double pitch) {
    if (n1 < 3 || n2 < 3) throw GeometryError("framed rectangle needs at least 3x3 pixels");
    if (pitch <= 0.0) throw GeometryError("pixel pitch must be positive");
    Grid g;
    g.n1 = n1;
    g.n2 = n2;
    g.pitch = pitch;
    g.center_row = (n1 - 1) / 2.0;
    g.center_col = (n2 - 1) / 2.0;
    g.roi_radius = 0.0;
    g.roi_index_.assign(static_cast<size_t>(g.n_pixels()), -1);
    for (int i = 1; i < n1 - 1; ++i)
        for (int j = 1; j < n2 - 1; ++j) g.roi_index_[static_cast<size_t>(g.flat(i, j))] = 0;
    g.index_rois();
    for (int p = 0; p < g.n_pixels(); ++p) {
        if (g.is_roi(p)) continue;
        const int i = g.row_of(p), j = g.col_of(p);
        static constexpr int di4[4] = {-1, 1, 0, 0};
        static constexpr int dj4[4] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
            const int ii = i + di4[d], jj = j + dj4[d];
            if (g.in_lattice(ii, jj) && g.is_roi(g.flat(ii, jj))) {
                g.ring_.push_back(p);
                break;
            }
        }
    }
    return g;
}

Grid build_grid(int n1, int n2, double roi_radius_frac, double pitch) {
    if (n1 < 4 || n2 < 4) throw GeometryError("grid too small for a circular region");
    if (pitch <= 0.0) throw GeometryError("pixel pitch must be positive");
    if (roi_radius_frac <= 0.0 || roi_radius_frac > 0.5)
        throw GeometryError("roi_radius_frac must lie in (0, 0.5]");

    Grid g;
    g.n1 = n1;
    g.n2 = n2;
    g.pitch = pitch;
    g.center_row = (n1 - 1) / 2.0;
    g.center_col = (n2 - 1) / 2.0;
    const double r_px = roi_radius_frac * std::min(n1, n2);
    g.roi_radius = r_px * pitch;

    g.roi_index_.assign(static_cast<size_t>(g.n_pixels()), -1);
    const double r2 = r_px * r_px;
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const double di = i - g.center_row;
            const double dj = j - g.center_col;
            if (di * di + dj * dj < r2) g.roi_index_[static_cast<size_t>(g.flat(i, j))] = 0;
        }
    }
    g.index_rois();
    if (g.n_roi() == 0) throw GeometryError("circular region contains no pixel centers");

    // Exterior pixels with a 4-neighbor inside the region form the boundary ring.
    static constexpr int di4[4] = {-1, 1, 0, 0};
    static constexpr int dj4[4] = {0, 0, -1, 1};
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const int p = g.flat(i, j);
            if (g.is_roi(p)) continue;
            for (int d = 0; d < 4; ++d) {
                const int ii = i + di4[d], jj = j + dj4[d];
                if (g.in_lattice(ii, jj) && g.is_roi(g.flat(ii, jj))) {
                    g.ring_.push_back(p);
                    break;
                }
            }
        }
    }
    return g;
}

void ElectrodeLayout::finalize(const Grid& grid) {
    n_electrodes = static_cast<int>(arcs.size());
    electrode_of_.assign(static_cast<size_t>(grid.n_pixels()), -1);
    for (int e = 0; e < n_electrodes; ++e) {
        if (arcs[static_cast<size_t>(e)].empty())
            throw GeometryError("electrode " + std::to_string(e + 1) + " covers no pixels");
        for (std::int32_t p : arcs[static_cast<size_t>(e)]) {
            if (p < 0 || p >= grid.n_pixels())
                throw GeometryError("electrode pixel outside the lattice");
            if (grid.is_roi(p))
                throw GeometryError("electrode pixel inside the imaging region");
            auto& slot = electrode_of_[static_cast<size_t>(p)];
            if (slot >= 0) throw GeometryError("electrode pixel assigned twice");
            slot = static_cast<std::int32_t>(e);
        }
    }
    // Distinct electrodes must not touch; a shared face would short them.
    static constexpr int di4[4] = {-1, 1, 0, 0};
    static constexpr int dj4[4] = {0, 0, -1, 1};
    for (int p = 0; p < grid.n_pixels(); ++p) {
        const int e = electrode_of(p);
        if (e < 0) continue;
        const int i = grid.row_of(p), j = grid.col_of(p);
        for (int d = 0; d < 4; ++d) {
            const int ii = i + di4[d], jj = j + dj4[d];
            if (!grid.in_lattice(ii, jj)) continue;
            const int e2 = electrode_of(grid.flat(ii, jj));
            if (e2 >= 0 && e2 != e)
                throw GeometryError("electrodes " + std::to_string(e + 1) + " and " +
                                    std::to_string(e2 + 1) + " are adjacent");
        }
    }
    pairs_.clear();
    for (int a = 0; a < n_electrodes; ++a)
        for (int b = a + 1; b < n_electrodes; ++b) pairs_.emplace_back(a, b);
}

ElectrodeLayout ElectrodeLayout::from_arcs(const Grid& grid,
                                           std::vector<std::vector<std::int32_t>> arcs,
                                           double v_c) {
    if (arcs.size() < 2) throw GeometryError("need at least two electrodes");
    if (v_c <= 0.0) throw GeometryError("excitation potential must be positive");
    ElectrodeLayout layout;
    layout.arcs = std::move(arcs);
    layout.v_c = v_c;
    layout.coverage_frac = 0.0;
    layout.finalize(grid);
    return layout;
}

ElectrodeLayout place_electrodes(const Grid& grid, int n, double coverage_frac, double v_c) {
    if (n < 2) throw GeometryError("need at least two electrodes");
    if (coverage_frac <= 0.0 || coverage_frac >= 1.0)
        throw GeometryError("electrode coverage fraction must lie in (0, 1)");
    if (v_c <= 0.0) throw GeometryError("excitation potential must be positive");
    if (grid.boundary_ring().empty())
        throw GeometryError("grid has no boundary ring to place electrodes on");

    ElectrodeLayout layout;
    layout.coverage_frac = coverage_frac;
    layout.v_c = v_c;
    layout.arcs.assign(static_cast<size_t>(n), {});

    // Electrode k spans an angular interval of width coverage * 2*pi/n centered
    // at k * 2*pi/n, counter-clockwise from the +col axis.
    const double slot = kTwoPi / n;
    const double half_width = 0.5 * coverage_frac * slot;
    for (std::int32_t p : grid.boundary_ring()) {
        const double a = grid.pixel_angle(p);
        const int k = static_cast<int>(std::lround(a / slot)) % n;
        double delta = a - k * slot;
        if (delta > std::numbers::pi) delta -= kTwoPi;
        if (delta < -std::numbers::pi) delta += kTwoPi;
        if (std::abs(delta) <= half_width) layout.arcs[static_cast<size_t>(k)].push_back(p);
    }
    for (auto& arc : layout.arcs) std::sort(arc.begin(), arc.end());
    layout.finalize(grid);
    return layout;
}

PermittivityField PermittivityField::uniform(const Grid& grid, double value, double eps_low,
                                             double eps_high) {
    if (eps_high <= eps_low) throw ConfigError("eps_high must exceed eps_low");
    PermittivityField f;
    f.eps = Eigen::VectorXd::Constant(grid.n_pixels(), value);
    f.eps_low = eps_low;
    f.eps_high = eps_high;
    return f;
}

Eigen::VectorXd normalized_image(const Grid& grid, const PermittivityField& field) {
    const double span = field.eps_high - field.eps_low;
    if (span <= 0.0) throw ConfigError("eps_high must exceed eps_low");
    Eigen::VectorXd x(grid.n_roi());
    for (int k = 0; k < grid.n_roi(); ++k)
        x[k] = (field.eps[grid.roi_pixel(k)] - field.eps_low) / span;
    return x;
}

PermittivityField denormalized_field(const Grid& grid, const Eigen::VectorXd& x_roi,
                                     double eps_low, double eps_high, double wall_eps) {
    if (eps_high <= eps_low) throw ConfigError("eps_high must exceed eps_low");
    if (x_roi.size() != grid.n_roi())
        throw std::invalid_argument("denormalized_field: ROI vector has wrong length");
    PermittivityField f;
    f.eps_low = eps_low;
    f.eps_high = eps_high;
    f.eps = Eigen::VectorXd::Constant(grid.n_pixels(), wall_eps);
    for (int k = 0; k < grid.n_roi(); ++k)
        f.eps[grid.roi_pixel(k)] = eps_low + x_roi[k] * (eps_high - eps_low);
    return f;
}

namespace {

bool inside_shape(const Grid& grid, const PhantomShape& s, int i, int j) {
    const double di = i - s.center_row;
    const double dj = j - s.center_col;
    const double r = std::sqrt(di * di + dj * dj);
    switch (s.kind) {
        case PhantomShape::Kind::Disc:
            return r <= s.radius;
        case PhantomShape::Kind::AnnularArc: {
            if (r < s.r_inner || r > s.r_outer) return false;
            const double a = wrap_angle(std::atan2(-di, dj));
            double lo = s.theta_start_deg * std::numbers::pi / 180.0;
            double hi = s.theta_end_deg * std::numbers::pi / 180.0;
            if (hi - lo >= kTwoPi) return true;
            lo = wrap_angle(lo);
            hi = wrap_angle(hi);
            if (lo <= hi) return a >= lo && a <= hi;
            return a >= lo || a <= hi;  // interval wraps through zero
        }
    }
    (void)grid;
    return false;
}

void check_eps_range(double eps, double eps_low, double eps_high, const char* what) {
    if (eps < eps_low || eps > eps_high)
        throw ConfigError(std::string(what) + " permittivity " + std::to_string(eps) +
                          " outside [" + std::to_string(eps_low) + ", " +
                          std::to_string(eps_high) + "]");
}

}  // namespace

PermittivityField make_phantom(const Grid& grid, const PhantomSpec& spec, double eps_low,
                               double eps_high) {
    if (eps_high <= eps_low) throw ConfigError("eps_high must exceed eps_low");
    check_eps_range(spec.background_eps, eps_low, eps_high, "background");
    const double wall = spec.wall_eps < 0.0 ? spec.background_eps : spec.wall_eps;
    for (const auto& s : spec.shapes) {
        check_eps_range(s.eps, eps_low, eps_high, "shape");
        if (s.kind == PhantomShape::Kind::Disc) {
            if (s.radius <= 0.0) throw GeometryError("disc radius must be positive");
        } else {
            if (s.r_inner < 0.0 || s.r_outer <= s.r_inner)
                throw GeometryError("annular arc needs 0 <= r_inner < r_outer");
        }
    }

    PermittivityField f;
    f.eps_low = eps_low;
    f.eps_high = eps_high;
    f.eps = Eigen::VectorXd::Constant(grid.n_pixels(), wall);
    for (int k = 0; k < grid.n_roi(); ++k) f.eps[grid.roi_pixel(k)] = spec.background_eps;

    for (const auto& s : spec.shapes) {
        bool hit_roi = false;
        for (int i = 0; i < grid.n1; ++i) {
            for (int j = 0; j < grid.n2; ++j) {
                if (!inside_shape(grid, s, i, j)) continue;
                const int p = grid.flat(i, j);
                if (!grid.is_roi(p))
                    throw GeometryError("phantom shape extends outside the imaging region");
                f.eps[p] = s.eps;
                hit_roi = true;
            }
        }
        if (!hit_roi) throw GeometryError("phantom shape covers no pixels");
    }
    return f;
}

}  // namespace ect
