#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

namespace ect {

enum class PixelClass : std::uint8_t { Roi, Exterior, Electrode };

/// Discretized sensor cross-section: a pixel lattice with a circular imaging
/// region (ROI). Pixels whose centers lie strictly inside the ROI disc are the
/// reconstruction unknowns; everything else is exterior (vessel wall).
/// Immutable after construction.
class Grid {
public:
    int n1 = 0;               ///< rows
    int n2 = 0;               ///< cols
    double pitch = 1.0;       ///< physical pixel size (m)
    double center_row = 0.0;  ///< continuous pixel coordinates
    double center_col = 0.0;
    double roi_radius = 0.0;  ///< imaging-region radius (m); 0 for rectangular domains

    int n_pixels() const { return n1 * n2; }
    int n_roi() const { return static_cast<int>(roi_flat_.size()); }
    double roi_radius_px() const { return roi_radius / pitch; }

    int flat(int i, int j) const { return i * n2 + j; }
    int row_of(int p) const { return p / n2; }
    int col_of(int p) const { return p % n2; }
    bool in_lattice(int i, int j) const { return i >= 0 && i < n1 && j >= 0 && j < n2; }

    bool is_roi(int p) const { return roi_index_[static_cast<size_t>(p)] >= 0; }
    /// ROI ordinal of a flat pixel index, or -1.
    int roi_index(int p) const { return roi_index_[static_cast<size_t>(p)]; }
    /// Flat pixel index of the k-th ROI pixel.
    int roi_pixel(int k) const { return roi_flat_[static_cast<size_t>(k)]; }
    const std::vector<std::int32_t>& roi_pixels() const { return roi_flat_; }

    /// Exterior pixels 4-adjacent to the ROI; the sites electrodes occupy.
    const std::vector<std::int32_t>& boundary_ring() const { return ring_; }

    /// Angle of a pixel center around the grid center, CCW in [0, 2*pi),
    /// zero along +col.
    double pixel_angle(int p) const;

    /// Scatter an ROI vector into a full n1*n2 image (zeros outside the ROI).
    Eigen::VectorXd embed(const Eigen::VectorXd& x_roi) const;
    /// Gather ROI pixels from a full n1*n2 image.
    Eigen::VectorXd restrict_to_roi(const Eigen::VectorXd& full) const;

    /// Rectangular domain where every pixel is ROI; no boundary ring.
    static Grid rectangle(int n1, int n2, double pitch = 1.0);

    /// Rectangular interior ROI surrounded by a one-pixel exterior frame;
    /// electrodes can occupy frame pixels (slab-capacitor fixtures).
    static Grid framed_rectangle(int n1, int n2, double pitch = 1.0);

    friend Grid build_grid(int n1, int n2, double roi_radius_frac, double pitch);

private:
    std::vector<std::int32_t> roi_index_;  // flat -> ROI ordinal or -1
    std::vector<std::int32_t> roi_flat_;   // ROI ordinal -> flat
    std::vector<std::int32_t> ring_;
    void index_rois();
};

/// Builds the circular-ROI grid. roi_radius_frac is relative to
/// min(n1, n2) * pitch; a pixel belongs to the ROI iff its center lies
/// strictly inside the disc.
Grid build_grid(int n1, int n2, double roi_radius_frac, double pitch = 1.0);

/// Peripheral electrodes as disjoint arcs of the ROI boundary ring,
/// equally spaced starting at angle 0, ordered counter-clockwise.
class ElectrodeLayout {
public:
    int n_electrodes = 0;
    double coverage_frac = 0.8;  ///< fraction of circumference covered by metal
    double v_c = 1.0;            ///< excitation potential (V)
    std::vector<std::vector<std::int32_t>> arcs;  ///< boundary pixel sets per electrode

    /// Independent pair count M = n(n-1)/2.
    int m() const { return n_electrodes * (n_electrodes - 1) / 2; }

    /// Pair ordering (0,1), (0,2), ..., (n-2,n-1).
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

    /// Electrode owning a flat pixel index, or -1.
    int electrode_of(int p) const { return electrode_of_[static_cast<size_t>(p)]; }
    bool is_electrode(int p) const { return electrode_of(p) >= 0; }

    PixelClass pixel_class(const Grid& grid, int p) const {
        if (is_electrode(p)) return PixelClass::Electrode;
        return grid.is_roi(p) ? PixelClass::Roi : PixelClass::Exterior;
    }

    /// Constructs from explicit pixel sets (test fixtures use this directly).
    static ElectrodeLayout from_arcs(const Grid& grid,
                                     std::vector<std::vector<std::int32_t>> arcs,
                                     double v_c = 1.0);

    friend ElectrodeLayout place_electrodes(const Grid& grid, int n, double coverage_frac,
                                            double v_c);

private:
    std::vector<std::pair<int, int>> pairs_;
    std::vector<std::int32_t> electrode_of_;
    void finalize(const Grid& grid);
};

ElectrodeLayout place_electrodes(const Grid& grid, int n, double coverage_frac = 0.8,
                                 double v_c = 1.0);

/// Per-pixel relative permittivity over the full lattice plus the
/// normalization range [eps_low, eps_high].
struct PermittivityField {
    Eigen::VectorXd eps;  ///< length n1*n2
    double eps_low = 1.0;
    double eps_high = 2.0;

    static PermittivityField uniform(const Grid& grid, double value, double eps_low,
                                     double eps_high);
};

/// Normalized image x on the ROI: x = (eps - eps_low)/(eps_high - eps_low).
Eigen::VectorXd normalized_image(const Grid& grid, const PermittivityField& field);

/// Inverse of normalized_image on the ROI; exterior pixels take wall_eps.
PermittivityField denormalized_field(const Grid& grid, const Eigen::VectorXd& x_roi,
                                     double eps_low, double eps_high, double wall_eps);

struct PhantomShape {
    enum class Kind { Disc, AnnularArc } kind = Kind::Disc;
    double center_row = 0.0, center_col = 0.0;  // pixel coordinates
    double radius = 0.0;                        // disc
    double r_inner = 0.0, r_outer = 0.0;        // annular arc
    double theta_start_deg = 0.0, theta_end_deg = 360.0;  // CCW from +col axis
    double eps = 1.0;
};

struct PhantomSpec {
    double background_eps = 1.0;  ///< fills the ROI outside all shapes
    double wall_eps = -1.0;       ///< exterior annulus; <0 means background_eps
    std::vector<PhantomShape> shapes;  ///< later shapes overwrite earlier ones
};

/// Rasterizes the phantom at pixel centers (no anti-aliasing). Shapes must lie
/// inside the ROI and all permittivities inside [eps_low, eps_high].
PermittivityField make_phantom(const Grid& grid, const PhantomSpec& spec, double eps_low,
                               double eps_high);

}  // namespace ect
