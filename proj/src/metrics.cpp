#include "ect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "ect/errors.hpp"

namespace ect {

double relative_image_error(const Eigen::VectorXd& x, const Eigen::VectorXd& x_true) {
    if (x.size() != x_true.size())
        throw std::invalid_argument("relative_image_error: lengths disagree");
    const double ref = x_true.norm();
    if (ref == 0.0)
        throw std::invalid_argument("relative_image_error: reference image is all zero");
    return (x - x_true).norm() / ref;
}

namespace {

constexpr int kMinObjectPixels = 4;

bool selected(double value, double threshold, Polarity polarity) {
    return polarity == Polarity::Bright ? value > threshold : value < threshold;
}

}  // namespace

std::vector<ObjectReport> segment_objects(const Eigen::VectorXd& x, const Grid& grid,
                                          double threshold, Polarity polarity) {
    if (x.size() != grid.n_roi())
        throw std::invalid_argument("segment_objects: image length does not match region");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("segmentation threshold must lie strictly between 0 and 1");

    std::vector<int> component(static_cast<size_t>(grid.n_roi()), -1);
    std::vector<ObjectReport> objects;

    for (int seed = 0; seed < grid.n_roi(); ++seed) {
        if (component[seed] >= 0 || !selected(x[seed], threshold, polarity)) continue;
        ObjectReport obj;
        obj.label = static_cast<int>(objects.size());
        std::queue<int> frontier;
        frontier.push(seed);
        component[seed] = obj.label;
        while (!frontier.empty()) {
            const int p = frontier.front();
            frontier.pop();
            obj.pixels.push_back(p);
            const int flat = grid.roi_pixel(p);
            const int row = grid.row_of(flat);
            const int col = grid.col_of(flat);
            obj.mean_intensity += x[p];
            obj.centroid_row += row;
            obj.centroid_col += col;
            const int dr[4] = {-1, 1, 0, 0};
            const int dc[4] = {0, 0, -1, 1};
            for (int d = 0; d < 4; ++d) {
                const int nr = row + dr[d];
                const int nc = col + dc[d];
                if (!grid.in_lattice(nr, nc)) continue;
                const int q = grid.roi_index(grid.flat(nr, nc));
                if (q < 0 || component[q] >= 0) continue;
                if (!selected(x[q], threshold, polarity)) continue;
                component[q] = obj.label;
                frontier.push(q);
            }
        }
        obj.pixel_count = static_cast<int>(obj.pixels.size());
        obj.mean_intensity /= obj.pixel_count;
        obj.centroid_row /= obj.pixel_count;
        obj.centroid_col /= obj.pixel_count;
        objects.push_back(std::move(obj));
    }

    std::erase_if(objects, [](const ObjectReport& o) { return o.pixel_count < kMinObjectPixels; });
    std::stable_sort(objects.begin(), objects.end(),
                     [](const ObjectReport& a, const ObjectReport& b) {
                         return a.pixel_count > b.pixel_count;
                     });
    for (size_t i = 0; i < objects.size(); ++i) objects[i].label = static_cast<int>(i);
    return objects;
}

TruthComparison evaluate_against_truth(const Eigen::VectorXd& recon,
                                       const PermittivityField& truth, const Grid& grid,
                                       double threshold, Polarity polarity) {
    TruthComparison out;
    const Eigen::VectorXd truth_image = normalized_image(grid, truth);
    out.truth_objects = segment_objects(truth_image, grid, threshold, polarity);
    if (out.truth_objects.empty())
        throw ConfigError("evaluate_against_truth: no truth object under this threshold");
    out.recon_objects = segment_objects(recon, grid, threshold, polarity);

    auto dist2 = [](const ObjectReport& a, const ObjectReport& b) {
        const double dr = a.centroid_row - b.centroid_row;
        const double dc = a.centroid_col - b.centroid_col;
        return dr * dr + dc * dc;
    };

    // Truth objects pick their nearest reconstructed component, largest truth
    // object first; two truth objects landing on the same component means the
    // reconstruction merged them.
    std::vector<int> chosen_by(out.recon_objects.size(), 0);
    out.matches.resize(out.truth_objects.size());
    for (size_t ti = 0; ti < out.truth_objects.size(); ++ti) {
        const ObjectReport& t = out.truth_objects[ti];
        MatchReport& m = out.matches[ti];
        m.truth_label = t.label;
        m.truth_pixels = t.pixel_count;
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t ri = 0; ri < out.recon_objects.size(); ++ri) {
            const double d = dist2(t, out.recon_objects[ri]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(ri);
            }
        }
        if (best < 0) {
            m.size_error = 1.0;  // nothing recovered: full loss of the object
            continue;
        }
        const ObjectReport& r = out.recon_objects[best];
        chosen_by[best] += 1;
        m.recon_label = r.label;
        m.recon_pixels = r.pixel_count;
        m.size_error = std::abs(r.pixel_count - t.pixel_count) / double(t.pixel_count);
        m.recovered_eps =
            truth.eps_low + r.mean_intensity * (truth.eps_high - truth.eps_low);
    }

    for (MatchReport& m : out.matches)
        if (m.recon_label >= 0 && chosen_by[m.recon_label] >= 2) m.merged = true;

    // A leftover component whose nearest truth object already has a partner
    // indicates that object was split across several pieces.
    for (size_t ri = 0; ri < out.recon_objects.size(); ++ri) {
        if (chosen_by[ri] > 0) continue;
        int nearest = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t ti = 0; ti < out.truth_objects.size(); ++ti) {
            const double d = dist2(out.truth_objects[ti], out.recon_objects[ri]);
            if (d < best_d) {
                best_d = d;
                nearest = static_cast<int>(ti);
            }
        }
        if (nearest >= 0 && out.matches[nearest].recon_label >= 0)
            out.matches[nearest].split = true;
    }

    for (const MatchReport& m : out.matches) {
        out.any_merged = out.any_merged || m.merged;
        out.any_split = out.any_split || m.split;
    }
    return out;
}

}  // namespace ect
