#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ect/grid.hpp"

namespace ect {

/// Which side of the threshold counts as object material.
enum class Polarity { Bright, Dark };

/// One connected component of a segmented image.
struct ObjectReport {
    int label = 0;               ///< Position in the area-sorted component list.
    int pixel_count = 0;
    double mean_intensity = 0.0;  ///< Mean normalized value over the component.
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    std::vector<int> pixels;      ///< Region-frame indices of member pixels.
};

/// Outcome for a single ground-truth object after matching.
struct MatchReport {
    int truth_label = -1;
    int truth_pixels = 0;
    int recon_label = -1;        ///< -1 when no reconstruction object matched.
    int recon_pixels = 0;
    double size_error = 0.0;     ///< |recon area - truth area| / truth area.
    double recovered_eps = 0.0;  ///< Denormalized mean over the matched object.
    bool merged = false;         ///< Matched object is shared with another truth object.
    bool split = false;          ///< Extra unmatched components sit nearest this object.
};

struct TruthComparison {
    std::vector<ObjectReport> truth_objects;
    std::vector<ObjectReport> recon_objects;
    std::vector<MatchReport> matches;  ///< One entry per truth object.
    bool any_merged = false;
    bool any_split = false;
};

/// l2 distance between images relative to the reference norm.
double relative_image_error(const Eigen::VectorXd& x, const Eigen::VectorXd& x_true);

/// 4-connected components beyond the threshold, largest first; specks under
/// four pixels are dropped as noise.
std::vector<ObjectReport> segment_objects(const Eigen::VectorXd& x, const Grid& grid,
                                          double threshold, Polarity polarity);

/// Segments both images and pairs truth objects with their nearest
/// reconstructed counterparts by centroid distance.
TruthComparison evaluate_against_truth(const Eigen::VectorXd& recon,
                                       const PermittivityField& truth, const Grid& grid,
                                       double threshold, Polarity polarity);

}  // namespace ect
