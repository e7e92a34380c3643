#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "ect/config.hpp"
#include "ect/forward.hpp"
#include "ect/metrics.hpp"

namespace ect {

/// Calibration data: uniform-state capacitances plus the sensitivity matrix
/// linearized at the configured reference state.
struct Calibration {
    CapacitanceVector c_low;
    CapacitanceVector c_high;
    SensitivityMatrix s;
    bool from_cache = false;
    std::filesystem::path dir;  ///< Cache entry holding the stored files.
};

/// Loads the calibration from the on-disk cache or computes and stores it.
/// The cache root comes from ECT_CACHE_DIR, defaulting to ".ect_cache".
Calibration calibrate(const ExperimentConfig& cfg);

struct SolverOutcome {
    std::string name;
    bool ok = false;
    std::string message;
    double wall_seconds = 0.0;
    Eigen::VectorXd x;  ///< Normalized image over the region, low-state frame.
};

struct ExperimentResult {
    std::filesystem::path out_dir;
    std::vector<SolverOutcome> outcomes;
    bool all_ok = false;
};

/// Runs every configured solver on the simulated measurements and writes
/// images, traces, metric reports, and a checksummed manifest under out_dir.
/// `only` restricts execution to the named solvers (empty = all).
/// `out_override` replaces cfg.output_dir when non-empty.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::vector<std::string>& only = {},
                                const std::string& out_override = {});

}  // namespace ect
