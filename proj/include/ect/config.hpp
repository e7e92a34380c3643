#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ect/baseline.hpp"
#include "ect/forward.hpp"
#include "ect/grid.hpp"
#include "ect/metrics.hpp"
#include "ect/tv.hpp"

namespace ect {

enum class SolverKind { Lbp, Landweber, Art, Sirt, TvIst, TvFist };

/// One solver entry from the experiment config; the kind decides which of the
/// parameter blocks applies.
struct SolverSpec {
    std::string name;  ///< Output subdirectory; unique within the experiment.
    SolverKind kind = SolverKind::Lbp;
    BaselineConfig baseline;
    TvConfig tv;
    bool reweight = false;  ///< Periodic weight refresh for the tv kinds.
};

struct GridSpec {
    int n1 = 64;
    int n2 = 64;
    double roi_radius_frac = 0.45;
    double pitch = 1.0;
};

struct ElectrodeSpec {
    int count = 8;
    double coverage_frac = 0.8;
    double v_c = 1.0;
};

/// Calibration range and which uniform state the linearization is taken at.
struct PermittivitySpec {
    double low = 1.0;
    double high = 3.0;
    bool reference_high = false;
};

struct NoiseSpec {
    bool enabled = false;
    double snr_db = 0.0;
    unsigned long long seed = 0;
};

struct MetricsSpec {
    double threshold = 0.5;
    Polarity polarity = Polarity::Bright;
};

struct ExperimentConfig {
    GridSpec grid;
    ElectrodeSpec electrodes;
    PermittivitySpec permittivity;
    PhantomSpec phantom;
    NoiseSpec noise;
    SolveOptions forward;
    MetricsSpec metrics;
    std::vector<SolverSpec> solvers;
    std::string output_dir = "out";
};

/// Parses and validates the JSON experiment description. Unknown keys anywhere
/// are rejected with their dotted path; so are missing required fields.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical digest of everything the calibration outputs depend on.
std::string calibration_key(const ExperimentConfig& cfg);

}  // namespace ect
