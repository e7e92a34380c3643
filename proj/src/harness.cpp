#include "ect/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include <json.hpp>

#include "ect/baseline.hpp"
#include "ect/errors.hpp"
#include "ect/io.hpp"
#include "ect/operators.hpp"
#include "ect/tv.hpp"

namespace ect {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double effective_wall(const ExperimentConfig& cfg) {
    return cfg.phantom.wall_eps >= 0.0 ? cfg.phantom.wall_eps
                                       : cfg.phantom.background_eps;
}

/// Uniform in-region state embedded in the operational wall.
PermittivityField uniform_state(const Grid& grid, const ExperimentConfig& cfg,
                                double value) {
    PhantomSpec spec;
    spec.background_eps = value;
    spec.wall_eps = effective_wall(cfg);
    return make_phantom(grid, spec, std::min(value, cfg.permittivity.low),
                        std::max(value, cfg.permittivity.high));
}

fs::path cache_root() {
    if (const char* env = std::getenv("ECT_CACHE_DIR")) return fs::path(env);
    return fs::path(".ect_cache");
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::out | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Full-lattice matrix view of a region image (exterior zero).
Eigen::MatrixXd embedded_matrix(const Grid& grid, const Eigen::VectorXd& x_roi) {
    const Eigen::VectorXd full = grid.embed(x_roi);
    Eigen::MatrixXd m(grid.n1, grid.n2);
    for (int i = 0; i < grid.n1; ++i)
        for (int j = 0; j < grid.n2; ++j) m(i, j) = full[grid.flat(i, j)];
    return m;
}

struct CalibrationFiles {
    fs::path c_low, c_high, sensitivity, pairs, meta;
    explicit CalibrationFiles(const fs::path& dir)
        : c_low(dir / "c_low.csv"),
          c_high(dir / "c_high.csv"),
          sensitivity(dir / "sensitivity.csv"),
          pairs(dir / "pairs.csv"),
          meta(dir / "meta.json") {}
    bool all_present() const {
        return fs::exists(c_low) && fs::exists(c_high) && fs::exists(sensitivity) &&
               fs::exists(pairs) && fs::exists(meta);
    }
};

json metrics_to_json(const TruthComparison& cmp, double rel_error,
                     const MetricsSpec& spec) {
    json j;
    j["relative_image_error"] = rel_error;
    j["threshold"] = spec.threshold;
    j["polarity"] = spec.polarity == Polarity::Bright ? "bright" : "dark";
    j["truth_object_count"] = cmp.truth_objects.size();
    j["recon_object_count"] = cmp.recon_objects.size();
    j["any_merged"] = cmp.any_merged;
    j["any_split"] = cmp.any_split;
    auto object_json = [](const ObjectReport& o) {
        json e;
        e["label"] = o.label;
        e["pixel_count"] = o.pixel_count;
        e["mean_intensity"] = o.mean_intensity;
        e["centroid_row"] = o.centroid_row;
        e["centroid_col"] = o.centroid_col;
        return e;
    };
    j["recon_objects"] = json::array();
    for (const auto& o : cmp.recon_objects) j["recon_objects"].push_back(object_json(o));
    j["matches"] = json::array();
    for (const auto& m : cmp.matches) {
        json e;
        e["truth_label"] = m.truth_label;
        e["truth_pixels"] = m.truth_pixels;
        e["recon_label"] = m.recon_label;
        e["recon_pixels"] = m.recon_pixels;
        e["size_error"] = m.size_error;
        e["recovered_eps"] = m.recovered_eps;
        e["merged"] = m.merged;
        e["split"] = m.split;
        j["matches"].push_back(e);
    }
    return j;
}

}  // namespace

Calibration calibrate(const ExperimentConfig& cfg) {
    const Grid grid =
        build_grid(cfg.grid.n1, cfg.grid.n2, cfg.grid.roi_radius_frac, cfg.grid.pitch);
    const ElectrodeLayout layout = place_electrodes(
        grid, cfg.electrodes.count, cfg.electrodes.coverage_frac, cfg.electrodes.v_c);

    Calibration cal;
    const std::string key = calibration_key(cfg);
    cal.dir = cache_root() / key;
    const CalibrationFiles files(cal.dir);

    if (files.all_present()) {
        cal.c_low.c = read_vector_csv(files.c_low);
        cal.c_high.c = read_vector_csv(files.c_high);
        cal.c_low.pairs = cal.c_high.pairs = read_pairs_csv(files.pairs);
        cal.s.s = read_matrix_csv(files.sensitivity);
        cal.s.pairs = cal.c_low.pairs;
        if (cal.c_low.c.size() != layout.m() || cal.s.s.rows() != layout.m() ||
            cal.s.s.cols() != grid.n_roi())
            throw CalibrationError("cache entry " + key +
                                   " does not match the configured geometry");
        cal.from_cache = true;
        return cal;
    }

    const PermittivityField low = uniform_state(grid, cfg, cfg.permittivity.low);
    const PermittivityField high = uniform_state(grid, cfg, cfg.permittivity.high);
    cal.c_low = capacitance_vector(low, grid, layout, cfg.forward);
    cal.c_high = capacitance_vector(high, grid, layout, cfg.forward);
    const PermittivityField& base = cfg.permittivity.reference_high ? high : low;
    cal.s = sensitivity_matrix(base, grid, layout, cal.c_low, cal.c_high, cfg.forward);

    fs::create_directories(cal.dir);
    write_vector_csv(files.c_low, cal.c_low.c);
    write_vector_csv(files.c_high, cal.c_high.c);
    write_matrix_csv(files.sensitivity, cal.s.s);
    write_pairs_csv(files.pairs, cal.c_low.pairs);
    json meta;
    meta["key"] = key;
    meta["rows"] = cal.s.s.rows();
    meta["cols"] = cal.s.s.cols();
    meta["reference_state"] = cfg.permittivity.reference_high ? "high" : "low";
    meta["sensitivity_sha256"] = sha256_file(files.sensitivity);
    write_json(files.meta, meta);
    return cal;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::vector<std::string>& only,
                                const std::string& out_override) {
    std::vector<SolverSpec> selected;
    if (only.empty()) {
        selected = cfg.solvers;
    } else {
        const std::set<std::string> wanted(only.begin(), only.end());
        for (const auto& name : wanted) {
            const bool known =
                std::any_of(cfg.solvers.begin(), cfg.solvers.end(),
                            [&](const SolverSpec& s) { return s.name == name; });
            if (!known)
                throw ConfigError("unknown solver \"" + name + "\" requested");
        }
        for (const auto& s : cfg.solvers)
            if (wanted.count(s.name)) selected.push_back(s);
    }

    const Grid grid =
        build_grid(cfg.grid.n1, cfg.grid.n2, cfg.grid.roi_radius_frac, cfg.grid.pitch);
    const ElectrodeLayout layout = place_electrodes(
        grid, cfg.electrodes.count, cfg.electrodes.coverage_frac, cfg.electrodes.v_c);
    const PermittivityField truth =
        make_phantom(grid, cfg.phantom, cfg.permittivity.low, cfg.permittivity.high);
    const Eigen::VectorXd truth_image = normalized_image(grid, truth);

    const Calibration cal = calibrate(cfg);

    const CapacitanceVector c_meas = capacitance_vector(truth, grid, layout, cfg.forward);
    MeasurementVector lambda = normalize_measurements(c_meas, cal.c_low, cal.c_high);
    if (cfg.noise.enabled)
        lambda = add_noise(lambda, cfg.noise.snr_db, cfg.noise.seed);

    // In the high-reference frame the solvers see the deviation from the full
    // state and their output is mapped back below.
    MeasurementVector m_solver = lambda;
    if (cfg.permittivity.reference_high)
        m_solver.lambda = Eigen::VectorXd::Ones(lambda.lambda.size()) - lambda.lambda;

    const bool any_tv = std::any_of(selected.begin(), selected.end(), [](const auto& s) {
        return s.kind == SolverKind::TvIst || s.kind == SolverKind::TvFist;
    });
    std::unique_ptr<GradientTransforms> transforms;
    std::unique_ptr<LaplacianSolver> lap;
    if (any_tv) {
        transforms = std::make_unique<GradientTransforms>(build_gradient_transforms(grid));
        lap = std::make_unique<LaplacianSolver>(*transforms);
    }

    ExperimentResult result;
    result.out_dir = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
    fs::create_directories(result.out_dir);

    std::map<std::string, std::string> checksums;
    auto record = [&](const fs::path& p) {
        checksums[fs::relative(p, result.out_dir).generic_string()] = sha256_file(p);
    };

    write_matrix_csv(result.out_dir / "phantom.csv", embedded_matrix(grid, truth_image));
    write_pgm(result.out_dir / "phantom.pgm", grid, truth_image);
    write_vector_csv(result.out_dir / "measurements.csv", lambda.lambda);
    write_pairs_csv(result.out_dir / "pairs.csv", cal.c_low.pairs);
    record(result.out_dir / "phantom.csv");
    record(result.out_dir / "phantom.pgm");
    record(result.out_dir / "measurements.csv");
    record(result.out_dir / "pairs.csv");

    {
        json meta;
        meta["rows"] = cal.s.s.rows();
        meta["cols"] = cal.s.s.cols();
        meta["reference_state"] = cfg.permittivity.reference_high ? "high" : "low";
        meta["calibration_key"] = calibration_key(cfg);
        meta["calibration_dir"] = cal.dir.generic_string();
        meta["from_cache"] = cal.from_cache;
        write_json(result.out_dir / "sensitivity_meta.json", meta);
        record(result.out_dir / "sensitivity_meta.json");
    }

    // Rebuilds re-solve the forward problem at the current estimate; the
    // estimate arrives in the solver frame and is flipped back first if needed.
    const SensitivityRebuild rebuild = [&](const Eigen::VectorXd& est) {
        Eigen::VectorXd x = est;
        if (cfg.permittivity.reference_high)
            x = Eigen::VectorXd::Ones(x.size()) - x;
        return adaptive_sensitivity(x, grid, layout, cfg.permittivity.low,
                                    cfg.permittivity.high, effective_wall(cfg),
                                    cal.c_low, cal.c_high, cfg.forward)
            .s;
    };

    for (const SolverSpec& spec : selected) {
        SolverOutcome outcome;
        outcome.name = spec.name;
        const fs::path dir = result.out_dir / spec.name;
        fs::create_directories(dir);

        const auto started = std::chrono::steady_clock::now();
        std::vector<std::vector<double>> trace_rows;
        std::vector<std::string> trace_columns;
        try {
            Eigen::VectorXd solver_frame;
            switch (spec.kind) {
                case SolverKind::Lbp:
                    solver_frame = lbp(cal.s, m_solver);
                    break;
                case SolverKind::Landweber:
                case SolverKind::Art:
                case SolverKind::Sirt: {
                    std::vector<double> residuals;
                    if (spec.kind == SolverKind::Landweber)
                        solver_frame = landweber(cal.s, m_solver, spec.baseline, &residuals);
                    else if (spec.kind == SolverKind::Art)
                        solver_frame = art(cal.s, m_solver, spec.baseline, &residuals);
                    else
                        solver_frame = sirt(cal.s, m_solver, spec.baseline, &residuals);
                    trace_columns = {"k", "residual"};
                    for (size_t k = 0; k < residuals.size(); ++k)
                        trace_rows.push_back({double(k + 1), residuals[k]});
                    break;
                }
                case SolverKind::TvIst:
                case SolverKind::TvFist: {
                    const SensitivityRebuild* cb =
                        spec.tv.nonlinear == NonlinearMode::AdaptiveFdm ? &rebuild
                                                                        : nullptr;
                    const TvResult r =
                        spec.kind == SolverKind::TvIst
                            ? tv_ist(cal.s, *lap, *transforms, m_solver, spec.tv,
                                     spec.reweight, cb ? *cb : SensitivityRebuild{})
                            : tv_fist(cal.s, *lap, *transforms, m_solver, spec.tv,
                                      spec.reweight, cb ? *cb : SensitivityRebuild{});
                    solver_frame = r.x;
                    trace_columns = {"k", "cost", "residual", "tv", "weighted_tv"};
                    for (const TraceRecord& rec : r.trace)
                        trace_rows.push_back(
                            {double(rec.k), rec.cost, rec.residual, rec.tv,
                             rec.weighted_tv});
                    break;
                }
            }
            outcome.x = cfg.permittivity.reference_high
                            ? Eigen::VectorXd(Eigen::VectorXd::Ones(solver_frame.size()) -
                                              solver_frame)
                            : solver_frame;
            outcome.ok = true;
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.message = e.what();
        }
        outcome.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();

        if (outcome.ok) {
            write_matrix_csv(dir / "image.csv", embedded_matrix(grid, outcome.x));
            write_pgm(dir / "image.pgm", grid, outcome.x);
            record(dir / "image.csv");
            record(dir / "image.pgm");
            if (!trace_rows.empty()) {
                write_table_csv(dir / "trace.csv", trace_columns, trace_rows);
                record(dir / "trace.csv");
            }
            // Metrics are post-processing; a phantom with no segmentable
            // object must not fail an otherwise completed solver.
            json metrics_json;
            try {
                const TruthComparison cmp = evaluate_against_truth(
                    outcome.x, truth, grid, cfg.metrics.threshold, cfg.metrics.polarity);
                const double rel = relative_image_error(outcome.x, truth_image);
                metrics_json = metrics_to_json(cmp, rel, cfg.metrics);
            } catch (const std::exception& e) {
                metrics_json = json{{"error", e.what()}};
            }
            write_json(dir / "metrics.json", metrics_json);
            record(dir / "metrics.json");
        }
        result.outcomes.push_back(std::move(outcome));
    }

    result.all_ok = std::all_of(result.outcomes.begin(), result.outcomes.end(),
                                [](const SolverOutcome& o) { return o.ok; });

    json manifest;
    manifest["files"] = json::object();
    for (const auto& [path, sha] : checksums) manifest["files"][path] = sha;
    manifest["solvers"] = json::object();
    for (const SolverOutcome& o : result.outcomes) {
        json e;
        e["status"] = o.ok ? "ok" : "failed";
        if (!o.ok) e["message"] = o.message;
        e["wall_seconds"] = o.wall_seconds;
        manifest["solvers"][o.name] = e;
    }
    manifest["all_ok"] = result.all_ok;
    write_json(result.out_dir / "manifest.json", manifest);
    return result;
}

}  // namespace ect
