#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ect/config.hpp"
#include "ect/harness.hpp"

namespace {

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D capacitance tomography simulator and reconstruction bench"};
    app.require_subcommand(1);

    std::string config_path;
    std::string solvers_csv;
    std::string out_dir;

    CLI::App* cal = app.add_subcommand(
        "calibrate", "Compute (or load) the calibration data for a config");
    cal->add_option("--config", config_path, "Experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* run = app.add_subcommand(
        "run", "Simulate measurements and reconstruct with the configured solvers");
    run->add_option("--config", config_path, "Experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--solvers", solvers_csv,
                    "Comma-separated subset of solver names to run");
    run->add_option("--out", out_dir, "Override the configured output directory");

    CLI::App* version = app.add_subcommand("version", "Print the version and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (version->parsed()) {
            std::cout << ECTSIM_VERSION << '\n';
            return 0;
        }
        const ect::ExperimentConfig cfg = ect::load_experiment_config(config_path);
        if (cal->parsed()) {
            const ect::Calibration c = ect::calibrate(cfg);
            std::cout << (c.from_cache ? "cache hit: " : "computed: ")
                      << c.dir.string() << '\n'
                      << "measurements: " << c.s.s.rows()
                      << ", pixels: " << c.s.s.cols() << '\n';
            return 0;
        }
        const ect::ExperimentResult res =
            ect::run_experiment(cfg, split_names(solvers_csv), out_dir);
        for (const ect::SolverOutcome& o : res.outcomes) {
            std::cout << o.name << ": " << (o.ok ? "ok" : "FAILED") << " ("
                      << o.wall_seconds << " s)";
            if (!o.ok) std::cout << " - " << o.message;
            std::cout << '\n';
        }
        std::cout << "outputs: " << res.out_dir.string() << '\n';
        return res.all_ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
