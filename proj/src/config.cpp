#include "ect/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ect/errors.hpp"
#include "ect/io.hpp"

namespace ect {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

/// Fail-fast typo guard: every key must be in the allowed set.
void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    require_object(j, path);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) fail(path + "." + key, "unknown field");
}

const json* find(const json& j, const std::string& key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double num(const json& j, const std::string& path, const std::string& key,
           double fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number()) fail(path + "." + key, "expected a number");
    return v->get<double>();
}

double required_num(const json& j, const std::string& path, const std::string& key) {
    const json* v = find(j, key);
    if (!v) fail(path + "." + key, "required field is missing");
    if (!v->is_number()) fail(path + "." + key, "expected a number");
    return v->get<double>();
}

long integer(const json& j, const std::string& path, const std::string& key,
             long fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
    return v->get<long>();
}

bool boolean(const json& j, const std::string& path, const std::string& key,
             bool fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(path + "." + key, "expected true or false");
    return v->get<bool>();
}

std::string text(const json& j, const std::string& path, const std::string& key,
                 const std::string& fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_string()) fail(path + "." + key, "expected a string");
    return v->get<std::string>();
}

PhantomShape parse_shape(const json& j, const std::string& path) {
    require_object(j, path);
    const std::string kind = text(j, path, "kind", "");
    PhantomShape s{};
    if (kind == "disc") {
        check_keys(j, path, {"kind", "center_row", "center_col", "radius", "eps"});
        s.kind = PhantomShape::Kind::Disc;
        s.radius = required_num(j, path, "radius");
    } else if (kind == "annular_arc") {
        check_keys(j, path, {"kind", "center_row", "center_col", "r_inner", "r_outer",
                             "theta_start_deg", "theta_end_deg", "eps"});
        s.kind = PhantomShape::Kind::AnnularArc;
        s.r_inner = required_num(j, path, "r_inner");
        s.r_outer = required_num(j, path, "r_outer");
        s.theta_start_deg = required_num(j, path, "theta_start_deg");
        s.theta_end_deg = required_num(j, path, "theta_end_deg");
    } else {
        fail(path + ".kind", "expected \"disc\" or \"annular_arc\"");
    }
    s.center_row = required_num(j, path, "center_row");
    s.center_col = required_num(j, path, "center_col");
    s.eps = required_num(j, path, "eps");
    return s;
}

SolverKind parse_kind(const std::string& type, const std::string& path) {
    if (type == "lbp") return SolverKind::Lbp;
    if (type == "landweber") return SolverKind::Landweber;
    if (type == "art") return SolverKind::Art;
    if (type == "sirt") return SolverKind::Sirt;
    if (type == "tv_ist") return SolverKind::TvIst;
    if (type == "tv_fist") return SolverKind::TvFist;
    fail(path + ".type", "unknown solver type \"" + type + "\"");
}

SolverSpec parse_solver(const json& j, const std::string& path) {
    require_object(j, path);
    SolverSpec spec;
    spec.name = text(j, path, "name", "");
    if (spec.name.empty()) fail(path + ".name", "required field is missing");
    for (char c : spec.name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
            fail(path + ".name", "only letters, digits, '-' and '_' are allowed");
    spec.kind = parse_kind(text(j, path, "type", ""), path);

    switch (spec.kind) {
        case SolverKind::Lbp:
            check_keys(j, path, {"name", "type"});
            break;
        case SolverKind::Landweber:
        case SolverKind::Art:
        case SolverKind::Sirt:
            check_keys(j, path, {"name", "type", "iters", "relax", "step", "clamp"});
            spec.baseline.iters = integer(j, path, "iters", spec.baseline.iters);
            spec.baseline.relax = num(j, path, "relax", spec.baseline.relax);
            spec.baseline.step = num(j, path, "step", spec.baseline.step);
            spec.baseline.clamp = boolean(j, path, "clamp", spec.baseline.clamp);
            break;
        case SolverKind::TvIst:
        case SolverKind::TvFist: {
            check_keys(j, path,
                       {"name", "type", "k_max", "beta", "alpha_prime", "rho", "v",
                        "reweight", "project_box", "nonlinear", "delta_eps", "eps_ref"});
            spec.tv.k_max = integer(j, path, "k_max", spec.tv.k_max);
            spec.tv.beta = num(j, path, "beta", spec.tv.beta);
            spec.tv.alpha_prime = num(j, path, "alpha_prime", spec.tv.alpha_prime);
            spec.tv.rho = num(j, path, "rho", spec.tv.rho);
            spec.tv.v = integer(j, path, "v", spec.tv.v);
            spec.reweight = boolean(j, path, "reweight", false);
            spec.tv.project_box = boolean(j, path, "project_box", spec.tv.project_box);
            const std::string mode = text(j, path, "nonlinear", "none");
            if (mode == "none") {
                spec.tv.nonlinear = NonlinearMode::None;
            } else if (mode == "fitting_curve") {
                spec.tv.nonlinear = NonlinearMode::FittingCurve;
                spec.tv.eps_ref = required_num(j, path, "eps_ref");
                spec.tv.delta_eps = required_num(j, path, "delta_eps");
            } else if (mode == "adaptive_fdm") {
                spec.tv.nonlinear = NonlinearMode::AdaptiveFdm;
            } else {
                fail(path + ".nonlinear",
                     "expected \"none\", \"fitting_curve\" or \"adaptive_fdm\"");
            }
            break;
        }
    }
    return spec;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& textual) {
    json j;
    try {
        j = json::parse(textual);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    require_object(j, "$");
    check_keys(j, "$",
               {"version", "grid", "electrodes", "permittivity", "phantom", "noise",
                "forward", "metrics", "solvers", "output_dir"});

    const json* version = find(j, "version");
    if (!version) fail("$.version", "required field is missing");
    if (!version->is_number_integer() || version->get<long>() != 1)
        fail("$.version", "unsupported config version (expected 1)");

    ExperimentConfig cfg;

    if (const json* g = find(j, "grid")) {
        check_keys(*g, "$.grid", {"n1", "n2", "roi_radius_frac", "pitch"});
        cfg.grid.n1 = static_cast<int>(integer(*g, "$.grid", "n1", cfg.grid.n1));
        cfg.grid.n2 = static_cast<int>(integer(*g, "$.grid", "n2", cfg.grid.n2));
        cfg.grid.roi_radius_frac =
            num(*g, "$.grid", "roi_radius_frac", cfg.grid.roi_radius_frac);
        cfg.grid.pitch = num(*g, "$.grid", "pitch", cfg.grid.pitch);
    }

    if (const json* e = find(j, "electrodes")) {
        check_keys(*e, "$.electrodes", {"count", "coverage_frac", "v_c"});
        cfg.electrodes.count =
            static_cast<int>(integer(*e, "$.electrodes", "count", cfg.electrodes.count));
        cfg.electrodes.coverage_frac =
            num(*e, "$.electrodes", "coverage_frac", cfg.electrodes.coverage_frac);
        cfg.electrodes.v_c = num(*e, "$.electrodes", "v_c", cfg.electrodes.v_c);
    }

    {
        const json* p = find(j, "permittivity");
        if (!p) fail("$.permittivity", "required field is missing");
        check_keys(*p, "$.permittivity", {"low", "high", "reference_state"});
        cfg.permittivity.low = required_num(*p, "$.permittivity", "low");
        cfg.permittivity.high = required_num(*p, "$.permittivity", "high");
        if (!(cfg.permittivity.low < cfg.permittivity.high))
            fail("$.permittivity", "low must be less than high");
        const std::string ref = text(*p, "$.permittivity", "reference_state", "low");
        if (ref == "low")
            cfg.permittivity.reference_high = false;
        else if (ref == "high")
            cfg.permittivity.reference_high = true;
        else
            fail("$.permittivity.reference_state", "expected \"low\" or \"high\"");
    }

    {
        const json* p = find(j, "phantom");
        if (!p) fail("$.phantom", "required field is missing");
        check_keys(*p, "$.phantom", {"background_eps", "wall_eps", "shapes"});
        cfg.phantom.background_eps = required_num(*p, "$.phantom", "background_eps");
        cfg.phantom.wall_eps = num(*p, "$.phantom", "wall_eps", -1.0);
        if (const json* shapes = find(*p, "shapes")) {
            if (!shapes->is_array()) fail("$.phantom.shapes", "expected an array");
            for (size_t i = 0; i < shapes->size(); ++i)
                cfg.phantom.shapes.push_back(parse_shape(
                    (*shapes)[i], "$.phantom.shapes[" + std::to_string(i) + "]"));
        }
    }

    if (const json* n = find(j, "noise")) {
        check_keys(*n, "$.noise", {"snr_db", "seed"});
        cfg.noise.enabled = true;
        cfg.noise.snr_db = required_num(*n, "$.noise", "snr_db");
        if (!std::isfinite(cfg.noise.snr_db))
            fail("$.noise.snr_db", "expected a finite number");
        const json* seed = find(*n, "seed");
        if (!seed) fail("$.noise.seed", "required whenever noise is configured");
        if (!seed->is_number_unsigned())
            fail("$.noise.seed", "expected a nonnegative integer");
        cfg.noise.seed = seed->get<unsigned long long>();
    }

    if (const json* f = find(j, "forward")) {
        check_keys(*f, "$.forward", {"tol", "max_sweeps", "omega"});
        cfg.forward.tol = num(*f, "$.forward", "tol", cfg.forward.tol);
        cfg.forward.max_sweeps =
            integer(*f, "$.forward", "max_sweeps", cfg.forward.max_sweeps);
        cfg.forward.omega = num(*f, "$.forward", "omega", cfg.forward.omega);
    }

    if (const json* m = find(j, "metrics")) {
        check_keys(*m, "$.metrics", {"threshold", "polarity"});
        cfg.metrics.threshold = num(*m, "$.metrics", "threshold", cfg.metrics.threshold);
        const std::string pol = text(*m, "$.metrics", "polarity", "bright");
        if (pol == "bright")
            cfg.metrics.polarity = Polarity::Bright;
        else if (pol == "dark")
            cfg.metrics.polarity = Polarity::Dark;
        else
            fail("$.metrics.polarity", "expected \"bright\" or \"dark\"");
    }

    {
        const json* s = find(j, "solvers");
        if (!s) fail("$.solvers", "required field is missing");
        if (!s->is_array() || s->empty())
            fail("$.solvers", "expected a non-empty array");
        std::set<std::string> names;
        for (size_t i = 0; i < s->size(); ++i) {
            const std::string path = "$.solvers[" + std::to_string(i) + "]";
            SolverSpec spec = parse_solver((*s)[i], path);
            if (!names.insert(spec.name).second)
                fail(path + ".name", "duplicate solver name \"" + spec.name + "\"");
            cfg.solvers.push_back(std::move(spec));
        }
    }

    cfg.output_dir = text(j, "$", "output_dir", cfg.output_dir);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

std::string calibration_key(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["n1"] = cfg.grid.n1;
    j["n2"] = cfg.grid.n2;
    j["roi_radius_frac"] = cfg.grid.roi_radius_frac;
    j["pitch"] = cfg.grid.pitch;
    j["electrodes"] = cfg.electrodes.count;
    j["coverage_frac"] = cfg.electrodes.coverage_frac;
    j["v_c"] = cfg.electrodes.v_c;
    j["eps_low"] = cfg.permittivity.low;
    j["eps_high"] = cfg.permittivity.high;
    j["reference_high"] = cfg.permittivity.reference_high;
    j["wall_eps"] = cfg.phantom.wall_eps >= 0.0 ? cfg.phantom.wall_eps
                                                : cfg.phantom.background_eps;
    j["tol"] = cfg.forward.tol;
    j["max_sweeps"] = cfg.forward.max_sweeps;
    j["omega"] = cfg.forward.omega;
    return sha256_string(j.dump());
}

}  // namespace ect
