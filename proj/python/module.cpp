#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ect/baseline.hpp"
#include "ect/config.hpp"
#include "ect/errors.hpp"
#include "ect/forward.hpp"
#include "ect/harness.hpp"
#include "ect/metrics.hpp"
#include "ect/operators.hpp"
#include "ect/tv.hpp"

namespace py = pybind11;
using namespace ect;

namespace {

SolveOptions make_opts(double tol, long max_sweeps, double omega) {
    SolveOptions o;
    o.tol = tol;
    o.max_sweeps = max_sweeps;
    o.omega = omega;
    return o;
}

SensitivityMatrix wrap_matrix(const Eigen::MatrixXd& s) {
    SensitivityMatrix out;
    out.s = s;
    return out;
}

MeasurementVector wrap_measurements(const Eigen::VectorXd& lam) {
    MeasurementVector out;
    out.lambda = lam;
    return out;
}

Eigen::MatrixXd trace_matrix(const TvResult& r) {
    Eigen::MatrixXd t(static_cast<Eigen::Index>(r.trace.size()), 5);
    for (size_t i = 0; i < r.trace.size(); ++i) {
        const TraceRecord& rec = r.trace[i];
        t(static_cast<Eigen::Index>(i), 0) = static_cast<double>(rec.k);
        t(static_cast<Eigen::Index>(i), 1) = rec.cost;
        t(static_cast<Eigen::Index>(i), 2) = rec.residual;
        t(static_cast<Eigen::Index>(i), 3) = rec.tv;
        t(static_cast<Eigen::Index>(i), 4) = rec.weighted_tv;
    }
    return t;
}

}  // namespace

PYBIND11_MODULE(_ectsim, m) {
    m.doc() = "2D capacitance tomography: forward simulation and reconstruction";
    m.attr("__version__") = ECTSIM_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<Grid>(m, "Grid")
        .def_readonly("n1", &Grid::n1)
        .def_readonly("n2", &Grid::n2)
        .def_readonly("pitch", &Grid::pitch)
        .def_property_readonly("n_roi", &Grid::n_roi)
        .def("embed", &Grid::embed, py::arg("x_roi"),
             "Region image -> full n1*n2 vector, exterior zero")
        .def("restrict_to_roi", &Grid::restrict_to_roi, py::arg("full"))
        .def("__repr__", [](const Grid& g) {
            return "Grid(" + std::to_string(g.n1) + "x" + std::to_string(g.n2) +
                   ", roi=" + std::to_string(g.n_roi()) + ")";
        });

    py::class_<ElectrodeLayout>(m, "ElectrodeLayout")
        .def_readonly("n_electrodes", &ElectrodeLayout::n_electrodes)
        .def_readonly("v_c", &ElectrodeLayout::v_c)
        .def_property_readonly("m", &ElectrodeLayout::m)
        .def("pairs", &ElectrodeLayout::pairs);

    py::class_<PermittivityField>(m, "PermittivityField")
        .def_readonly("eps", &PermittivityField::eps)
        .def_readonly("eps_low", &PermittivityField::eps_low)
        .def_readonly("eps_high", &PermittivityField::eps_high);

    py::class_<CapacitanceVector>(m, "CapacitanceVector")
        .def_readonly("c", &CapacitanceVector::c)
        .def_readonly("pairs", &CapacitanceVector::pairs);

    py::enum_<PhantomShape::Kind>(m, "ShapeKind")
        .value("disc", PhantomShape::Kind::Disc)
        .value("annular_arc", PhantomShape::Kind::AnnularArc);

    py::class_<PhantomShape>(m, "PhantomShape")
        .def(py::init<>())
        .def_readwrite("kind", &PhantomShape::kind)
        .def_readwrite("center_row", &PhantomShape::center_row)
        .def_readwrite("center_col", &PhantomShape::center_col)
        .def_readwrite("radius", &PhantomShape::radius)
        .def_readwrite("r_inner", &PhantomShape::r_inner)
        .def_readwrite("r_outer", &PhantomShape::r_outer)
        .def_readwrite("theta_start_deg", &PhantomShape::theta_start_deg)
        .def_readwrite("theta_end_deg", &PhantomShape::theta_end_deg)
        .def_readwrite("eps", &PhantomShape::eps);

    py::class_<PhantomSpec>(m, "PhantomSpec")
        .def(py::init<>())
        .def_readwrite("background_eps", &PhantomSpec::background_eps)
        .def_readwrite("wall_eps", &PhantomSpec::wall_eps)
        .def_readwrite("shapes", &PhantomSpec::shapes);

    m.def("build_grid", &build_grid, py::arg("n1"), py::arg("n2"),
          py::arg("roi_radius_frac"), py::arg("pitch") = 1.0);
    m.def("place_electrodes", &place_electrodes, py::arg("grid"), py::arg("n"),
          py::arg("coverage_frac") = 0.8, py::arg("v_c") = 1.0);
    m.def("make_phantom", &make_phantom, py::arg("grid"), py::arg("spec"),
          py::arg("eps_low"), py::arg("eps_high"));
    m.def("normalized_image", &normalized_image, py::arg("grid"), py::arg("field"));

    m.def(
        "capacitance_vector",
        [](const PermittivityField& field, const Grid& grid,
           const ElectrodeLayout& layout, double tol, long max_sweeps, double omega) {
            return capacitance_vector(field, grid, layout,
                                      make_opts(tol, max_sweeps, omega));
        },
        py::arg("field"), py::arg("grid"), py::arg("layout"), py::arg("tol") = 1e-6,
        py::arg("max_sweeps") = 50000, py::arg("omega") = 1.8);

    m.def(
        "sensitivity_matrix",
        [](const PermittivityField& base, const Grid& grid,
           const ElectrodeLayout& layout, const CapacitanceVector& c_low,
           const CapacitanceVector& c_high, double tol, long max_sweeps, double omega) {
            return sensitivity_matrix(base, grid, layout, c_low, c_high,
                                      make_opts(tol, max_sweeps, omega))
                .s;
        },
        py::arg("base"), py::arg("grid"), py::arg("layout"), py::arg("c_low"),
        py::arg("c_high"), py::arg("tol") = 1e-6, py::arg("max_sweeps") = 50000,
        py::arg("omega") = 1.8);

    m.def(
        "normalize_measurements",
        [](const CapacitanceVector& c, const CapacitanceVector& c_low,
           const CapacitanceVector& c_high) {
            return normalize_measurements(c, c_low, c_high).lambda;
        },
        py::arg("c"), py::arg("c_low"), py::arg("c_high"));

    m.def(
        "add_noise",
        [](const Eigen::VectorXd& lam, double snr_db, std::uint64_t seed) {
            return add_noise(wrap_measurements(lam), snr_db, seed).lambda;
        },
        py::arg("lam"), py::arg("snr_db"), py::arg("seed"));

    m.def(
        "lbp",
        [](const Eigen::MatrixXd& s, const Eigen::VectorXd& lam) {
            return lbp(wrap_matrix(s), wrap_measurements(lam));
        },
        py::arg("s"), py::arg("lam"));

    auto baseline_cfg = [](long iters, double relax, double step, bool clamp) {
        BaselineConfig cfg;
        cfg.iters = iters;
        cfg.relax = relax;
        cfg.step = step;
        cfg.clamp = clamp;
        return cfg;
    };
    m.def(
        "landweber",
        [baseline_cfg](const Eigen::MatrixXd& s, const Eigen::VectorXd& lam, long iters,
                       double relax, double step, bool clamp) {
            return landweber(wrap_matrix(s), wrap_measurements(lam),
                             baseline_cfg(iters, relax, step, clamp));
        },
        py::arg("s"), py::arg("lam"), py::arg("iters") = 500, py::arg("relax") = 1.0,
        py::arg("step") = 0.0, py::arg("clamp") = true);
    m.def(
        "art",
        [baseline_cfg](const Eigen::MatrixXd& s, const Eigen::VectorXd& lam, long iters,
                       double relax, double step, bool clamp) {
            return art(wrap_matrix(s), wrap_measurements(lam),
                       baseline_cfg(iters, relax, step, clamp));
        },
        py::arg("s"), py::arg("lam"), py::arg("iters") = 500, py::arg("relax") = 1.0,
        py::arg("step") = 0.0, py::arg("clamp") = true);
    m.def(
        "sirt",
        [baseline_cfg](const Eigen::MatrixXd& s, const Eigen::VectorXd& lam, long iters,
                       double relax, double step, bool clamp) {
            return sirt(wrap_matrix(s), wrap_measurements(lam),
                        baseline_cfg(iters, relax, step, clamp));
        },
        py::arg("s"), py::arg("lam"), py::arg("iters") = 500, py::arg("relax") = 1.0,
        py::arg("step") = 0.0, py::arg("clamp") = true);

    m.def(
        "tv_reconstruct",
        [](const Eigen::MatrixXd& s, const Eigen::VectorXd& lam, const Grid& grid,
           bool fist, bool reweight, long k_max, double alpha_prime, double beta,
           double rho, long v, bool project_box) {
            TvConfig cfg;
            cfg.k_max = k_max;
            cfg.alpha_prime = alpha_prime;
            cfg.beta = beta;
            cfg.rho = rho;
            cfg.v = v;
            cfg.project_box = project_box;
            const GradientTransforms t = build_gradient_transforms(grid);
            const LaplacianSolver solver(t);
            const TvResult r =
                fist ? tv_fist(wrap_matrix(s), solver, t, wrap_measurements(lam), cfg,
                               reweight)
                     : tv_ist(wrap_matrix(s), solver, t, wrap_measurements(lam), cfg,
                              reweight);
            py::dict out;
            out["x"] = r.x;
            out["beta_used"] = r.beta_used;
            out["trace"] = trace_matrix(r);
            return out;
        },
        py::arg("s"), py::arg("lam"), py::arg("grid"), py::arg("fist") = true,
        py::arg("reweight") = false, py::arg("k_max") = 500,
        py::arg("alpha_prime") = 1e-4, py::arg("beta") = 0.0, py::arg("rho") = 0.05,
        py::arg("v") = 25, py::arg("project_box") = false,
        "Total-variation shrinkage reconstruction; returns x, beta_used, trace");

    py::enum_<Polarity>(m, "Polarity")
        .value("bright", Polarity::Bright)
        .value("dark", Polarity::Dark);

    m.def("relative_image_error", &relative_image_error, py::arg("x"),
          py::arg("x_true"));
    m.def(
        "segment_objects",
        [](const Eigen::VectorXd& x, const Grid& grid, double threshold, Polarity pol) {
            py::list out;
            for (const ObjectReport& o : segment_objects(x, grid, threshold, pol)) {
                py::dict e;
                e["label"] = o.label;
                e["pixel_count"] = o.pixel_count;
                e["mean_intensity"] = o.mean_intensity;
                e["centroid"] = py::make_tuple(o.centroid_row, o.centroid_col);
                out.append(e);
            }
            return out;
        },
        py::arg("x"), py::arg("grid"), py::arg("threshold") = 0.5,
        py::arg("polarity") = Polarity::Bright);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("output_dir", &ExperimentConfig::output_dir);
    m.def("parse_config", &parse_experiment_config, py::arg("text"));
    m.def("load_config", &load_experiment_config, py::arg("path"));

    py::class_<Calibration>(m, "Calibration")
        .def_readonly("c_low", &Calibration::c_low)
        .def_readonly("c_high", &Calibration::c_high)
        .def_property_readonly("s",
                               [](const Calibration& c) { return c.s.s; })
        .def_readonly("from_cache", &Calibration::from_cache)
        .def_readonly("dir", &Calibration::dir);
    m.def("calibrate", &calibrate, py::arg("config"));

    py::class_<SolverOutcome>(m, "SolverOutcome")
        .def_readonly("name", &SolverOutcome::name)
        .def_readonly("ok", &SolverOutcome::ok)
        .def_readonly("message", &SolverOutcome::message)
        .def_readonly("wall_seconds", &SolverOutcome::wall_seconds)
        .def_readonly("x", &SolverOutcome::x);
    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("out_dir", &ExperimentResult::out_dir)
        .def_readonly("outcomes", &ExperimentResult::outcomes)
        .def_readonly("all_ok", &ExperimentResult::all_ok);
    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::arg("only") = std::vector<std::string>{}, py::arg("out") = std::string{});
}
