#include "etesc/analysis.hpp"
#include "etesc/lyapunov.hpp"
#include "etesc/scenario.hpp"
#include "etesc/sim_engine.hpp"
#include "etesc/workflows.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace etesc;

namespace {

py::dict report_dict(const Report& rep) {
    py::dict out;
    for (const auto& [key, value] : rep.entries) {
        out[py::str(key)] = value;
    }
    return out;
}

py::dict report_result(const Report& rep) {
    py::dict out;
    out["report"] = report_dict(rep);
    out["ok"] = rep.ok();
    out["failed_checks"] = rep.failed_checks;
    return out;
}

Overrides make_overrides(const std::optional<std::string>& mode, const std::optional<std::string>& trigger,
                         std::optional<int> jobs) {
    Overrides ov;
    if (mode) {
        ov.mode = parse_sim_mode(*mode);
    }
    if (trigger) {
        ov.trigger = parse_trigger_kind(*trigger);
    }
    ov.jobs = jobs;
    return ov;
}

template <typename Get>
py::array_t<double> column_block(const Trajectory& traj, int width, Get&& get) {
    const auto rows = static_cast<py::ssize_t>(traj.size());
    py::array_t<double> out({rows, static_cast<py::ssize_t>(width)});
    auto view = out.mutable_unchecked<2>();
    for (py::ssize_t r = 0; r < rows; ++r) {
        const auto v = get(static_cast<std::size_t>(r));
        for (int i = 0; i < width; ++i) {
            view(r, i) = v(i);
        }
    }
    return out;
}

template <typename Get>
py::array_t<double> column(const Trajectory& traj, Get&& get) {
    const auto rows = static_cast<py::ssize_t>(traj.size());
    py::array_t<double> out(rows);
    auto view = out.mutable_unchecked<1>();
    for (py::ssize_t r = 0; r < rows; ++r) {
        view(r) = get(static_cast<std::size_t>(r));
    }
    return out;
}

py::dict run_scenario(const Scenario& sc) {
    RunResult res;
    {
        py::gil_scoped_release release;
        res = run(sc.sim);
    }
    const Trajectory& tr = res.trajectory;
    const int n = tr.dim();
    py::dict out;
    out["t"] = column(tr, [&](std::size_t r) { return tr.t(r); });
    out["theta_hat"] = column_block(tr, n, [&](std::size_t r) { return tr.theta_hat(r); });
    out["theta"] = column_block(tr, n, [&](std::size_t r) { return tr.theta(r); });
    out["y"] = column(tr, [&](std::size_t r) { return tr.y(r); });
    out["g_hat"] = column_block(tr, n, [&](std::size_t r) { return tr.g_hat(r); });
    out["g_held"] = column_block(tr, n, [&](std::size_t r) { return tr.g_held(r); });
    out["u"] = column_block(tr, n, [&](std::size_t r) { return tr.u(r); });
    out["xi"] = column(tr, [&](std::size_t r) { return tr.xi(r); });
    out["upsilon"] = column(tr, [&](std::size_t r) { return tr.upsilon(r); });
    if (tr.average()) {
        out["v_av"] = column(tr, [&](std::size_t r) { return tr.v_av(r); });
    }
    out["event_times"] = res.events.times();
    out["event_steps"] = res.events.steps();
    out["dt"] = res.dt;
    out["steps"] = res.steps;
    return out;
}

}  // namespace

PYBIND11_MODULE(_etesc, m) {
    m.doc() = "Event-triggered extremum seeking simulator";

    auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CertificateError>(m, "CertificateError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
    py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);

    py::class_<Scenario>(m, "Scenario")
        .def_property_readonly("name", [](const Scenario& s) { return s.name; })
        .def_property_readonly("trigger", [](const Scenario& s) { return std::string(to_string(s.sim.trigger.kind)); })
        .def_property_readonly("mode", [](const Scenario& s) { return std::string(to_string(s.sim.mode)); })
        .def_property_readonly("dt", [](const Scenario& s) { return s.sim.dt; })
        .def_property_readonly("duration", [](const Scenario& s) { return s.sim.duration; })
        .def_property_readonly("notes", [](const Scenario& s) { return s.notes; })
        .def_property_readonly("hessian", [](const Scenario& s) { return Eigen::MatrixXd(s.sim.map.hessian()); })
        .def_property_readonly("optimizer", [](const Scenario& s) { return Eigen::VectorXd(s.sim.map.optimizer()); })
        .def_property_readonly("config_hash", [](const Scenario& s) { return s.sim.hash(); });

    m.def(
        "load_scenario",
        [](const std::string& path, std::optional<std::string> mode, std::optional<std::string> trigger,
           std::optional<int> jobs) { return load_scenario(path, make_overrides(mode, trigger, jobs)); },
        py::arg("path"), py::arg("mode") = py::none(), py::arg("trigger") = py::none(), py::arg("jobs") = py::none(),
        "Load and validate a scenario file.");
    m.def(
        "parse_scenario",
        [](const std::string& text, std::optional<std::string> mode, std::optional<std::string> trigger) {
            return parse_scenario(text, "<string>", make_overrides(mode, trigger, std::nullopt));
        },
        py::arg("text"), py::arg("mode") = py::none(), py::arg("trigger") = py::none());

    m.def("run", &run_scenario, py::arg("scenario"), "Simulate and return trajectory arrays and event times.");
    m.def(
        "simulate",
        [](const Scenario& sc, const std::string& out_dir) {
            Report rep;
            {
                py::gil_scoped_release release;
                rep = simulate_scenario(sc, out_dir);
            }
            return report_result(rep);
        },
        py::arg("scenario"), py::arg("out_dir") = "");
    m.def("certify", [](const Scenario& sc) { return report_result(certify_scenario(sc)); }, py::arg("scenario"));
    m.def(
        "sweep",
        [](const Scenario& sc, const std::string& out_dir) {
            Report rep;
            {
                py::gil_scoped_release release;
                rep = sweep_scenario(sc, out_dir);
            }
            return report_result(rep);
        },
        py::arg("scenario"), py::arg("out_dir") = "");
    m.def("validate", [](const Scenario& sc) { return report_result(validate_report(sc)); }, py::arg("scenario"));

    m.def(
        "solve_lyapunov",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) { return Eigen::MatrixXd(solve_lyapunov(a, q)); },
        py::arg("a"), py::arg("q"), "Solve A^T P + P A = -Q.");
    m.def(
        "dwell_time_static",
        [](double alpha, double beta, double sigma, double hk_norm) {
            return dwell_time_static(alpha, beta, sigma, hk_norm).tau_star;
        },
        py::arg("alpha"), py::arg("beta"), py::arg("sigma"), py::arg("hk_norm"));
    m.def(
        "dwell_time_dynamic",
        [](double alpha, double beta, double sigma, double mu, double gamma, double hk_norm) {
            const DwellTime d = dwell_time_dynamic(alpha, beta, sigma, mu, gamma, hk_norm);
            return py::make_tuple(d.tau_star, d.regime);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("sigma"), py::arg("mu"), py::arg("gamma"), py::arg("hk_norm"));
    m.def(
        "interval_stats",
        [](std::vector<double> intervals) {
            const IntervalStats s = interval_stats(std::move(intervals));
            py::dict out;
            out["count"] = s.count;
            out["mean"] = s.mean;
            out["mean_deviation"] = s.mean_deviation;
            out["variance"] = s.variance;
            out["std_deviation"] = s.standard_deviation;
            out["min_interval"] = s.min_interval;
            out["max_interval"] = s.max_interval;
            return out;
        },
        py::arg("intervals"));
    (void)config_error;
}
