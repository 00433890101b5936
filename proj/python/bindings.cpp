#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "acda/analysis.hpp"
#include "acda/assimilation.hpp"
#include "acda/cli.hpp"
#include "acda/experiments.hpp"

namespace py = pybind11;
using namespace acda;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

Field to_field(const Array& a, const SolverConfig& c) {
    if (a.ndim() != 1 || static_cast<std::size_t>(a.size()) != c.n_points + 1)
        throw std::invalid_argument("expected a 1-D array of N + 1 values");
    Field f = Field::zeros(c);
    std::copy(a.data(), a.data() + a.size(), f.values.begin());
    return f;
}

py::dict record_dict(const RunRecord& r) {
    py::dict d;
    d["times"] = to_array(r.times);
    d["l2_errors"] = to_array(r.l2_errors);
    d["linf_errors"] = to_array(r.linf_errors);
    d["converged_at"] = r.converged_at ? py::object(py::float_(*r.converged_at)) : py::none();
    d["probe_positions"] = r.probe_positions;
    d["reference"] = to_array(r.final_reference.values);
    d["assimilated"] = to_array(r.final_assimilated.values);
    return d;
}

}  // namespace

PYBIND11_MODULE(_acda, m) {
    m.doc() = "Allen-Cahn solver and nudging data assimilation";

    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init([](double nu, double alpha, double L, std::size_t N, double dt) {
                 SolverConfig c{nu, alpha, L, N, dt};
                 c.validate();
                 return c;
             }),
             py::arg("nu") = 7.5e-6, py::arg("alpha") = 1.0, py::arg("L") = 1.0, py::arg("N") = 4096,
             py::arg("dt") = 1e-3)
        .def_readwrite("nu", &SolverConfig::nu)
        .def_readwrite("alpha", &SolverConfig::alpha)
        .def_readwrite("L", &SolverConfig::domain_length)
        .def_readwrite("N", &SolverConfig::n_points)
        .def_readwrite("dt", &SolverConfig::dt)
        .def_property_readonly("dx", &SolverConfig::dx)
        .def("__repr__", [](const SolverConfig& c) {
            return "SolverConfig(nu=" + std::to_string(c.nu) + ", N=" + std::to_string(c.n_points) +
                   ", dt=" + std::to_string(c.dt) + ")";
        });

    py::class_<ObservationSet>(m, "ObservationSet")
        .def_static("uniform", &ObservationSet::uniform, py::arg("N"), py::arg("m"))
        .def_static("full_mesh", &ObservationSet::full_mesh, py::arg("N"))
        .def_static("sweeping_probe", &ObservationSet::sweeping_probe, py::arg("N"), py::arg("m"), py::arg("speed"),
                    py::arg("start") = 0)
        .def_static("custom", &ObservationSet::custom, py::arg("N"), py::arg("points"))
        .def_property_readonly("points", &ObservationSet::points)
        .def_property_readonly("layer_points", &ObservationSet::layer_points)
        .def_property_readonly("kind", [](const ObservationSet& o) { return std::string(to_string(o.kind())); })
        .def("advance", &ObservationSet::advance)
        .def("__len__", &ObservationSet::size)
        .def("__repr__", &ObservationSet::to_csv_record);

    m.def("initial_data", [](const SolverConfig& c, std::uint64_t seed, double target_l2) {
        return to_array(make_initial_data(c, seed, target_l2).values);
    }, py::arg("config"), py::arg("seed"), py::arg("target_l2") = 1e-2);

    m.def("step", [](const Array& u, const SolverConfig& c, std::size_t steps) {
        const AllenCahnStepper stepper(c);
        Field f = to_field(u, c);
        for (std::size_t s = 0; s < steps; ++s) stepper.step(f);
        return to_array(f.values);
    }, py::arg("u"), py::arg("config"), py::arg("steps") = 1, "Advance the reference equation.");

    m.def("spin_up", [](const SolverConfig& c, std::uint64_t seed, bool capped, double cap) {
        const SpinUp s = spin_up_reference(c, seed, capped ? SpinUpPolicy::LastBelowCapped : SpinUpPolicy::FirstCrossing, cap);
        return py::make_tuple(to_array(s.state.values), s.duration);
    }, py::arg("config"), py::arg("seed"), py::arg("capped") = false, py::arg("cap") = 10.0);

    m.def("interpolate", [](const Array& f, const ObservationSet& obs, const SolverConfig& c) {
        return to_array(interpolate(to_field(f, c), obs).values);
    }, py::arg("values"), py::arg("obs"), py::arg("config"));

    m.def("l2_norm", [](const Array& f, double dx) {
        return discrete_l2(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())), dx);
    }, py::arg("values"), py::arg("dx"));

    m.def("layer_placement", [](const Array& u, const SolverConfig& c) { return layer_based_placement(to_field(u, c), c); },
          py::arg("u"), py::arg("config"));

    m.def("assimilate", [](const Array& u0, const SolverConfig& c, double mu, const ObservationSet& obs, double t_end,
                           double threshold, std::size_t record_every, bool stop_on_convergence) {
        RunOptions opt;
        opt.stop_on_convergence = stop_on_convergence;
        opt.record_probe = obs.kind() == ObservationKind::SweepingProbe;
        const RunRecord r = run_pair(to_field(u0, c), NudgeConfig(mu, obs, t_end, c, record_every), c, threshold, opt);
        return record_dict(r);
    }, py::arg("u0"), py::arg("config"), py::arg("mu"), py::arg("obs"), py::arg("t_end"), py::arg("threshold") = 5e-14,
       py::arg("record_every") = 10, py::arg("stop_on_convergence") = false,
       "Run reference and nudged solutions from u0 and v0 = 0; returns the error history.");

    m.def("find_min_nodes", [](const SolverConfig& c, double mu, const std::string& kind, std::uint64_t seed,
                               double threshold, double t_star, double speed) -> py::object {
        TrialSpec spec;
        spec.config = c;
        spec.mu = mu;
        spec.obs_kind = parse_observation_kind(kind);
        spec.seed = seed;
        spec.threshold = threshold;
        spec.t_star = t_star;
        spec.probe_speed = speed;
        const auto r = binary_search_min_nodes(spec);
        return r.m_h ? py::object(py::int_(*r.m_h)) : py::none();
    }, py::arg("config"), py::arg("mu") = 1000.0, py::arg("kind") = "uniform", py::arg("seed") = 1,
       py::arg("threshold") = 5e-14, py::arg("t_star") = 50.0, py::arg("speed") = 30.0);

    m.def("velocity_sweep", [](const SolverConfig& c, double mu, std::size_t m_nodes, const std::vector<double>& speeds,
                               std::uint64_t seed, double threshold, double time_cap) {
        VelocitySweepOptions opt;
        opt.time_cap = time_cap;
        py::list out;
        for (const auto& r : velocity_sweep(c, mu, m_nodes, speeds, seed, threshold, opt)) {
            py::dict d;
            d["c"] = r.c;
            d["converge_time"] = r.converge_time ? py::object(py::float_(*r.converge_time)) : py::none();
            d["locked"] = r.locked;
            out.append(d);
        }
        return out;
    }, py::arg("config"), py::arg("mu"), py::arg("m"), py::arg("speeds"), py::arg("seed") = 1,
       py::arg("threshold") = 1e-10, py::arg("time_cap") = 200.0);

    m.def("fit_power_law", [](const std::vector<std::pair<double, double>>& pairs) {
        const PowerLawFit f = fit_power_law(pairs);
        py::dict d;
        d["c0"] = f.c0;
        d["p"] = f.p;
        d["log_residual_std"] = f.log_residual_std;
        d["p_stderr"] = f.p_stderr;
        return d;
    }, py::arg("pairs"));

    m.def("length_scale", [](double c0, double p, double nu, double L) {
        PowerLawFit f;
        f.c0 = c0;
        f.p = p;
        f.nu_min = 0.0;
        f.nu_max = 1e300;
        const auto e = estimate_length_scale(f, nu, L);
        return py::make_tuple(e.lambda, e.n_s);
    }, py::arg("c0"), py::arg("p"), py::arg("nu"), py::arg("L") = 1.0);

    m.def("main", [](std::vector<std::string> args) {
        args.insert(args.begin(), "acda");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        py::gil_scoped_release release;
        return run_cli(static_cast<int>(argv.size()), argv.data());
    }, py::arg("args"), "Run the command-line tool in-process; returns its exit code.");
}
