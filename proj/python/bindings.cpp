#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dampnet/config.hpp"
#include "dampnet/control.hpp"
#include "dampnet/damping.hpp"
#include "dampnet/demand.hpp"
#include "dampnet/errors.hpp"
#include "dampnet/experiment.hpp"
#include "dampnet/network.hpp"
#include "dampnet/output.hpp"
#include "dampnet/timefunc.hpp"

namespace py = pybind11;
using namespace dampnet;

namespace {

py::dict series(const std::vector<double>& t, const std::vector<double>& v) {
    py::dict d;
    d["t"] = t;
    d["value"] = v;
    return d;
}

py::dict to_dict(const Experiment& exp, const SimulationResult& r) {
    const auto& net = exp.network();
    py::dict out;
    out["run_index"] = r.run_index;
    py::dict demands;
    for (std::size_t k = 0; k < r.demands.size(); ++k) {
        std::vector<double> t(r.demands[k].size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = r.demands[k].time(i);
        demands[py::str(net.node(net.demand_nodes()[k]).id)] = series(t, r.demands[k].values);
    }
    out["demands"] = demands;
    out["update_times"] = r.policy.update_times;
    py::dict variants;
    for (const auto& v : r.variants) {
        py::dict d;
        py::dict inflow;
        inflow["t"] = v.inflow.times;
        inflow["value"] = v.inflow.values;
        inflow["window"] = v.inflow.window;
        d["inflow"] = inflow;
        py::dict supply, objective;
        for (std::size_t k = 0; k < v.supply.size(); ++k) {
            const py::str id(net.node(net.demand_nodes()[k]).id);
            supply[id] = series(v.supply[k].times, v.supply[k].values);
            py::dict o;
            o["total"] = v.objective[k].total;
            o["per_window"] = v.objective[k].per_window;
            objective[id] = o;
        }
        d["supply"] = supply;
        d["objective"] = objective;
        py::list alphas;
        for (const auto& a : v.alphas) {
            alphas.append(py::make_tuple(net.node(a.junction).id, net.arc(a.child).id, a.t, a.alpha));
        }
        d["alphas"] = alphas;
        d["degenerate_splits"] = v.degenerate_splits;
        variants[py::str(v.label)] = d;
    }
    out["variants"] = variants;
    return out;
}

py::dict stats(const SeriesStats& s) {
    py::dict d;
    d["t"] = s.times;
    d["mean"] = s.mean;
    d["std_error"] = s.std_error;
    return d;
}

py::dict to_dict(const Experiment& exp, const EnsembleResult& e) {
    const auto& net = exp.network();
    py::dict out;
    out["runs"] = e.runs;
    py::dict demand;
    for (std::size_t k = 0; k < e.demand.size(); ++k) demand[py::str(net.node(net.demand_nodes()[k]).id)] = stats(e.demand[k]);
    out["demand"] = demand;
    py::dict variants;
    for (const auto& v : e.variants) {
        py::dict d;
        d["inflow"] = stats(v.inflow);
        py::dict supply;
        for (std::size_t k = 0; k < v.supply.size(); ++k) supply[py::str(net.node(net.demand_nodes()[k]).id)] = stats(v.supply[k]);
        d["supply"] = supply;
        d["objective_mean"] = v.objective_mean;
        d["objective_std_error"] = v.objective_std_error;
        d["max_jump_mean_inflow"] = v.max_jump_mean_inflow;
        d["max_jump_single_inflow"] = v.max_jump_single_inflow;
        variants[py::str(v.label)] = d;
    }
    out["variants"] = variants;
    return out;
}

RunOptions options(bool record_alpha, std::vector<std::string> variants) {
    RunOptions o;
    o.record_alpha = record_alpha;
    o.only_variants = std::move(variants);
    return o;
}

}  // namespace

PYBIND11_MODULE(_dampnet, m) {
    m.doc() = "Optimal inflow control for damped transport on tree networks";

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    static py::exception<DomainError> domain_error(m, "DomainError", error.ptr());
    static py::exception<RangeError> range_error(m, "RangeError", domain_error.ptr());
    static py::exception<NonInvertibleError> non_invertible(m, "NonInvertibleError", domain_error.ptr());
    static py::exception<ValidationError> validation_error(m, "ValidationError", error.ptr());
    static py::exception<SchemaError> schema_error(m, "SchemaError", error.ptr());
    static py::exception<InfeasibleError> infeasible_error(m, "InfeasibleError", error.ptr());
    static py::exception<IoError> io_error(m, "IoError", error.ptr());
    static py::exception<NumericsError> numerics_error(m, "NumericsError", error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const RangeError& e) {
            py::set_error(range_error, e.what());
        } catch (const NonInvertibleError& e) {
            py::set_error(non_invertible, e.what());
        } catch (const DomainError& e) {
            py::set_error(domain_error, e.what());
        } catch (const ValidationError& e) {
            py::set_error(validation_error, e.what());
        } catch (const SchemaError& e) {
            py::set_error(schema_error, e.what());
        } catch (const InfeasibleError& e) {
            py::set_error(infeasible_error, e.what());
        } catch (const IoError& e) {
            py::set_error(io_error, e.what());
        } catch (const NumericsError& e) {
            py::set_error(numerics_error, e.what());
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<SineTerm>(m, "SineTerm")
        .def(py::init<double, double, double>(), py::arg("amplitude"), py::arg("angular_factor"), py::arg("phase") = 0.0)
        .def_readwrite("amplitude", &SineTerm::amplitude)
        .def_readwrite("angular_factor", &SineTerm::angular_factor)
        .def_readwrite("phase", &SineTerm::phase);
    py::class_<StepTerm>(m, "StepTerm")
        .def(py::init<double, double>(), py::arg("at"), py::arg("delta"))
        .def_readwrite("at", &StepTerm::at)
        .def_readwrite("delta", &StepTerm::delta);

    py::class_<TimeFunction>(m, "TimeFunction")
        .def(py::init<double, std::vector<SineTerm>, std::vector<StepTerm>>(), py::arg("constant"),
             py::arg("terms") = std::vector<SineTerm>{}, py::arg("steps") = std::vector<StepTerm>{})
        .def("__call__", &TimeFunction::eval)
        .def("integral", &TimeFunction::integral, py::arg("a"), py::arg("b"))
        .def("advance_by_integral", &TimeFunction::advance_by_integral, py::arg("t_start"), py::arg("target"))
        .def("lower_bound", &TimeFunction::lower_bound)
        .def("upper_bound", &TimeFunction::upper_bound);

    py::class_<DampingShape>(m, "DampingShape")
        .def_static("none", &DampingShape::none)
        .def_static("monomial", py::overload_cast<int, double>(&DampingShape::monomial), py::arg("degree"),
                    py::arg("coefficient"))
        .def_static("reference", py::overload_cast<int>(&DampingShape::monomial), py::arg("degree"))
        .def_property_readonly("degree", &DampingShape::degree)
        .def_property_readonly("coefficient", &DampingShape::coefficient)
        .def_property_readonly("label", &DampingShape::label)
        .def("g_hat", &DampingShape::g_hat)
        .def("G_tilde", &DampingShape::G_tilde)
        .def("G_tilde_inv", &DampingShape::G_tilde_inv);

    m.def("backward_damp", &backward_damp, py::arg("shape"), py::arg("mu"), py::arg("t_start"), py::arg("t_end"),
          py::arg("z_end"));
    m.def("forward_damp", &forward_damp, py::arg("shape"), py::arg("mu"), py::arg("t_start"), py::arg("t_end"),
          py::arg("z_start"));

    py::class_<JacobiDemandSpec>(m, "JacobiDemandSpec")
        .def(py::init([](std::string node, double kappa, TimeFunction theta, double sigma, double d0) {
                 return JacobiDemandSpec{std::move(node), kappa, std::move(theta), sigma, d0};
             }),
             py::arg("node_id"), py::arg("kappa"), py::arg("theta"), py::arg("sigma"), py::arg("d0"))
        .def_readwrite("node_id", &JacobiDemandSpec::node_id)
        .def_readwrite("kappa", &JacobiDemandSpec::kappa)
        .def_readwrite("theta", &JacobiDemandSpec::theta)
        .def_readwrite("sigma", &JacobiDemandSpec::sigma)
        .def_readwrite("d0", &JacobiDemandSpec::d0);

    m.def(
        "simulate_jacobi",
        [](const JacobiDemandSpec& spec, double t0, double T, double dt, std::uint64_t seed) {
            const auto p = simulate_jacobi(spec, t0, T, dt, seed);
            std::vector<double> t(p.size());
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = p.time(i);
            return series(t, p.values);
        },
        py::arg("spec"), py::arg("t0"), py::arg("T"), py::arg("dt"), py::arg("seed"));
    m.def("conditional_mean", &conditional_mean, py::arg("spec"), py::arg("t_cond"), py::arg("d_cond"), py::arg("t"));
    m.def("derive_seed", &derive_seed, py::arg("master_seed"), py::arg("run_index"), py::arg("stream") = 0);

    m.def(
        "validate_config",
        [](const std::filesystem::path& path) {
            auto cfg = load_config(path);
            py::list problems;
            for (const auto& v : cfg.network.validate()) problems.append(py::make_tuple(v.code, v.message));
            return problems;
        },
        py::arg("path"), "Structural violations of the scenario network (empty when valid).");

    py::class_<Experiment>(m, "Experiment")
        .def(py::init([](const std::filesystem::path& path, std::optional<std::uint64_t> seed,
                         std::optional<unsigned> workers) {
                 auto cfg = load_config(path);
                 if (seed) cfg.master_seed = *seed;
                 if (workers) cfg.workers = *workers;
                 return std::make_unique<Experiment>(std::move(cfg));
             }),
             py::arg("path"), py::arg("seed") = py::none(), py::arg("workers") = py::none())
        .def_property_readonly("variant_labels", &Experiment::variant_labels)
        .def_property_readonly("config", [](const Experiment& e) { return to_json(e.config()).dump(); })
        .def(
            "run_single",
            [](const Experiment& e, std::size_t run, bool record_alpha, std::vector<std::string> variants) {
                SimulationResult r;
                {
                    py::gil_scoped_release release;
                    r = e.run_single(run, options(record_alpha, std::move(variants)));
                }
                return to_dict(e, r);
            },
            py::arg("run_index") = 0, py::arg("record_alpha") = true, py::arg("variants") = std::vector<std::string>{})
        .def(
            "run_monte_carlo",
            [](const Experiment& e, std::optional<std::size_t> runs, std::vector<std::string> variants) {
                EnsembleResult r;
                {
                    py::gil_scoped_release release;
                    r = e.run_monte_carlo(runs, options(false, std::move(variants)));
                }
                return to_dict(e, r);
            },
            py::arg("runs") = py::none(), py::arg("variants") = std::vector<std::string>{});
}
