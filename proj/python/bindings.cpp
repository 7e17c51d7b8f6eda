#include "combipen/envelopes.hpp"
#include "combipen/estimators.hpp"
#include "combipen/lab.hpp"
#include "combipen/penalty.hpp"
#include "combipen/structure.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace combipen;

namespace {

SupportSet to_set(int d, const std::vector<int>& members) { return SupportSet(d, std::span<const int>(members)); }

PenaltySpec make_spec(std::string_view kind, double p) {
    PenaltySpec spec;
    spec.kind = parse_penalty_kind(kind);
    spec.p = p;
    return spec;
}

py::dict certificate_dict(const CoverCertificate& c) {
    py::dict out;
    out["value"] = c.value;
    out["feasible"] = c.feasible;
    out["converged"] = c.converged;
    out["gap"] = c.gap;
    out["alpha"] = c.alpha;
    out["eta"] = c.eta;
    out["kappa"] = c.kappa;
    return out;
}

py::dict fit_dict(const FitResult& r) {
    py::dict out;
    out["w"] = r.w;
    out["support"] = support_of(r.w).members();
    out["objective"] = r.objective;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    return out;
}

} // namespace

PYBIND11_MODULE(_combipen, m) {
    m.doc() = "Combinatorial penalties with lp regularization";

    py::register_exception<Error>(m, "CombipenError", PyExc_ValueError);

    py::class_<SetFunction>(m, "SetFunction")
        .def(py::init([](std::string_view spec, int d) { return parse_set_function(spec, d); }), py::arg("spec"),
             py::arg("d"))
        .def_property_readonly("d", &SetFunction::ground_size)
        .def("__call__", [](const SetFunction& f, const std::vector<int>& s) { return f(to_set(f.ground_size(), s)); })
        .def("table", [](const SetFunction& f) { return tabulate(f); })
        .def("is_monotone", [](const SetFunction& f) { return is_monotone(f); })
        .def("is_submodular", [](const SetFunction& f) { return is_submodular(f); })
        .def("rho", [](const SetFunction& f) -> std::optional<double> {
            const auto r = rho_submodularity(f);
            return r ? std::optional<double>(r->value) : std::nullopt;
        })
        .def("weak_ratio", [](const SetFunction& f) { return min_weak_submodularity_ratio(f); })
        .def(
            "stable_sets",
            [](const SetFunction& f, const std::string& mode) {
                if (mode != "weak" && mode != "strong") throw InvalidArgument("mode must be weak or strong");
                std::vector<std::vector<int>> out;
                for (const auto& s : enumerate_stable_sets(f, mode == "weak" ? StabilityMode::weak : StabilityMode::strong))
                    out.push_back(s.members());
                return out;
            },
            py::arg("mode") = "strong");

    m.def(
        "from_table",
        [](int d, std::vector<double> values) { return make_table(d, std::move(values)); }, py::arg("d"),
        py::arg("values"));

    py::class_<Penalty>(m, "Penalty")
        .def(py::init([](const SetFunction& f, const std::string& kind, double p, const std::string& atoms) {
                 return Penalty(make_spec(kind, p), std::make_shared<const AtomCollection>(make_atoms(atoms, f)));
             }),
             py::arg("fn"), py::arg("kind") = "nonhom", py::arg("p") = kInf, py::arg("atoms") = "intervals")
        .def_static(
            "named", [](const std::string& name, int d) { return make_named_penalty(name, d); }, py::arg("name"),
            py::arg("d"))
        .def_property_readonly("d", &Penalty::dim)
        .def_property_readonly("description", [](const Penalty& p) { return p.spec().describe(); })
        .def("__call__", &Penalty::value, py::arg("w"))
        .def("certificate", [](const Penalty& p, const Vector& w) { return certificate_dict(p.certificate(w)); })
        .def(
            "prox", [](const Penalty& p, const Vector& v, double t) { return p.prox(v, t); }, py::arg("v"),
            py::arg("t"))
        .def(
            "margin",
            [](const Penalty& p, const Vector& w, const std::vector<int>& j) {
                return decomposability_margin(p.spec(), p.atoms(), w, to_set(p.dim(), j)).margin;
            },
            py::arg("w"), py::arg("support"))
        .def("with_weights", &Penalty::with_weights, py::arg("c"));

    m.def(
        "lce",
        [](const Penalty& p) { return lce(p.atoms(), p.spec().kind); }, py::arg("penalty"));
    m.def("berhu", &berhu, py::arg("w"));
    m.def("lovasz", &lovasz_extension, py::arg("fn"), py::arg("w"));

    m.def(
        "fit",
        [](const Matrix& x, const Vector& y, const Penalty& penalty, double lambda, std::optional<double> alpha,
           const std::string& pilot) {
            const RegressionProblem problem(x, y);
            if (!alpha) return fit_dict(fit(problem, penalty, lambda));
            AdaptiveConfig config;
            config.alpha = *alpha;
            config.pilot = parse_pilot(pilot);
            return fit_dict(fit_adaptive(problem, penalty, lambda, config));
        },
        py::arg("x"), py::arg("y"), py::arg("penalty"), py::arg("lam"), py::arg("adaptive_alpha") = py::none(),
        py::arg("pilot") = "ols");

    m.def(
        "path",
        [](const Matrix& x, const Vector& y, const Penalty& penalty, int points, double lambda_min, double lambda_max,
           std::optional<Vector> truth) {
            PathOptions options;
            options.points = points;
            options.lambda_min = lambda_min;
            options.lambda_max = lambda_max;
            const auto result =
                regularization_path(RegressionProblem(x, y), penalty, options, truth ? &*truth : nullptr);
            py::list out;
            for (const auto& pt : result.points) {
                py::dict row;
                row["lambda"] = pt.lambda;
                row["w"] = pt.w;
                row["support"] = pt.support.members();
                row["ok"] = pt.ok;
                row["hamming"] = pt.hamming;
                row["est_error"] = pt.est_error;
                out.append(row);
            }
            return out;
        },
        py::arg("x"), py::arg("y"), py::arg("penalty"), py::arg("points") = 40, py::arg("lambda_min") = 1e-6,
        py::arg("lambda_max") = 1e3, py::arg("truth") = py::none());

    m.def(
        "instance",
        [](int d, int k, int n, double rho, double sigma, std::uint64_t seed, bool normalize) {
            InstanceOptions io;
            io.normalize_columns = normalize;
            const DesignSpec design{rho > 0 ? DesignKind::correlated : DesignKind::iid, rho};
            const auto inst = generate_instance(d, k, n, design, sigma, seed, io);
            py::dict out;
            out["x"] = inst.x;
            out["y"] = inst.y;
            out["w"] = inst.w_star;
            out["support"] = inst.support.members();
            return out;
        },
        py::arg("d"), py::arg("k"), py::arg("n"), py::arg("rho") = 0.0, py::arg("sigma") = 0.01, py::arg("seed") = 1,
        py::arg("normalize") = true);

    m.def(
        "experiment",
        [](const std::string& config_text) {
            std::istringstream in(config_text);
            const auto config = parse_experiment_config(in);
            ExperimentResult result;
            {
                py::gil_scoped_release release;
                result = run_experiment(config);
            }
            std::ostringstream csv;
            emit_csv(csv, result.rows);
            return py::make_tuple(csv.str(), result.failures);
        },
        py::arg("config") = "");
}
