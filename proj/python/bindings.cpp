#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "paddle/baselines.hpp"
#include "paddle/bench.hpp"
#include "paddle/error.hpp"
#include "paddle/model.hpp"
#include "paddle/solver.hpp"
#include "paddle/taskgen.hpp"

namespace py = pybind11;
using namespace paddle;

namespace {

// Assignment matrices cross the boundary as (rows, n_query) pairs.
AssignmentMatrix as_assignments(const Matrix& rows, std::size_t n_query)
{
    if (n_query > static_cast<std::size_t>(rows.rows())) {
        throw ConfigError("n_query exceeds the number of rows");
    }
    return AssignmentMatrix{rows, n_query};
}

py::dict state_dict(const SolverState& s)
{
    py::dict out;
    out["u"] = s.u.rows;
    out["w"] = s.w.w;
    out["v"] = s.v.v;
    out["iterations"] = s.iteration;
    out["criterion"] = s.criterion;
    out["converged"] = s.converged;
    py::list trace;
    for (const auto& e : s.trace) {
        trace.append(py::make_tuple(e.iteration, e.criterion, e.objective, e.elapsed_seconds));
    }
    out["trace"] = trace;
    out["labels"] = predict_labels(s.u);
    return out;
}

SolverConfig solver_config(std::optional<double> lambda, double epsilon, int max_iters,
                           double tol, bool trace)
{
    SolverConfig c;
    c.lambda = lambda;
    c.epsilon = epsilon;
    c.max_iters = max_iters;
    c.tol = tol;
    c.record_trace = trace;
    c.validate();
    return c;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "PADDLE transductive few-shot solver";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<InvariantError>(m, "InvariantError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", error.ptr());

    py::class_<FeatureBank>(m, "FeatureBank")
        .def_readonly("dim", &FeatureBank::dim)
        .def_property_readonly("class_ids",
                               [](const FeatureBank& b) {
                                   std::vector<std::uint32_t> ids;
                                   for (const auto& c : b.classes) {
                                       ids.push_back(c.class_id);
                                   }
                                   return ids;
                               })
        .def("vectors",
             [](const FeatureBank& b, std::uint32_t class_id) -> Eigen::MatrixXf {
                 const auto* c = b.find(class_id);
                 if (!c) {
                     throw ConfigError("no class " + std::to_string(class_id));
                 }
                 return c->vectors;
             })
        .def("__len__", &FeatureBank::total_vectors)
        .def("__eq__", [](const FeatureBank& a, const FeatureBank& b) { return a == b; });

    py::class_<TaskInstance>(m, "Task")
        .def_static(
            "from_blocks",
            [](const Matrix& support, std::vector<int> labels, const Matrix& query,
               std::vector<int> truth, int k_total) {
                auto t = TaskInstance::from_blocks(support, std::move(labels), query,
                                                   std::move(truth), k_total);
                t.validate();
                return t;
            },
            py::arg("support"), py::arg("support_labels"), py::arg("query"),
            py::arg("query_truth"), py::arg("k_total"))
        .def_readonly("features", &TaskInstance::features)
        .def_readonly("n_query", &TaskInstance::n_query)
        .def_readonly("support_labels", &TaskInstance::support_labels)
        .def_readonly("query_truth", &TaskInstance::query_truth)
        .def_readonly("k_total", &TaskInstance::k_total)
        .def_readonly("k_effective", &TaskInstance::k_effective)
        .def_readonly("class_ids", &TaskInstance::class_ids);

    m.def("load_feature_bank", &load_feature_bank, py::arg("path"));
    m.def(
        "save_feature_bank",
        [](const FeatureBank& bank, const std::filesystem::path& path, const std::string& fmt) {
            if (fmt != "binary" && fmt != "csv") {
                throw ConfigError("format must be binary or csv");
            }
            save_feature_bank(bank, path, fmt == "csv" ? BankFormat::csv : BankFormat::binary);
        },
        py::arg("bank"), py::arg("path"), py::arg("format") = "binary");
    m.def("synth_gaussian_bank", &synth_gaussian_bank, py::arg("k"), py::arg("dim"),
          py::arg("per_class"), py::arg("separation"), py::arg("seed"));

    m.def(
        "generate_task",
        [](const FeatureBank& bank, int k_total, int k_effective, int shots, int query_size,
           std::uint64_t seed) {
            return generate_task(bank,
                                 TaskSpec{k_total, k_effective, shots, query_size, seed,
                                          std::nullopt});
        },
        py::arg("bank"), py::arg("k_total"), py::arg("k_effective"), py::arg("shots"),
        py::arg("query_size"), py::arg("seed"));

    m.def(
        "solve",
        [](const TaskInstance& task, std::optional<double> lambda, double epsilon, int max_iters,
           double tol, bool trace) {
            const auto config = solver_config(lambda, epsilon, max_iters, tol, trace);
            SolverState state;
            {
                py::gil_scoped_release release;
                state = solve(task, config);
            }
            return state_dict(state);
        },
        py::arg("task"), py::arg("lam") = py::none(), py::arg("epsilon") = 1e-12,
        py::arg("max_iters") = 500, py::arg("tol") = 1e-6, py::arg("trace") = false);

    m.def(
        "kmeans_partial",
        [](const TaskInstance& task, int max_iters, double tol) {
            return state_dict(kmeans_partial(task, solver_config(0.0, 1e-12, max_iters, tol, false)));
        },
        py::arg("task"), py::arg("max_iters") = 500, py::arg("tol") = 1e-6);

    m.def(
        "pgd_solve",
        [](const TaskInstance& task, std::optional<double> lambda, double step_size,
           int max_iters, double tol) {
            PgdConfig c;
            c.step_size = step_size;
            c.max_iters = max_iters;
            c.tol = tol;
            c.validate();
            return state_dict(
                pgd_solve(task, c, lambda.value_or(static_cast<double>(task.n_query))));
        },
        py::arg("task"), py::arg("lam") = py::none(), py::arg("step_size") = 1e-3,
        py::arg("max_iters") = 20000, py::arg("tol") = 1e-6);

    m.def("inductive_baseline", &inductive_baseline, py::arg("task"));

    m.def(
        "objective",
        [](const Matrix& u, std::size_t n_query, const Matrix& w, const Matrix& z,
           double lambda) { return objective(as_assignments(u, n_query), PrototypeSet{w}, z, lambda); },
        py::arg("u"), py::arg("n_query"), py::arg("w"), py::arg("z"), py::arg("lam"));
    m.def(
        "regularized_objective",
        [](const Matrix& u, std::size_t n_query, const Matrix& w, const Vector& v,
           const Matrix& z, double lambda, double epsilon) {
            return regularized_objective(as_assignments(u, n_query), PrototypeSet{w},
                                         DualVector{v}, z, lambda, epsilon);
        },
        py::arg("u"), py::arg("n_query"), py::arg("w"), py::arg("v"), py::arg("z"),
        py::arg("lam"), py::arg("epsilon") = 1e-12);
    m.def(
        "class_proportions",
        [](const Matrix& u, std::size_t n_query) {
            return class_proportions(as_assignments(u, n_query));
        },
        py::arg("u"), py::arg("n_query"));
    m.def(
        "label_cost",
        [](const Vector& proportions, double threshold) {
            return label_cost(proportions, threshold);
        },
        py::arg("proportions"), py::arg("threshold") = 0.0);
    m.def(
        "predict_labels",
        [](const Matrix& u, std::size_t n_query) {
            return predict_labels(as_assignments(u, n_query));
        },
        py::arg("u"), py::arg("n_query"));
    m.def("entropy", &entropy, py::arg("p"));
    m.def("simplex_project", &simplex_project, py::arg("v"));
    m.def(
        "relaxation_curve",
        [](int n_points) {
            std::vector<std::tuple<double, double, int>> out;
            for (const auto& p : relaxation_curve(n_points)) {
                out.emplace_back(p.proportion, p.relaxed_cost, p.label_cost);
            }
            return out;
        },
        py::arg("n_points") = 101);
}
