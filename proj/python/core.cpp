#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "bal/cdd.hpp"
#include "bal/clustering.hpp"
#include "bal/featio.hpp"
#include "bal/harness.hpp"
#include "bal/orchestrator.hpp"
#include "bal/pool.hpp"
#include "bal/rundir.hpp"
#include "bal/samplers.hpp"

namespace py = pybind11;
using namespace bal;

namespace {

using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U32Array = py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>;

FeatureMatrix matrix_from_numpy(const F32Array& x, std::optional<U32Array> labels, std::uint32_t class_count) {
    if (x.ndim() != 2) throw InvalidArgument("features must be a 2-D array");
    FeatureMatrix m;
    m.n_rows = static_cast<std::size_t>(x.shape(0));
    m.n_cols = static_cast<std::size_t>(x.shape(1));
    m.data.assign(x.data(), x.data() + x.size());
    if (labels) {
        if (labels->ndim() != 1 || static_cast<std::size_t>(labels->shape(0)) != m.n_rows) {
            throw InvalidArgument("labels must be a 1-D array with one entry per row");
        }
        m.labels = std::vector<std::uint32_t>(labels->data(), labels->data() + labels->size());
        if (class_count == 0) {
            for (auto l : *m.labels) class_count = std::max(class_count, l + 1);
        }
        m.class_count = class_count;
    }
    m.validate();
    return m;
}

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

Matrix from_numpy(const F64Array& a) {
    if (a.ndim() != 2) throw InvalidArgument("expected a 2-D array");
    return Matrix(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                  std::vector<double>(a.data(), a.data() + a.size()));
}

RunConfig config_from_string(const std::string& text) {
    return config_from_json(nlohmann::json::parse(text.empty() ? "{}" : text));
}

py::dict selection_dict(const Selection& s) {
    py::dict d;
    d["indices"] = s.indices;
    d["scores"] = s.scores;
    d["shortfall"] = s.shortfall;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Balanced active-learning selection engine";

    static py::exception<Error> base_error(m, "BalError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base_error.ptr());
    py::register_exception<FormatError>(m, "FormatError", base_error.ptr());
    py::register_exception<PoolExhausted>(m, "PoolExhausted", base_error.ptr());

    py::class_<FeatureMatrix>(m, "FeatureMatrix")
        .def(py::init(&matrix_from_numpy), py::arg("features"), py::arg("labels") = py::none(),
             py::arg("class_count") = 0)
        .def_readonly("n_rows", &FeatureMatrix::n_rows)
        .def_readonly("n_cols", &FeatureMatrix::n_cols)
        .def_readonly("class_count", &FeatureMatrix::class_count)
        .def_property_readonly("features",
                               [](const FeatureMatrix& f) {
                                   py::array_t<float> out({f.n_rows, f.n_cols});
                                   std::copy(f.data.begin(), f.data.end(), out.mutable_data());
                                   return out;
                               })
        .def_property_readonly("labels",
                               [](const FeatureMatrix& f) -> py::object {
                                   if (!f.labels) return py::none();
                                   py::array_t<std::uint32_t> out(f.labels->size());
                                   std::copy(f.labels->begin(), f.labels->end(), out.mutable_data());
                                   return out;
                               })
        .def("without_labels", &FeatureMatrix::without_labels)
        .def("__eq__", [](const FeatureMatrix& a, const FeatureMatrix& b) { return a == b; });

    m.def("read_fmat", &read_fmat, py::arg("path"));
    m.def("write_fmat", [](const FeatureMatrix& f, const std::filesystem::path& p) { write_fmat(f, p); },
          py::arg("matrix"), py::arg("path"));
    m.def("read_csv", &read_csv, py::arg("path"), py::arg("has_label_column") = false);

    m.def(
        "synth_generate",
        [](std::size_t classes, std::size_t per_class, std::size_t dim, double spread, double separation,
           std::uint64_t seed) {
            return synth_generate({classes, per_class, dim, spread, separation, seed});
        },
        py::arg("classes") = 10, py::arg("per_class") = 200, py::arg("dim") = 16, py::arg("spread") = 1.0,
        py::arg("separation") = 4.0, py::arg("seed") = 0);

    m.def(
        "kmeans",
        [](const FeatureMatrix& f, std::size_t k, std::uint64_t seed, std::size_t max_iter, double tol) {
            const Clustering c = kmeans_fit(f, {k, seed, max_iter, tol});
            py::dict d;
            d["centroids"] = to_numpy(c.centroids);
            d["assignments"] = c.assignments;
            d["inertia"] = c.inertia;
            d["iterations"] = c.iterations;
            d["inertia_history"] = c.inertia_history;
            return d;
        },
        py::arg("matrix"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iter") = 300, py::arg("tol") = 1e-4);

    m.def(
        "score_rows",
        [](const FeatureMatrix& f, const F64Array& centroids, const std::string& metric) {
            return score_rows(f, from_numpy(centroids), parse_metric(metric));
        },
        py::arg("matrix"), py::arg("centroids"), py::arg("metric") = "cdd");

    m.def(
        "sort_scores",
        [](std::vector<double> scores, const std::string& metric, const std::string& direction) {
            return sort_scores(std::move(scores), parse_metric(metric), parse_direction(direction)).order;
        },
        py::arg("scores"), py::arg("metric") = "cdd", py::arg("direction") = "ascending");

    m.def(
        "subpool_window",
        [](std::size_t n, std::size_t cycles, double beta, std::size_t cycle) {
            const Window w = subpool_window(n, cycles, beta, cycle);
            return py::make_tuple(w.start, w.end);
        },
        py::arg("n"), py::arg("cycles"), py::arg("beta"), py::arg("cycle"));
    m.def("beta_feasible", &beta_feasible, py::arg("beta"), py::arg("budget"), py::arg("cycles"), py::arg("n"));

    m.def(
        "select_confidence",
        [](std::vector<std::size_t> members, const F64Array& probs, std::size_t k) {
            return selection_dict(select_confidence(members, from_numpy(probs), k));
        },
        py::arg("members"), py::arg("probs"), py::arg("k"));
    m.def(
        "select_entropy",
        [](std::vector<std::size_t> members, const F64Array& probs, std::size_t k) {
            return selection_dict(select_entropy(members, from_numpy(probs), k));
        },
        py::arg("members"), py::arg("probs"), py::arg("k"));
    m.def(
        "select_cluster",
        [](std::vector<std::size_t> members, const FeatureMatrix& f, std::size_t k, std::uint64_t seed) {
            return selection_dict(select_cluster(members, f, k, seed));
        },
        py::arg("members"), py::arg("matrix"), py::arg("k"), py::arg("seed") = 0);
    m.def(
        "select_random",
        [](std::vector<std::size_t> members, std::size_t k, std::uint64_t seed) {
            return selection_dict(select_random(members, k, seed));
        },
        py::arg("members"), py::arg("k"), py::arg("seed") = 0);

    py::class_<RunState>(m, "RunState")
        .def_readonly("accuracy_trace", &RunState::accuracy_trace)
        .def_readonly("beta", &RunState::beta)
        .def_readonly("pool_size", &RunState::pool_size)
        .def_readonly("oracle_queries", &RunState::oracle_queries)
        .def_property_readonly("labeled", [](const RunState& s) { return s.labels.labeled(); })
        .def_property_readonly("manifests",
                               [](const RunState& s) {
                                   py::list out;
                                   for (const auto& mf : s.labels.per_cycle()) {
                                       py::dict d;
                                       d["cycle"] = mf.cycle;
                                       d["beta"] = mf.beta;
                                       d["subpool_start"] = mf.subpool_start;
                                       d["subpool_end"] = mf.subpool_end;
                                       d["selected"] = mf.selected;
                                       d["scores"] = mf.scores;
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def_property_readonly("trace_csv", [](const RunState& s) { return format_trace_csv(s.cycles); });

    m.def("normalize_config", [](const std::string& text) { return config_to_json(config_from_string(text)).dump(); },
          py::arg("config_json"));
    m.def(
        "run_bal",
        [](const std::string& config, const FeatureMatrix& f, const FeatureMatrix* eval) {
            const RunConfig c = config_from_string(config);
            py::gil_scoped_release release;
            return run_bal(c, f, eval);
        },
        py::arg("config_json"), py::arg("matrix"), py::arg("eval") = nullptr);
    m.def(
        "run_baseline_random",
        [](const std::string& config, const FeatureMatrix& f, const FeatureMatrix* eval) {
            const RunConfig c = config_from_string(config);
            py::gil_scoped_release release;
            return run_baseline_random(c, f, eval);
        },
        py::arg("config_json"), py::arg("matrix"), py::arg("eval") = nullptr);
    m.def(
        "write_run_dir",
        [](const std::filesystem::path& dir, const std::string& config, const RunState& s) {
            write_run_dir(dir, config_from_string(config), s);
        },
        py::arg("path"), py::arg("config_json"), py::arg("state"));
    m.def("read_run_dir", &read_run_dir, py::arg("path"), py::arg("pool_size"));
    m.def("subpool_class_balance", &subpool_class_balance, py::arg("state"), py::arg("matrix"));
}
