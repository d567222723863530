// Python bindings for the core operations: graph construction, partial
// eigendecomposition, ranking modes, convergence analysis, synthetic data,
// evaluation, and file I/O.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "hybrid/analysis.hpp"
#include "hybrid/bench.hpp"
#include "hybrid/dense_filter.hpp"
#include "hybrid/eval.hpp"
#include "hybrid/ranking.hpp"
#include "hybrid/synthetic.hpp"

namespace py = pybind11;
using namespace hybrid;

namespace {

DescriptorSet descriptors_from_array(py::array_t<float, py::array::c_style | py::array::forcecast> array) {
    if (array.ndim() != 2) throw std::invalid_argument("descriptors must be a 2-d array");
    DescriptorSet data;
    data.count = static_cast<std::size_t>(array.shape(0));
    data.dim = static_cast<std::size_t>(array.shape(1));
    data.vectors.resize(data.count * data.dim);
    std::memcpy(data.vectors.data(), array.data(), sizeof(float) * data.vectors.size());
    return data;
}

// The (shape, pointer) constructors allocate and copy; constructing an
// empty array and filling it afterwards is not reliable across pybind11
// versions.
py::array_t<float> descriptors_to_array(const DescriptorSet& data) {
    return py::array_t<float>(
        py::array::ShapeContainer{static_cast<py::ssize_t>(data.count), static_cast<py::ssize_t>(data.dim)},
        data.vectors.data());
}

std::vector<double> vector_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> array) {
    if (array.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
    return std::vector<double>(array.data(), array.data() + array.shape(0));
}

py::array_t<double> array_from_vector(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

ObservationVector observation_from_parts(std::size_t n, const std::vector<std::uint32_t>& indices,
                                         const std::vector<double>& values) {
    if (indices.size() != values.size())
        throw std::invalid_argument("observation indices and values must have equal length");
    ObservationVector y;
    y.n = n;
    y.indices = indices;
    y.values = values;
    return y;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "hybrid spectral-temporal graph filtering for manifold ranking";

    py::class_<DescriptorSet>(m, "DescriptorSet")
        .def(py::init(&descriptors_from_array), py::arg("vectors"))
        .def_readonly("count", &DescriptorSet::count)
        .def_readonly("dim", &DescriptorSet::dim)
        .def("to_numpy", &descriptors_to_array);

    py::class_<SparseGraph>(m, "SparseGraph")
        .def_readonly("n", &SparseGraph::n)
        .def_readonly("normalized", &SparseGraph::normalized)
        .def_property_readonly("nnz", &SparseGraph::nnz)
        .def_property_readonly("row_offsets",
                               [](const SparseGraph& g) { return py::array_t<std::uint64_t>(g.row_offsets.size(), g.row_offsets.data()); })
        .def_property_readonly("cols",
                               [](const SparseGraph& g) { return py::array_t<std::uint32_t>(g.cols.size(), g.cols.data()); })
        .def_property_readonly("values",
                               [](const SparseGraph& g) { return py::array_t<double>(g.values.size(), g.values.data()); })
        .def("matvec", [](const SparseGraph& g, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
            return array_from_vector(g.matvec(vector_from_array(x)));
        })
        .def("degrees", [](const SparseGraph& g) { return array_from_vector(g.degrees()); })
        .def("entry", &SparseGraph::entry);

    py::class_<ComponentMap>(m, "ComponentMap")
        .def_readonly("component_ids", &ComponentMap::component_ids)
        .def_readonly("largest", &ComponentMap::largest)
        .def_readonly("to_global", &ComponentMap::to_global)
        .def_readonly("to_local", &ComponentMap::to_local)
        .def_readonly("component_count", &ComponentMap::component_count)
        .def_property_readonly("largest_size", &ComponentMap::largest_size);

    py::class_<FilterParams>(m, "FilterParams")
        .def(py::init([](double alpha) {
                 FilterParams p{alpha};
                 validate(p);
                 return p;
             }),
             py::arg("alpha"))
        .def_readonly("alpha", &FilterParams::alpha);

    py::class_<SpectralBasis>(m, "SpectralBasis")
        .def_readonly("n", &SpectralBasis::n)
        .def_readonly("rank", &SpectralBasis::rank)
        .def_readonly("sparse", &SpectralBasis::sparse)
        .def_readonly("sparsity", &SpectralBasis::sparsity)
        .def_property_readonly("eigenvalues",
                               [](const SpectralBasis& b) { return array_from_vector(b.eigenvalues); })
        .def("column", [](const SpectralBasis& b, std::size_t j) { return array_from_vector(b.column(j)); })
        .def("truncated", &SpectralBasis::truncated, py::arg("rank"))
        .def("stored_nonzeros", &SpectralBasis::stored_nonzeros);

    py::class_<ObservationVector>(m, "ObservationVector")
        .def(py::init(&observation_from_parts), py::arg("n"), py::arg("indices"), py::arg("values"))
        .def_readonly("n", &ObservationVector::n)
        .def_readonly("indices", &ObservationVector::indices)
        .def_readonly("values", &ObservationVector::values)
        .def("empty", &ObservationVector::empty)
        .def("densify", [](const ObservationVector& y) { return array_from_vector(y.densify()); });

    py::class_<CGReport>(m, "CGReport")
        .def_readonly("iterations", &CGReport::iterations)
        .def_readonly("residual_norms", &CGReport::residual_norms)
        .def_readonly("converged", &CGReport::converged);

    py::enum_<RankMode>(m, "RankMode")
        .value("temporal", RankMode::temporal)
        .value("truncated", RankMode::temporal_truncated)
        .value("spectral", RankMode::spectral)
        .value("hybrid", RankMode::hybrid);

    py::class_<RankingResult>(m, "RankingResult")
        .def(py::init([](py::array_t<double, py::array::c_style | py::array::forcecast> scores) {
                 RankingResult r;
                 r.scores = vector_from_array(scores);
                 r.order = sort_descending(r.scores);
                 return r;
             }),
             py::arg("scores"))
        .def_property_readonly("scores", [](const RankingResult& r) { return array_from_vector(r.scores); })
        .def_readonly("order", &RankingResult::order)
        .def_readonly("mode", &RankingResult::mode)
        .def_readonly("report", &RankingResult::report);

    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init([](std::size_t clusters, std::size_t points_per_cluster, std::size_t dim, double noise,
                         std::uint64_t seed) {
                 return SyntheticSpec{clusters, points_per_cluster, dim, noise, seed};
             }),
             py::arg("clusters") = 10, py::arg("points_per_cluster") = 100, py::arg("dim") = 32,
             py::arg("noise") = 0.2, py::arg("seed") = 42)
        .def_readonly("clusters", &SyntheticSpec::clusters)
        .def_readonly("points_per_cluster", &SyntheticSpec::points_per_cluster)
        .def_readonly("dim", &SyntheticSpec::dim)
        .def_readonly("noise", &SyntheticSpec::noise)
        .def_readonly("seed", &SyntheticSpec::seed);

    py::class_<EvalSet>(m, "EvalSet")
        .def_readonly("queries", &EvalSet::queries)
        .def_readonly("relevance", &EvalSet::relevance);

    py::class_<SpectrumSummary>(m, "SpectrumSummary")
        .def(py::init([](const std::vector<double>& eigenvalues, std::optional<double> lambda_min) {
                 SpectrumSummary s;
                 s.eigenvalues = eigenvalues;
                 s.lambda_min_override = lambda_min;
                 return s;
             }),
             py::arg("eigenvalues"), py::arg("lambda_min") = std::nullopt)
        .def_readonly("eigenvalues", &SpectrumSummary::eigenvalues)
        .def("lambda_min", &SpectrumSummary::lambda_min);

    py::class_<SeriesFilter>(m, "SeriesFilter")
        .def(py::init([](const std::vector<double>& coefficients) {
                 SeriesFilter f;
                 f.coefficients = coefficients;
                 return f;
             }),
             py::arg("coefficients"))
        .def_readonly("coefficients", &SeriesFilter::coefficients)
        .def("scalar", &SeriesFilter::scalar)
        .def_static("geometric", &SeriesFilter::geometric, py::arg("alpha"), py::arg("degree"));

    // graph construction
    m.def("build_knn_graph", &build_knn_graph, py::arg("data"), py::arg("k"), py::arg("exponent") = 3);
    m.def("symmetric_normalize", &symmetric_normalize, py::arg("graph"));
    m.def("largest_component", &largest_component, py::arg("graph"));
    m.def(
        "truncate_and_renormalize",
        [](const SparseGraph& raw, const std::vector<std::uint32_t>& keep) {
            auto [sub, map] = truncate_and_renormalize(raw, keep);
            return py::make_tuple(std::move(sub), std::move(map));
        },
        py::arg("raw"), py::arg("keep"));

    // spectral
    m.def(
        "top_eigenpairs",
        [](const SparseGraph& g, std::size_t r, double tol) {
            LanczosOptions opts;
            opts.tol = tol;
            return top_eigenpairs(g, r, opts);
        },
        py::arg("graph"), py::arg("rank"), py::arg("tol") = 1e-8);
    m.def("h_alpha", &h_alpha, py::arg("x"), py::arg("params"));
    m.def("g_alpha", &g_alpha, py::arg("x"), py::arg("params"));
    m.def(
        "spectral_term",
        [](const SpectralBasis& basis, const ObservationVector& y, FilterParams p) {
            return array_from_vector(spectral_term(basis, y, p));
        },
        py::arg("basis"), py::arg("y"), py::arg("params"));
    m.def("sparsify", &sparsify, py::arg("basis"), py::arg("target"));

    // temporal
    m.def(
        "deflated_matvec",
        [](const SparseGraph& g, const SpectralBasis& basis, FilterParams p,
           py::array_t<double, py::array::c_style | py::array::forcecast> z) {
            const DeflatedOperator op(g, basis, p);
            return array_from_vector(op.apply(vector_from_array(z)));
        },
        py::arg("graph"), py::arg("basis"), py::arg("params"), py::arg("z"));
    m.def(
        "temporal_term",
        [](const SparseGraph& g, const SpectralBasis& basis, const ObservationVector& y, FilterParams p,
           std::size_t max_iters, double rel_tol) {
            auto [x, report] = temporal_term(g, basis, y, p, max_iters, rel_tol);
            return py::make_tuple(array_from_vector(x), std::move(report));
        },
        py::arg("graph"), py::arg("basis"), py::arg("y"), py::arg("params"), py::arg("max_iters") = 20,
        py::arg("rel_tol") = 1e-6);

    // ranking
    m.def(
        "build_observation",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> query, const DescriptorSet& data,
           std::size_t m_top, int exponent) {
            if (query.ndim() != 1) throw std::invalid_argument("query must be a 1-d array");
            return build_observation(std::span<const float>(query.data(), static_cast<std::size_t>(query.shape(0))),
                                     data, m_top, exponent);
        },
        py::arg("query"), py::arg("data"), py::arg("m") = 5, py::arg("exponent") = 3);
    m.def("hybrid_rank", &hybrid_rank, py::arg("graph"), py::arg("basis"), py::arg("y"), py::arg("params"),
          py::arg("max_iters") = 20, py::arg("rel_tol") = 1e-6);
    m.def("spectral_rank_fsr", &spectral_rank_fsr, py::arg("basis"), py::arg("y"), py::arg("params"));
    m.def(
        "temporal_rank_truncated",
        [](const SparseGraph& raw, const DescriptorSet& data,
           py::array_t<float, py::array::c_style | py::array::forcecast> query, std::size_t shortlist,
           std::size_t m_top, int exponent, FilterParams p, std::size_t max_iters, double rel_tol) {
            return temporal_rank_truncated(
                raw, data, std::span<const float>(query.data(), static_cast<std::size_t>(query.shape(0))),
                shortlist, m_top, exponent, p, max_iters, rel_tol);
        },
        py::arg("raw"), py::arg("data"), py::arg("query"), py::arg("shortlist"), py::arg("m") = 5,
        py::arg("exponent") = 3, py::arg("params") = FilterParams{0.99}, py::arg("max_iters") = 20,
        py::arg("rel_tol") = 1e-6);

    // analysis
    m.def("dense_spectrum", &dense_spectrum, py::arg("graph"));
    m.def("condition_number", &condition_number, py::arg("alpha"), py::arg("lambda_r1"), py::arg("lambda_n"));
    m.def("cg_error_bound", &cg_error_bound, py::arg("kappa"), py::arg("iteration"));
    m.def(
        "tradeoff_contour",
        [](const SpectrumSummary& spectrum, double alpha, std::size_t r_max, std::size_t i_max) {
            const ContourGrid grid = tradeoff_contour(spectrum, alpha, r_max, i_max);
            return py::array_t<double>(
                py::array::ShapeContainer{static_cast<py::ssize_t>(r_max + 1), static_cast<py::ssize_t>(i_max + 1)},
                grid.phi.data());
        },
        py::arg("spectrum"), py::arg("alpha"), py::arg("r_max"), py::arg("i_max"));
    m.def("apply_series_filter", &apply_series_filter, py::arg("matrix"), py::arg("filter"));
    m.def("verify_series_decomposition", &verify_series_decomposition, py::arg("matrix"), py::arg("filter"),
          py::arg("rank"));

    // harness
    m.def("generate_synthetic", &generate_synthetic, py::arg("spec"));
    m.def(
        "mean_average_precision",
        [](const std::vector<RankingResult>& results, const EvalSet& eval,
           std::optional<std::vector<std::uint32_t>> exclude) {
            return mean_average_precision(results, eval, exclude ? &*exclude : nullptr);
        },
        py::arg("results"), py::arg("eval"), py::arg("exclude") = std::nullopt);
    m.def(
        "dense_exact_filter",
        [](const SparseGraph& g, FilterParams p, py::array_t<double, py::array::c_style | py::array::forcecast> y) {
            return array_from_vector(dense_exact_filter(g, p, vector_from_array(y)));
        },
        py::arg("graph"), py::arg("params"), py::arg("y"));
    m.def("graph_storage_bytes", &graph_storage_bytes, py::arg("graph"));
    m.def("basis_storage_bytes", &basis_storage_bytes, py::arg("basis"));

    // file formats
    m.def("save_descriptors", &save_descriptors, py::arg("path"), py::arg("data"));
    m.def("load_descriptors", &load_descriptors, py::arg("path"));
    m.def("save_graph", &save_graph, py::arg("path"), py::arg("graph"));
    m.def("load_graph", &load_graph, py::arg("path"));
    m.def("save_basis", &save_basis, py::arg("path"), py::arg("basis"));
    m.def("load_basis", &load_basis, py::arg("path"));
}
