"""End-to-end smoke tests for the python bindings."""

import numpy as np
import pytest

import hybridrank as hr


@pytest.fixture(scope="module")
def pipeline():
    spec = hr.SyntheticSpec(clusters=5, points_per_cluster=40, dim=16, noise=0.2, seed=7)
    data, eval_set = hr.generate_synthetic(spec)
    raw = hr.build_knn_graph(data, k=10, exponent=3)
    norm = hr.symmetric_normalize(raw)
    basis = hr.top_eigenpairs(norm, rank=10)
    return data, eval_set, raw, norm, basis


def test_descriptor_numpy_round_trip():
    vectors = np.random.default_rng(0).normal(size=(8, 4))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    data = hr.DescriptorSet(vectors.astype(np.float32))
    assert data.count == 8 and data.dim == 4
    np.testing.assert_array_equal(data.to_numpy(), vectors.astype(np.float32))


def test_graph_construction(pipeline):
    data, _, raw, norm, _ = pipeline
    assert raw.n == data.count
    assert not raw.normalized and norm.normalized
    assert raw.nnz == norm.nnz
    cm = hr.largest_component(raw)
    assert cm.largest_size <= raw.n

    degrees = raw.degrees()
    assert (degrees >= 0).all()


def test_eigenpairs_and_filters(pipeline):
    _, _, _, norm, basis = pipeline
    assert basis.rank == 10
    evals = basis.eigenvalues
    assert abs(evals[0] - 1.0) < 1e-8
    assert all(evals[i] >= evals[i + 1] for i in range(len(evals) - 1))

    p = hr.FilterParams(0.9)
    assert hr.h_alpha(0.0, p) == pytest.approx(0.1)
    assert hr.g_alpha(0.5, p) == pytest.approx(hr.h_alpha(0.5, p) - 0.1)

    # residual check through the graph matvec
    u0 = basis.column(0)
    residual = norm.matvec(u0) - evals[0] * u0
    assert np.linalg.norm(residual) < 1e-8


def test_hybrid_matches_dense_filter(pipeline):
    data, eval_set, _, norm, basis = pipeline
    p = hr.FilterParams(0.9)
    query = eval_set.queries.to_numpy()[0]
    y = hr.build_observation(query, data, m=5, exponent=3)
    result = hr.hybrid_rank(norm, basis, y, p, max_iters=1000, rel_tol=1e-12)
    oracle = hr.dense_exact_filter(norm, p, y.densify())
    np.testing.assert_allclose(result.scores, oracle, atol=1e-8)
    assert result.report.converged


def test_ranking_modes_and_map(pipeline):
    data, eval_set, raw, norm, basis = pipeline
    p = hr.FilterParams(0.99)
    queries = eval_set.queries.to_numpy()
    vectors = data.to_numpy()

    hybrid_results, nn_results = [], []
    for q in queries:
        y = hr.build_observation(q, data, m=5, exponent=3)
        hybrid_results.append(hr.hybrid_rank(norm, basis, y, p, max_iters=30, rel_tol=1e-8))
        nn_results.append(hr.RankingResult((vectors @ q).astype(np.float64)))

    map_hybrid = hr.mean_average_precision(hybrid_results, eval_set)
    map_nn = hr.mean_average_precision(nn_results, eval_set)
    assert 0.0 <= map_nn <= map_hybrid <= 1.0

    truncated = hr.temporal_rank_truncated(
        raw, data, queries[0], shortlist=raw.n, m=5, exponent=3,
        params=p, max_iters=30, rel_tol=1e-8,
    )
    assert truncated.mode == hr.RankMode.truncated
    assert truncated.report is not None

    fsr = hr.spectral_rank_fsr(basis, hr.build_observation(queries[0], data, 5, 3), p)
    assert len(fsr.order) == data.count


def test_analysis_surface():
    assert hr.cg_error_bound(9.0, 3) == pytest.approx(0.25)
    ratio = hr.condition_number(0.99, 0.7, -1.0) / hr.condition_number(0.99, 1.0, -1.0)
    assert ratio == pytest.approx(0.0326, abs=5e-5)

    spectrum = hr.SpectrumSummary([1.0, 0.8, 0.5, 0.1, -0.4])
    grid = hr.tradeoff_contour(spectrum, alpha=0.99, r_max=3, i_max=5)
    assert grid.shape == (4, 6)
    assert (np.diff(grid, axis=1) <= 1e-12).all()  # falls along iterations
    assert (np.diff(grid, axis=0) <= 1e-12).all()  # falls along rank

    rng = np.random.default_rng(3)
    a = rng.normal(size=(12, 12))
    a = (a + a.T) / 12.0
    f = hr.SeriesFilter([0.3, -0.1, 0.42, 0.05])
    assert hr.verify_series_decomposition(a, f, 4) < 1e-10
    h = hr.apply_series_filter(a, f)
    assert h.shape == (12, 12)


def test_sparsify_and_deflation(pipeline):
    _, _, _, norm, basis = pipeline
    sparse = hr.sparsify(basis, 0.9)
    assert sparse.sparse and sparse.sparsity >= 0.9
    assert hr.basis_storage_bytes(sparse) < hr.basis_storage_bytes(basis)

    p = hr.FilterParams(0.99)
    z = np.random.default_rng(1).normal(size=norm.n)
    out = hr.deflated_matvec(norm, basis, p, z)
    assert out.shape == z.shape

    y = hr.ObservationVector(norm.n, [0, 3], [1.0, 0.5])
    x_deflated, rep_deflated = hr.temporal_term(norm, basis, y, p, max_iters=500, rel_tol=1e-8)
    x_plain, rep_plain = hr.temporal_term(norm, basis.truncated(0), y, p, max_iters=500, rel_tol=1e-8)
    assert rep_deflated.converged and rep_plain.converged
    assert rep_deflated.iterations <= rep_plain.iterations


def test_file_io_round_trip(tmp_path, pipeline):
    data, _, raw, _, basis = pipeline
    dpath = str(tmp_path / "d.hdrk")
    gpath = str(tmp_path / "g.hgrf")
    bpath = str(tmp_path / "b.heig")

    hr.save_descriptors(dpath, data)
    np.testing.assert_array_equal(hr.load_descriptors(dpath).to_numpy(), data.to_numpy())

    hr.save_graph(gpath, raw)
    loaded = hr.load_graph(gpath)
    np.testing.assert_array_equal(loaded.values, raw.values)

    hr.save_basis(bpath, basis)
    np.testing.assert_allclose(hr.load_basis(bpath).eigenvalues, basis.eigenvalues)
