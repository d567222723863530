"""Hybrid spectral-temporal graph filtering for manifold ranking.

The heavy lifting lives in the compiled extension; this package re-exports
its types and operations.
"""

from ._core import (  # noqa: F401
    CGReport,
    ComponentMap,
    DescriptorSet,
    EvalSet,
    FilterParams,
    ObservationVector,
    RankMode,
    RankingResult,
    SeriesFilter,
    SparseGraph,
    SpectralBasis,
    SpectrumSummary,
    SyntheticSpec,
    apply_series_filter,
    basis_storage_bytes,
    build_knn_graph,
    build_observation,
    cg_error_bound,
    condition_number,
    deflated_matvec,
    dense_exact_filter,
    dense_spectrum,
    g_alpha,
    generate_synthetic,
    graph_storage_bytes,
    h_alpha,
    hybrid_rank,
    largest_component,
    load_basis,
    load_descriptors,
    load_graph,
    mean_average_precision,
    save_basis,
    save_descriptors,
    save_graph,
    sparsify,
    spectral_rank_fsr,
    spectral_term,
    symmetric_normalize,
    temporal_rank_truncated,
    temporal_term,
    top_eigenpairs,
    tradeoff_contour,
    truncate_and_renormalize,
    verify_series_decomposition,
)

__version__ = "0.1.0"
