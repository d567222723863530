#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hybrid/descriptors.hpp"

namespace hybrid {

// Sparse symmetric nonnegative zero-diagonal adjacency in compressed-row
// form with sorted column indices. `normalized` distinguishes the raw
// similarity matrix W from D^{-1/2} W D^{-1/2}. Weights are copied to both
// triangles, so symmetry holds bit-exactly.
struct SparseGraph {
    std::size_t n = 0;
    bool normalized = false;
    std::vector<std::uint64_t> row_offsets;  // n+1
    std::vector<std::uint32_t> cols;
    std::vector<double> values;

    std::size_t nnz() const { return cols.size(); }

    // out = A * x
    void matvec(std::span<const double> x, std::span<double> out) const;
    std::vector<double> matvec(std::span<const double> x) const;

    std::vector<double> degrees() const;  // row sums

    // Stored weight at (i,j), 0 if absent. Binary search within the row.
    double entry(std::uint32_t i, std::uint32_t j) const;
};

struct ComponentMap {
    static constexpr std::uint32_t npos = 0xFFFFFFFFu;

    std::vector<std::uint32_t> component_ids;  // per-vertex label
    std::uint32_t largest = 0;                 // label of the largest component
    std::vector<std::uint32_t> to_global;      // largest-component local -> global
    std::vector<std::uint32_t> to_local;       // global -> local, npos outside

    std::size_t component_count = 0;
    std::size_t largest_size() const { return to_global.size(); }
};

// Reciprocal-kNN similarity graph: edge (i,j) exists iff each is in the
// other's top-k by inner product; weight = max(v_i . v_j, 0)^exponent.
// Zero weights are never stored. Ties at rank k break toward the smaller
// vertex index. Requires k < n and exponent >= 1.
SparseGraph build_knn_graph(const DescriptorSet& data, std::size_t k, int exponent);

// W -> D^{-1/2} W D^{-1/2}. Rows of isolated vertices stay empty.
// Throws std::logic_error if the graph is already normalized.
SparseGraph symmetric_normalize(const SparseGraph& g);

// Connected components by BFS in vertex order; labels are assigned in
// order of first-encountered vertex, so the tie-break "largest component,
// then smallest minimum vertex index" is the smallest qualifying label.
ComponentMap largest_component(const SparseGraph& g);

// Restriction of a raw graph to `keep` (sorted/deduplicated internally).
SparseGraph induced_subgraph(const SparseGraph& g, std::span<const std::uint32_t> keep);

struct TruncatedGraph {
    SparseGraph graph;                      // normalized submatrix
    std::vector<std::uint32_t> to_global;   // local -> global
};

// Submatrix of the raw W on `keep`, then symmetric normalization.
TruncatedGraph truncate_and_renormalize(const SparseGraph& raw, std::span<const std::uint32_t> keep);

// File format: magic "HGRF0001", u64 n, u64 nnz, u8 normalized flag,
// (n+1) u64 row offsets, nnz u32 columns, nnz f64 values.
void save_graph(const std::string& path, const SparseGraph& g);
SparseGraph load_graph(const std::string& path);

}  // namespace hybrid
