#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hybrid/graph.hpp"
#include "hybrid/observation.hpp"

namespace hybrid {

struct FilterParams {
    double alpha = 0.99;
};

// Throws std::invalid_argument unless alpha is in [0,1).
void validate(FilterParams p);

// h_alpha(x) = (1-alpha) / (1-alpha*x) for x in [-1,1]
double h_alpha(double x, FilterParams p);

// g_alpha(x) = h_alpha(x) - h_alpha(0) = (1-alpha)*alpha*x / (1-alpha*x)
double g_alpha(double x, FilterParams p);

// Top-r eigenvalues (descending) and orthonormal eigenvectors of a
// normalized graph. Vectors are stored dense column-major, or in
// compressed-column form after sparsification. Sign convention: each
// column's entry of largest magnitude is positive.
struct SpectralBasis {
    std::size_t n = 0;
    std::size_t rank = 0;
    std::vector<double> eigenvalues;  // size rank, descending
    double sparsity = 0.0;            // fraction of zero entries

    bool sparse = false;
    std::vector<double> dense;                // n*rank column-major when !sparse
    std::vector<std::uint64_t> col_offsets;   // rank+1 when sparse
    std::vector<std::uint32_t> row_indices;
    std::vector<double> sparse_values;

    bool empty() const { return rank == 0; }
    std::size_t stored_nonzeros() const;

    // t = U1^T x, length rank
    std::vector<double> project(std::span<const double> x) const;

    // t = U1^T y for sparse y: rank ops per stored nonzero when dense
    std::vector<double> project(const ObservationVector& y) const;

    // out += scale * U1 * t
    void accumulate(std::span<const double> t, std::span<double> out, double scale = 1.0) const;

    // Sub-basis of the leading r eigenpairs (r <= rank).
    SpectralBasis truncated(std::size_t r) const;

    // Column j as a dense vector (test/tooling convenience).
    std::vector<double> column(std::size_t j) const;
};

struct LanczosOptions {
    double tol = 1e-8;              // residual <= tol * max(1, |lambda|)
    std::size_t max_restarts = 400;
    std::size_t subspace = 0;       // 0 = auto: min(n, max(2r+16, 32))
    std::uint64_t seed = 0x5eedULL;
};

// Thick-restart Lanczos with full reorthogonalization. Breakdowns restart
// with a fresh random direction, which is what recovers multiplicities of
// degenerate eigenvalues (one Krylov sequence alone cannot). Throws
// std::runtime_error with a residual report if the restart budget is
// exhausted.
SpectralBasis top_eigenpairs(const SparseGraph& g, std::size_t r, const LanczosOptions& opts = {});

// x_s = U1 g_alpha(Lambda1) U1^T y, evaluated right-to-left.
std::vector<double> spectral_term(const SpectralBasis& basis, const ObservationVector& y, FilterParams p);
std::vector<double> spectral_term(const SpectralBasis& basis, std::span<const double> y, FilterParams p);

// Zero the globally smallest-magnitude entries of U1 until the zero
// fraction reaches `target`, then store compressed. Eigenvalues are
// untouched. target must be in [0,1).
SpectralBasis sparsify(const SpectralBasis& basis, double target);

// File format: magic "HEIG0001", u64 n, u64 r, u8 sparse flag, r f64
// eigenvalues, then n*r f64 column-major dense values, or (r+1) u64
// column offsets + nnz u32 row indices + nnz f64 values.
void save_basis(const std::string& path, const SpectralBasis& basis);
SpectralBasis load_basis(const std::string& path);

}  // namespace hybrid
