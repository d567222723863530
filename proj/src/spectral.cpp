#include "hybrid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hybrid/io_util.hpp"

namespace hybrid {

void validate(FilterParams p) {
    if (!(p.alpha >= 0.0 && p.alpha < 1.0))
        throw std::invalid_argument("alpha must lie in [0,1)");
}

namespace {
// Eigenvalues of a normalized graph may exceed 1 by rounding; admit that.
constexpr double kDomainSlack = 1e-6;

void check_domain(double x) {
    if (std::abs(x) > 1.0 + kDomainSlack)
        throw std::invalid_argument("filter argument must lie in [-1,1]");
}
}  // namespace

double h_alpha(double x, FilterParams p) {
    validate(p);
    check_domain(x);
    return (1.0 - p.alpha) / (1.0 - p.alpha * x);
}

double g_alpha(double x, FilterParams p) {
    validate(p);
    check_domain(x);
    return (1.0 - p.alpha) * p.alpha * x / (1.0 - p.alpha * x);
}

std::size_t SpectralBasis::stored_nonzeros() const {
    if (sparse) return sparse_values.size();
    std::size_t count = 0;
    for (double v : dense)
        if (v != 0.0) ++count;
    return count;
}

std::vector<double> SpectralBasis::project(std::span<const double> x) const {
    if (x.size() != n) throw std::invalid_argument("basis projection: vector length mismatch");
    std::vector<double> t(rank, 0.0);
    if (sparse) {
        for (std::size_t j = 0; j < rank; ++j) {
            double acc = 0.0;
            for (std::uint64_t p = col_offsets[j]; p < col_offsets[j + 1]; ++p)
                acc += sparse_values[p] * x[row_indices[p]];
            t[j] = acc;
        }
    } else {
        for (std::size_t j = 0; j < rank; ++j) {
            const double* col = dense.data() + j * n;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += col[i] * x[i];
            t[j] = acc;
        }
    }
    return t;
}

std::vector<double> SpectralBasis::project(const ObservationVector& y) const {
    if (y.n != n) throw std::invalid_argument("basis projection: vector length mismatch");
    if (sparse) return project(std::span<const double>(y.densify()));
    std::vector<double> t(rank, 0.0);
    for (std::size_t j = 0; j < rank; ++j) {
        const double* col = dense.data() + j * n;
        double acc = 0.0;
        for (std::size_t p = 0; p < y.indices.size(); ++p) acc += col[y.indices[p]] * y.values[p];
        t[j] = acc;
    }
    return t;
}

void SpectralBasis::accumulate(std::span<const double> t, std::span<double> out, double scale) const {
    if (t.size() != rank || out.size() != n)
        throw std::invalid_argument("basis accumulate: length mismatch");
    if (sparse) {
        for (std::size_t j = 0; j < rank; ++j) {
            const double c = scale * t[j];
            if (c == 0.0) continue;
            for (std::uint64_t p = col_offsets[j]; p < col_offsets[j + 1]; ++p)
                out[row_indices[p]] += c * sparse_values[p];
        }
    } else {
        for (std::size_t j = 0; j < rank; ++j) {
            const double c = scale * t[j];
            if (c == 0.0) continue;
            const double* col = dense.data() + j * n;
            for (std::size_t i = 0; i < n; ++i) out[i] += c * col[i];
        }
    }
}

SpectralBasis SpectralBasis::truncated(std::size_t r) const {
    if (r > rank) throw std::invalid_argument("truncated: requested rank exceeds stored rank");
    SpectralBasis out;
    out.n = n;
    out.rank = r;
    out.eigenvalues.assign(eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(r));
    out.sparse = sparse;
    if (sparse) {
        out.col_offsets.assign(col_offsets.begin(), col_offsets.begin() + static_cast<std::ptrdiff_t>(r + 1));
        const std::uint64_t nnz = out.col_offsets.back();
        out.row_indices.assign(row_indices.begin(), row_indices.begin() + static_cast<std::ptrdiff_t>(nnz));
        out.sparse_values.assign(sparse_values.begin(), sparse_values.begin() + static_cast<std::ptrdiff_t>(nnz));
        out.sparsity = out.n * out.rank == 0 ? 0.0
                                             : 1.0 - static_cast<double>(nnz) / static_cast<double>(out.n * out.rank);
    } else {
        out.dense.assign(dense.begin(), dense.begin() + static_cast<std::ptrdiff_t>(r * n));
        out.sparsity = out.n * out.rank == 0
                           ? 0.0
                           : 1.0 - static_cast<double>(out.stored_nonzeros()) / static_cast<double>(out.n * out.rank);
    }
    return out;
}

std::vector<double> SpectralBasis::column(std::size_t j) const {
    if (j >= rank) throw std::invalid_argument("column index out of range");
    std::vector<double> out(n, 0.0);
    if (sparse) {
        for (std::uint64_t p = col_offsets[j]; p < col_offsets[j + 1]; ++p)
            out[row_indices[p]] = sparse_values[p];
    } else {
        std::copy(dense.begin() + static_cast<std::ptrdiff_t>(j * n),
                  dense.begin() + static_cast<std::ptrdiff_t>((j + 1) * n), out.begin());
    }
    return out;
}

std::vector<double> spectral_term(const SpectralBasis& basis, const ObservationVector& y, FilterParams p) {
    validate(p);
    if (basis.empty()) return std::vector<double>(y.n, 0.0);
    if (basis.n != y.n) throw std::invalid_argument("spectral_term: observation length does not match basis");
    std::vector<double> t = basis.project(y);
    for (std::size_t j = 0; j < basis.rank; ++j) t[j] *= g_alpha(basis.eigenvalues[j], p);
    std::vector<double> out(basis.n, 0.0);
    basis.accumulate(t, out);
    return out;
}

std::vector<double> spectral_term(const SpectralBasis& basis, std::span<const double> y, FilterParams p) {
    validate(p);
    if (basis.empty()) return std::vector<double>(y.size(), 0.0);
    if (y.size() != basis.n) throw std::invalid_argument("spectral_term: observation length does not match basis");
    std::vector<double> t = basis.project(y);
    for (std::size_t j = 0; j < basis.rank; ++j) t[j] *= g_alpha(basis.eigenvalues[j], p);
    std::vector<double> out(basis.n, 0.0);
    basis.accumulate(t, out);
    return out;
}

SpectralBasis sparsify(const SpectralBasis& basis, double target) {
    if (basis.sparse) throw std::logic_error("sparsify: basis is already sparse");
    if (!(target >= 0.0 && target < 1.0))
        throw std::invalid_argument("sparsify: target sparsity must lie in [0,1)");

    const std::size_t total = basis.n * basis.rank;
    if (total == 0) {
        SpectralBasis out = basis;
        return out;
    }

    const auto needed = static_cast<std::size_t>(std::ceil(target * static_cast<double>(total)));
    const std::size_t natural = total - basis.stored_nonzeros();
    if (needed <= natural) {
        SpectralBasis out = basis;
        out.sparsity = static_cast<double>(natural) / static_cast<double>(total);
        return out;
    }

    // Global magnitude threshold, then zero ties in storage order until
    // the count is met, keeping the result deterministic.
    std::vector<double> mags(total);
    for (std::size_t i = 0; i < total; ++i) mags[i] = std::abs(basis.dense[i]);
    std::vector<double> sorted = mags;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(needed - 1), sorted.end());
    const double threshold = sorted[needed - 1];

    std::size_t zeroed = 0;
    std::vector<char> kill(total, 0);
    for (std::size_t i = 0; i < total && zeroed < needed; ++i) {
        if (mags[i] < threshold) {
            kill[i] = 1;
            ++zeroed;
        }
    }
    for (std::size_t i = 0; i < total && zeroed < needed; ++i) {
        if (!kill[i] && mags[i] == threshold) {
            kill[i] = 1;
            ++zeroed;
        }
    }

    SpectralBasis out;
    out.n = basis.n;
    out.rank = basis.rank;
    out.eigenvalues = basis.eigenvalues;
    out.sparse = true;
    out.col_offsets.assign(basis.rank + 1, 0);
    for (std::size_t j = 0; j < basis.rank; ++j) {
        for (std::size_t i = 0; i < basis.n; ++i) {
            const std::size_t flat = j * basis.n + i;
            if (!kill[flat] && basis.dense[flat] != 0.0) {
                out.row_indices.push_back(static_cast<std::uint32_t>(i));
                out.sparse_values.push_back(basis.dense[flat]);
            }
        }
        out.col_offsets[j + 1] = out.sparse_values.size();
    }
    out.sparsity = 1.0 - static_cast<double>(out.sparse_values.size()) / static_cast<double>(total);
    return out;
}

namespace {
constexpr char kMagic[9] = "HEIG0001";
}

void save_basis(const std::string& path, const SpectralBasis& basis) {
    auto out = io::open_output(path);
    io::write_magic(out, kMagic);
    io::write_value<std::uint64_t>(out, basis.n);
    io::write_value<std::uint64_t>(out, basis.rank);
    io::write_value<std::uint8_t>(out, basis.sparse ? 1 : 0);
    io::write_span<double>(out, basis.eigenvalues);
    if (basis.sparse) {
        io::write_span<std::uint64_t>(out, basis.col_offsets);
        io::write_span<std::uint32_t>(out, basis.row_indices);
        io::write_span<double>(out, basis.sparse_values);
    } else {
        io::write_span<double>(out, basis.dense);
    }
    if (!out) throw std::runtime_error("failed writing basis file: " + path);
}

SpectralBasis load_basis(const std::string& path) {
    auto in = io::open_input(path);
    io::expect_magic(in, kMagic, "basis");
    SpectralBasis basis;
    basis.n = io::read_value<std::uint64_t>(in);
    basis.rank = io::read_value<std::uint64_t>(in);
    basis.sparse = io::read_value<std::uint8_t>(in) != 0;
    basis.eigenvalues = io::read_vector<double>(in, basis.rank);
    const std::size_t total = basis.n * basis.rank;
    if (basis.sparse) {
        basis.col_offsets = io::read_vector<std::uint64_t>(in, basis.rank + 1);
        const std::uint64_t nnz = basis.col_offsets.empty() ? 0 : basis.col_offsets.back();
        basis.row_indices = io::read_vector<std::uint32_t>(in, nnz);
        basis.sparse_values = io::read_vector<double>(in, nnz);
        basis.sparsity = total == 0 ? 0.0 : 1.0 - static_cast<double>(nnz) / static_cast<double>(total);
    } else {
        basis.dense = io::read_vector<double>(in, total);
        basis.sparsity =
            total == 0 ? 0.0 : 1.0 - static_cast<double>(basis.stored_nonzeros()) / static_cast<double>(total);
    }
    return basis;
}

}  // namespace hybrid
