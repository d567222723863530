#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hybrid/graph.hpp"
#include "hybrid/observation.hpp"
#include "hybrid/spectral.hpp"

namespace hybrid {

struct CGReport {
    std::size_t iterations = 0;
    std::vector<double> residual_norms;  // length iterations + 1, includes initial
    bool converged = false;
};

// z -> (z - alpha*(W z - U1 Lambda1 U1^T z)) / (1 - alpha), the
// positive-definite regularized Laplacian of the deflated adjacency.
// The dense matrix is never formed; cost is O(nnz(W) + n*r) per apply.
class DeflatedOperator {
public:
    DeflatedOperator(const SparseGraph& g, const SpectralBasis& basis, FilterParams p);

    std::size_t size() const { return graph_->n; }

    void apply(std::span<const double> z, std::span<double> out) const;

    std::vector<double> apply(std::span<const double> z) const {
        std::vector<double> out(size());
        apply(z, out);
        return out;
    }

    void operator()(std::span<const double> z, std::span<double> out) const { apply(z, out); }

private:
    const SparseGraph* graph_;
    const SpectralBasis* basis_;
    double alpha_;
};

// Standard conjugate gradient from x0 = 0 on a symmetric positive-definite
// black-box operator. Stops when ||r|| / ||b|| <= rel_tol or after
// max_iters, whichever comes first. Throws std::runtime_error on
// non-finite values.
template <typename MatVec>
std::pair<std::vector<double>, CGReport>
conjugate_gradient(MatVec&& apply_op, std::span<const double> b, std::size_t max_iters, double rel_tol) {
    if (rel_tol <= 0.0) throw std::invalid_argument("conjugate_gradient: rel_tol must be positive");
    const std::size_t n = b.size();

    std::vector<double> x(n, 0.0);
    std::vector<double> r(b.begin(), b.end());
    CGReport report;

    double rs = 0.0;
    for (double v : r) rs += v * v;
    const double norm_b = std::sqrt(rs);
    report.residual_norms.push_back(norm_b);
    if (norm_b == 0.0) {
        report.converged = true;
        return {std::move(x), std::move(report)};
    }
    const double threshold = rel_tol * norm_b;

    std::vector<double> p = r;
    std::vector<double> ap(n);
    for (std::size_t it = 1; it <= max_iters; ++it) {
        apply_op(std::span<const double>(p), std::span<double>(ap));
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (!std::isfinite(pap) || pap <= 0.0)
            throw std::runtime_error("conjugate_gradient: operator is not positive-definite (p'Ap = " +
                                     std::to_string(pap) + ")");
        const double gamma = rs / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += gamma * p[i];
            r[i] -= gamma * ap[i];
        }
        double rs_next = 0.0;
        for (double v : r) rs_next += v * v;
        if (!std::isfinite(rs_next))
            throw std::runtime_error("conjugate_gradient: residual diverged to non-finite values");

        const double res_norm = std::sqrt(rs_next);
        report.residual_norms.push_back(res_norm);
        report.iterations = it;
        if (res_norm <= threshold) {
            report.converged = true;
            break;
        }
        const double beta = rs_next / rs;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rs = rs_next;
    }
    return {std::move(x), std::move(report)};
}

// Solve L_alpha(W - U1 Lambda1 U1^T) x = y by CG. With an empty basis this
// is plain temporal filtering on L_alpha(W).
std::pair<std::vector<double>, CGReport>
temporal_term(const SparseGraph& g, const SpectralBasis& basis, const ObservationVector& y,
              FilterParams p, std::size_t max_iters, double rel_tol);

std::pair<std::vector<double>, CGReport>
temporal_term(const SparseGraph& g, const SpectralBasis& basis, std::span<const double> y,
              FilterParams p, std::size_t max_iters, double rel_tol);

// CSV serialization of per-iteration residuals: header "iteration,residual".
void write_cg_report_csv(const std::string& path, const CGReport& report);

}  // namespace hybrid
