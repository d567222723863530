#include "hybrid/temporal.hpp"

#include <fstream>
#include <iomanip>

#include "hybrid/io_util.hpp"

namespace hybrid {

DeflatedOperator::DeflatedOperator(const SparseGraph& g, const SpectralBasis& basis, FilterParams p)
    : graph_(&g), basis_(&basis), alpha_(p.alpha) {
    validate(p);
    if (!g.normalized) throw std::logic_error("DeflatedOperator: graph must be normalized");
    if (!basis.empty() && basis.n != g.n)
        throw std::invalid_argument("DeflatedOperator: basis size does not match graph");
}

void DeflatedOperator::apply(std::span<const double> z, std::span<double> out) const {
    const std::size_t n = graph_->n;
    if (z.size() != n || out.size() != n)
        throw std::invalid_argument("DeflatedOperator: vector length mismatch");

    // wz = W z - U1 Lambda1 U1^T z, assembled right-to-left
    graph_->matvec(z, out);
    if (!basis_->empty()) {
        std::vector<double> t = basis_->project(z);
        for (std::size_t j = 0; j < basis_->rank; ++j) t[j] *= basis_->eigenvalues[j];
        basis_->accumulate(t, out, -1.0);
    }
    const double scale = 1.0 / (1.0 - alpha_);
    for (std::size_t i = 0; i < n; ++i) out[i] = (z[i] - alpha_ * out[i]) * scale;
}

std::pair<std::vector<double>, CGReport>
temporal_term(const SparseGraph& g, const SpectralBasis& basis, const ObservationVector& y,
              FilterParams p, std::size_t max_iters, double rel_tol) {
    if (y.n != g.n) throw std::invalid_argument("temporal_term: observation length does not match graph");
    const std::vector<double> dense_y = y.densify();
    return temporal_term(g, basis, std::span<const double>(dense_y), p, max_iters, rel_tol);
}

std::pair<std::vector<double>, CGReport>
temporal_term(const SparseGraph& g, const SpectralBasis& basis, std::span<const double> y,
              FilterParams p, std::size_t max_iters, double rel_tol) {
    DeflatedOperator op(g, basis, p);
    return conjugate_gradient(op, y, max_iters, rel_tol);
}

void write_cg_report_csv(const std::string& path, const CGReport& report) {
    auto out = io::open_output(path);
    out << std::setprecision(17) << "iteration,residual\n";
    for (std::size_t i = 0; i < report.residual_norms.size(); ++i)
        out << i << "," << report.residual_norms[i] << "\n";
}

}  // namespace hybrid
