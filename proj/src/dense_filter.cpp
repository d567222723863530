#include "hybrid/dense_filter.hpp"

#include <stdexcept>

namespace hybrid {

Eigen::MatrixXd densify(const SparseGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.n);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::uint64_t p = g.row_offsets[i]; p < g.row_offsets[i + 1]; ++p)
            dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g.cols[p])) = g.values[p];
    return dense;
}

std::vector<double> dense_exact_filter(const SparseGraph& g, FilterParams p, std::span<const double> y) {
    validate(p);
    if (g.n > 2048) throw std::invalid_argument("dense_exact_filter: refused for n > 2048");
    if (y.size() != g.n) throw std::invalid_argument("dense_exact_filter: vector length mismatch");

    const auto n = static_cast<Eigen::Index>(g.n);
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - p.alpha * densify(g);
    Eigen::Map<const Eigen::VectorXd> rhs(y.data(), n);
    Eigen::VectorXd solution = system.partialPivLu().solve(rhs);
    solution *= (1.0 - p.alpha);
    return std::vector<double>(solution.data(), solution.data() + n);
}

}  // namespace hybrid
