#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "hybrid/graph.hpp"
#include "hybrid/spectral.hpp"

namespace hybrid {

Eigen::MatrixXd densify(const SparseGraph& g);

// x = (1-alpha) * (I - alpha*W)^{-1} y by dense factorization; the exact
// reference for every filtering mode. Guarded to n <= 2048.
std::vector<double> dense_exact_filter(const SparseGraph& g, FilterParams p, std::span<const double> y);

}  // namespace hybrid
