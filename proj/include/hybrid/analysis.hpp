#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hybrid/graph.hpp"

namespace hybrid {

// Descending eigenvalues of a normalized adjacency, or a truncated prefix
// plus an explicit lower bound on the smallest eigenvalue (-1 is always
// valid for a normalized graph).
struct SpectrumSummary {
    std::vector<double> eigenvalues;
    std::optional<double> lambda_min_override;

    double lambda_min() const;
};

// Dense spectrum of a normalized graph; guarded to n <= 2048.
SpectrumSummary dense_spectrum(const SparseGraph& g);

// kappa(L_alpha(W_r)) = (1 - alpha*lambda_n) / (1 - alpha*lambda_{r+1}).
// Requires alpha in [0,1) and -1 <= lambda_n <= lambda_{r+1} <= 1.
double condition_number(double alpha, double lambda_r1, double lambda_n);

// phi_i = 2 * ((sqrt(kappa)-1)/(sqrt(kappa)+1))^i, the CG relative-error
// bound in the A-norm. Requires kappa >= 1.
double cg_error_bound(double kappa, std::size_t iteration);

// phi over the (rank, iteration) plane: grid(r,i) uses lambda_{r+1} from
// the spectrum and the spectrum's smallest eigenvalue.
struct ContourGrid {
    std::size_t r_max = 0;
    std::size_t i_max = 0;
    std::vector<double> phi;  // (r_max+1) x (i_max+1), row-major in r

    double at(std::size_t r, std::size_t i) const { return phi[r * (i_max + 1) + i]; }
};

ContourGrid tradeoff_contour(const SpectrumSummary& spectrum, double alpha,
                             std::size_t r_max, std::size_t i_max);

// Finite polynomial filter h(A) = sum_i c_i A^i.
struct SeriesFilter {
    std::vector<double> coefficients;  // c_0 .. c_p

    double scalar(double x) const;  // Horner

    // Truncated geometric series of (1-alpha)/(1-alpha x) up to `degree`.
    static SeriesFilter geometric(double alpha, std::size_t degree);
};

// Horner evaluation of the matrix polynomial. A must be symmetric.
Eigen::MatrixXd apply_series_filter(const Eigen::MatrixXd& A, const SeriesFilter& f);

// Max-abs residual of h(A) = U1 g(Lambda1) U1^T + h(A - U1 Lambda1 U1^T)
// with g(x) = h(x) - c_0, U1 the top-r eigenvectors of A.
double verify_series_decomposition(const Eigen::MatrixXd& A, const SeriesFilter& f, std::size_t r);

// CSV emission: contour grid as "r,i,phi"; spectrum as "j,lambda".
void write_contour_csv(std::ostream& out, const ContourGrid& grid);
void write_contour_csv(const std::string& path, const ContourGrid& grid);
void write_spectrum_csv(std::ostream& out, const SpectrumSummary& spectrum);
void write_spectrum_csv(const std::string& path, const SpectrumSummary& spectrum);
SpectrumSummary load_spectrum_csv(const std::string& path);

}  // namespace hybrid
