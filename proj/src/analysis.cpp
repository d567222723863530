#include "hybrid/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "hybrid/dense_filter.hpp"
#include "hybrid/io_util.hpp"

namespace hybrid {

double SpectrumSummary::lambda_min() const {
    if (lambda_min_override) return *lambda_min_override;
    if (eigenvalues.empty()) throw std::invalid_argument("spectrum is empty");
    return eigenvalues.back();
}

SpectrumSummary dense_spectrum(const SparseGraph& g) {
    if (!g.normalized) throw std::logic_error("dense_spectrum: graph must be normalized");
    if (g.n > 2048) throw std::invalid_argument("dense_spectrum: graph too large for the dense path (n > 2048)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(densify(g));
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: eigensolve failed");
    SpectrumSummary spectrum;
    spectrum.eigenvalues.resize(g.n);
    for (std::size_t j = 0; j < g.n; ++j)
        spectrum.eigenvalues[j] = es.eigenvalues()[static_cast<Eigen::Index>(g.n - 1 - j)];
    return spectrum;
}

double condition_number(double alpha, double lambda_r1, double lambda_n) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("condition_number: alpha must lie in [0,1)");
    constexpr double slack = 1e-9;
    if (lambda_n < -1.0 - slack || lambda_r1 > 1.0 + slack || lambda_n > lambda_r1)
        throw std::invalid_argument("condition_number: need -1 <= lambda_n <= lambda_{r+1} <= 1");
    return (1.0 - alpha * lambda_n) / (1.0 - alpha * lambda_r1);
}

double cg_error_bound(double kappa, std::size_t iteration) {
    if (kappa < 1.0) throw std::invalid_argument("cg_error_bound: condition number must be >= 1");
    const double root = std::sqrt(kappa);
    const double ratio = (root - 1.0) / (root + 1.0);
    return 2.0 * std::pow(ratio, static_cast<double>(iteration));
}

ContourGrid tradeoff_contour(const SpectrumSummary& spectrum, double alpha,
                             std::size_t r_max, std::size_t i_max) {
    if (spectrum.eigenvalues.size() < r_max + 1)
        throw std::invalid_argument("tradeoff_contour: spectrum must carry at least r_max+1 eigenvalues");
    const double lambda_n = spectrum.lambda_min();

    ContourGrid grid;
    grid.r_max = r_max;
    grid.i_max = i_max;
    grid.phi.resize((r_max + 1) * (i_max + 1));
    for (std::size_t r = 0; r <= r_max; ++r) {
        const double kappa = condition_number(alpha, spectrum.eigenvalues[r], lambda_n);
        for (std::size_t i = 0; i <= i_max; ++i)
            grid.phi[r * (i_max + 1) + i] = cg_error_bound(kappa, i);
    }
    return grid;
}

double SeriesFilter::scalar(double x) const {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
    return acc;
}

SeriesFilter SeriesFilter::geometric(double alpha, std::size_t degree) {
    SeriesFilter f;
    f.coefficients.resize(degree + 1);
    double c = 1.0 - alpha;
    for (std::size_t i = 0; i <= degree; ++i) {
        f.coefficients[i] = c;
        c *= alpha;
    }
    return f;
}

Eigen::MatrixXd apply_series_filter(const Eigen::MatrixXd& A, const SeriesFilter& f) {
    if (A.rows() != A.cols()) throw std::invalid_argument("apply_series_filter: matrix must be square");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("apply_series_filter: matrix must be symmetric");
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    if (f.coefficients.empty()) return acc;
    // Horner: acc = c_p I, then acc = A*acc + c_i I
    acc.diagonal().array() = f.coefficients.back();
    for (auto it = f.coefficients.rbegin() + 1; it != f.coefficients.rend(); ++it) {
        acc = A * acc;
        acc.diagonal().array() += *it;
    }
    return acc;
}

double verify_series_decomposition(const Eigen::MatrixXd& A, const SeriesFilter& f, std::size_t r) {
    const auto n = static_cast<std::size_t>(A.rows());
    if (r > n) throw std::invalid_argument("verify_series_decomposition: rank exceeds matrix size");

    const Eigen::MatrixXd lhs = apply_series_filter(A, f);
    if (r == 0) {
        // both sides are the identical expression
        const Eigen::MatrixXd rhs = apply_series_filter(A, f);
        return (lhs - rhs).cwiseAbs().maxCoeff();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("verify_series_decomposition: eigensolve failed");

    const auto ri = static_cast<Eigen::Index>(r);
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd u1(ni, ri);
    Eigen::VectorXd lambda1(ri);
    for (Eigen::Index j = 0; j < ri; ++j) {
        u1.col(j) = es.eigenvectors().col(ni - 1 - j);  // descending
        lambda1[j] = es.eigenvalues()[ni - 1 - j];
    }

    const double c0 = f.coefficients.empty() ? 0.0 : f.coefficients.front();
    Eigen::VectorXd g(ri);
    for (Eigen::Index j = 0; j < ri; ++j) g[j] = f.scalar(lambda1[j]) - c0;

    const Eigen::MatrixXd deflated = A - u1 * lambda1.asDiagonal() * u1.transpose();
    const Eigen::MatrixXd rhs = u1 * g.asDiagonal() * u1.transpose() + apply_series_filter(deflated, f);
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

void write_contour_csv(std::ostream& out, const ContourGrid& grid) {
    out << std::setprecision(17) << "r,i,phi\n";
    for (std::size_t r = 0; r <= grid.r_max; ++r)
        for (std::size_t i = 0; i <= grid.i_max; ++i)
            out << r << "," << i << "," << grid.at(r, i) << "\n";
}

void write_contour_csv(const std::string& path, const ContourGrid& grid) {
    auto out = io::open_output(path);
    write_contour_csv(out, grid);
}

void write_spectrum_csv(std::ostream& out, const SpectrumSummary& spectrum) {
    out << std::setprecision(17) << "j,lambda\n";
    for (std::size_t j = 0; j < spectrum.eigenvalues.size(); ++j)
        out << (j + 1) << "," << spectrum.eigenvalues[j] << "\n";
}

void write_spectrum_csv(const std::string& path, const SpectrumSummary& spectrum) {
    auto out = io::open_output(path);
    write_spectrum_csv(out, spectrum);
}

SpectrumSummary load_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spectrum file: " + path);
    SpectrumSummary spectrum;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty spectrum file: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("malformed spectrum row: " + line);
        spectrum.eigenvalues.push_back(std::stod(line.substr(comma + 1)));
    }
    if (!std::is_sorted(spectrum.eigenvalues.rbegin(), spectrum.eigenvalues.rend()))
        throw std::runtime_error("spectrum eigenvalues must be in descending order");
    return spectrum;
}

}  // namespace hybrid
