#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hybrid/analysis.hpp"
#include "hybrid/dense_filter.hpp"
#include "hybrid/temporal.hpp"
#include "test_helpers.hpp"

using namespace hybrid;

TEST_CASE("condition_number: deflation ratio, identity case, and hand values") {
    // ratio kappa_r / kappa_0 = (1-alpha)/(1-alpha*lambda_{r+1}); lambda_n cancels
    const double kappa_r = condition_number(0.99, 0.7, -1.0);
    const double kappa_0 = condition_number(0.99, 1.0, -1.0);
    CHECK(kappa_r / kappa_0 == doctest::Approx(0.0326).epsilon(2e-3));
    CHECK(std::abs(kappa_r / kappa_0 - 0.01 / 0.307) <= 1e-14);

    CHECK(condition_number(0.0, 0.3, -0.8) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(condition_number(0.99, 0.7, -1.0) == doctest::Approx(1.99 / 0.307).epsilon(1e-12));
}

TEST_CASE("condition_number: rejects bad arguments") {
    CHECK_THROWS_AS((void)condition_number(1.0, 0.5, -0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)condition_number(0.9, -0.5, 0.5), std::invalid_argument);  // order violated
    CHECK_THROWS_AS((void)condition_number(0.9, 1.5, -0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)condition_number(0.9, 0.5, -1.5), std::invalid_argument);
}

TEST_CASE("cg_error_bound: kappa=1 collapses, i=0 is 2, hand value at kappa=9") {
    CHECK(cg_error_bound(1.0, 1) == 0.0);
    CHECK(cg_error_bound(1.0, 7) == 0.0);
    CHECK(cg_error_bound(1.0, 0) == 2.0);
    CHECK(cg_error_bound(123.4, 0) == 2.0);
    CHECK(cg_error_bound(9.0, 3) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS((void)cg_error_bound(0.5, 1), std::invalid_argument);
}

TEST_CASE("tradeoff_contour: rows fall in i, columns fall in r, size checks enforced") {
    SpectrumSummary spectrum;
    spectrum.eigenvalues = {1.0, 0.9, 0.75, 0.6, 0.2, -0.3, -0.6};
    const double alpha = 0.99;
    const ContourGrid grid = tradeoff_contour(spectrum, alpha, 4, 6);

    for (std::size_t r = 0; r <= grid.r_max; ++r)
        for (std::size_t i = 1; i <= grid.i_max; ++i) CHECK(grid.at(r, i) <= grid.at(r, i - 1) + 1e-15);
    for (std::size_t i = 1; i <= grid.i_max; ++i)
        for (std::size_t r = 1; r <= grid.r_max; ++r) CHECK(grid.at(r, i) <= grid.at(r - 1, i) + 1e-15);

    CHECK_THROWS_AS((void)tradeoff_contour(spectrum, alpha, 7, 3), std::invalid_argument);
}

TEST_CASE("tradeoff_contour: respects the explicit lambda_min override") {
    SpectrumSummary truncated;
    truncated.eigenvalues = {1.0, 0.8, 0.5};
    truncated.lambda_min_override = -1.0;
    const ContourGrid grid = tradeoff_contour(truncated, 0.9, 2, 2);
    const double kappa = condition_number(0.9, 0.5, -1.0);
    CHECK(grid.at(2, 2) == doctest::Approx(cg_error_bound(kappa, 2)).epsilon(1e-14));
}

TEST_CASE("contour and spectrum CSV round out as specified") {
    SpectrumSummary spectrum;
    spectrum.eigenvalues = {1.0, 0.5, -0.25};
    std::ostringstream s;
    write_spectrum_csv(s, spectrum);
    CHECK(s.str().substr(0, 9) == "j,lambda\n");
    CHECK(s.str().find("1,1\n") != std::string::npos);

    const ContourGrid grid = tradeoff_contour(spectrum, 0.5, 1, 1);
    std::ostringstream c;
    write_contour_csv(c, grid);
    CHECK(c.str().substr(0, 8) == "r,i,phi\n");
    CHECK(c.str().find("0,0,2\n") != std::string::npos);
}

TEST_CASE("apply_series_filter: constant, identity-coefficient, and geometric filters") {
    const std::size_t n = 8;
    const SparseGraph g = testutil::random_normalized_graph(n, 3);
    const Eigen::MatrixXd a = densify(g);
    const auto ni = static_cast<Eigen::Index>(n);

    SeriesFilter constant;
    constant.coefficients = {1.0};
    CHECK(testutil::max_abs(apply_series_filter(a, constant) - Eigen::MatrixXd::Identity(ni, ni)) == 0.0);

    SeriesFilter linear;
    linear.coefficients = {0.0, 1.0};
    CHECK(testutil::max_abs(apply_series_filter(a, linear) - a) == 0.0);

    // truncated geometric approximates the dense inverse within alpha^{p+1} * n
    const double alpha = 0.5;
    const SeriesFilter geo = SeriesFilter::geometric(alpha, 50);
    const Eigen::MatrixXd truth =
        (1.0 - alpha) * (Eigen::MatrixXd::Identity(ni, ni) - alpha * a).partialPivLu().inverse();
    const double bound = std::pow(alpha, 51.0) * static_cast<double>(n);
    CHECK(testutil::max_abs(apply_series_filter(a, geo) - truth) <= bound);
}

TEST_CASE("verify_series_decomposition: r=0 is exactly zero") {
    const SparseGraph g = testutil::random_normalized_graph(10, 9);
    SeriesFilter f;
    f.coefficients = {0.3, -0.2, 0.5, 0.1};
    CHECK(verify_series_decomposition(densify(g), f, 0) == 0.0);
}

TEST_CASE("verify_series_decomposition: random polynomials on a 16-node matrix, every rank") {
    const std::size_t n = 16;
    const SparseGraph g = testutil::random_normalized_graph(n, 14);
    const Eigen::MatrixXd a = densify(g);
    Rng rng(8);
    SeriesFilter f;
    f.coefficients.resize(9);  // degree 8
    for (double& c : f.coefficients) c = rng.uniform(-1.0, 1.0);
    for (std::size_t r = 1; r <= n; ++r) CHECK(verify_series_decomposition(a, f, r) <= 1e-10);
}

TEST_CASE("verify_series_decomposition: geometric truncation consistent with the exact filter") {
    const std::size_t n = 12;
    const SparseGraph g = testutil::random_normalized_graph(n, 25);
    const Eigen::MatrixXd a = densify(g);
    const double alpha = 0.5;
    const SeriesFilter geo = SeriesFilter::geometric(alpha, 60);
    // split residual for the truncated series stays at truncation scale
    for (const std::size_t r : {1u, 4u, 9u}) {
        CHECK(verify_series_decomposition(a, geo, r) <= std::pow(alpha, 61.0) * n + 1e-10);
    }
}

TEST_CASE("deflation improves the measured condition number on real spectra") {
    const SparseGraph g = testutil::random_normalized_graph(40, 5);
    const SpectrumSummary spectrum = dense_spectrum(g);
    const double alpha = 0.99;
    double previous = condition_number(alpha, spectrum.eigenvalues[0], spectrum.lambda_min());
    for (std::size_t r = 1; r + 1 < spectrum.eigenvalues.size(); ++r) {
        const double kappa = condition_number(alpha, spectrum.eigenvalues[r], spectrum.lambda_min());
        CHECK(kappa <= previous + 1e-12);
        previous = kappa;
    }
}

TEST_CASE("measured CG error stays within the bound on dense SPD systems with known spectrum") {
    Rng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 18;
        const auto ni = static_cast<Eigen::Index>(n);

        // known spectrum via a random orthogonal rotation
        Eigen::MatrixXd raw(ni, ni);
        for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = rng.gaussian();
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();
        Eigen::VectorXd spectrum(ni);
        const double lo = 0.5 + rng.uniform(), hi = lo + 5.0 + 10.0 * rng.uniform();
        for (Eigen::Index i = 0; i < ni; ++i) spectrum[i] = lo + (hi - lo) * rng.uniform();
        spectrum[0] = lo;
        spectrum[ni - 1] = hi;
        const Eigen::MatrixXd spd = q * spectrum.asDiagonal() * q.transpose();
        const double kappa = hi / lo;

        const auto apply = [&](std::span<const double> in, std::span<double> out) {
            Eigen::Map<const Eigen::VectorXd> vin(in.data(), ni);
            Eigen::Map<Eigen::VectorXd> vout(out.data(), ni);
            vout = spd * vin;
        };
        const auto b = testutil::random_dense_vector(n, 900 + trial);
        const Eigen::VectorXd exact = spd.llt().solve(testutil::to_eigen(b));
        const auto a_norm = [&](const Eigen::VectorXd& e) { return std::sqrt(e.dot(spd * e)); };
        const double e0 = a_norm(exact);

        for (std::size_t iters = 1; iters <= n; ++iters) {
            const auto [x, report] = conjugate_gradient(apply, b, iters, 1e-30);
            const double rel = a_norm(exact - testutil::to_eigen(x)) / e0;
            CHECK(rel <= cg_error_bound(kappa, iters) + 1e-9);
        }
    }
}
