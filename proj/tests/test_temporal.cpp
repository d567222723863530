#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hybrid/analysis.hpp"
#include "hybrid/dense_filter.hpp"
#include "hybrid/temporal.hpp"
#include "test_helpers.hpp"

using namespace hybrid;

namespace {

SparseGraph two_node_graph() {
    return symmetric_normalize(testutil::graph_from_edges(2, {{0, 1, 1.0}}));
}

SpectralBasis two_node_top1() {
    // lambda1 = 1, u1 = (1,1)/sqrt(2)
    SpectralBasis basis;
    basis.n = 2;
    basis.rank = 1;
    basis.eigenvalues = {1.0};
    const double c = 1.0 / std::sqrt(2.0);
    basis.dense = {c, c};
    return basis;
}

}  // namespace

TEST_CASE("deflated matvec: two-node graph, r=0, alpha=0.5 maps (1,0) to (2,-1)") {
    const SparseGraph g = two_node_graph();
    const SpectralBasis empty;
    const DeflatedOperator op(g, empty, FilterParams{0.5});
    const std::vector<double> z{1.0, 0.0};
    const auto out = op.apply(z);
    CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("deflated matvec: same graph with the top eigenpair removed maps (1,0) to (2.5,-0.5)") {
    const SparseGraph g = two_node_graph();
    const SpectralBasis basis = two_node_top1();
    const DeflatedOperator op(g, basis, FilterParams{0.5});
    const std::vector<double> z{1.0, 0.0};
    const auto out = op.apply(z);
    CHECK(out[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("deflated matvec: dimension mismatches are rejected") {
    const SparseGraph g = two_node_graph();
    const SpectralBasis empty;
    const DeflatedOperator op(g, empty, FilterParams{0.5});
    const std::vector<double> wrong{1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)op.apply(wrong), std::invalid_argument);

    const SparseGraph bigger = testutil::random_normalized_graph(6, 2);
    const SpectralBasis mismatched = top_eigenpairs(bigger, 1);
    CHECK_THROWS_AS(DeflatedOperator(g, mismatched, FilterParams{0.5}), std::invalid_argument);
}

TEST_CASE("deflated matvec: alpha=0 is the identity") {
    const SparseGraph g = testutil::random_normalized_graph(10, 44);
    const SpectralBasis basis = top_eigenpairs(g, 3);
    const DeflatedOperator op(g, basis, FilterParams{0.0});
    const auto z = testutil::random_dense_vector(10, 4);
    const auto out = op.apply(z);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(out[i] == doctest::Approx(z[i]).epsilon(1e-15));
}

TEST_CASE("deflated operator: symmetry and positive-definiteness on random graphs") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const std::size_t n = 16 + 8 * seed;
        const SparseGraph g = testutil::random_normalized_graph(n, seed * 7);
        const SpectralBasis basis = top_eigenpairs(g, seed % 4);
        const DeflatedOperator op(g, basis, FilterParams{0.99});

        Rng rng(seed);
        for (int trial = 0; trial < 340; ++trial) {
            std::vector<double> z(n), w(n);
            for (auto& v : z) v = rng.gaussian();
            for (auto& v : w) v = rng.gaussian();
            const auto oz = op.apply(z);
            const auto ow = op.apply(w);
            double z_ow = 0.0, w_oz = 0.0, z_oz = 0.0, zn = 0.0, wn = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                z_ow += z[i] * ow[i];
                w_oz += w[i] * oz[i];
                z_oz += z[i] * oz[i];
                zn += z[i] * z[i];
                wn += w[i] * w[i];
            }
            CHECK(std::abs(z_ow - w_oz) <= 1e-9 * std::sqrt(zn) * std::sqrt(wn));
            CHECK(z_oz > 0.0);
        }
    }
}

TEST_CASE("deflated matvec agrees with the dense matrix on small graphs") {
    for (std::uint64_t seed : {10u, 20u}) {
        const std::size_t n = 20 + seed;
        const SparseGraph g = testutil::random_normalized_graph(n, seed);
        const std::size_t r = 1 + seed % 5;
        const SpectralBasis basis = top_eigenpairs(g, r);
        const double alpha = 0.9;
        const DeflatedOperator op(g, basis, FilterParams{alpha});

        const auto ni = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd u1(ni, static_cast<Eigen::Index>(r));
        for (std::size_t j = 0; j < r; ++j) {
            const auto col = basis.column(j);
            u1.col(static_cast<Eigen::Index>(j)) = testutil::to_eigen(col);
        }
        Eigen::VectorXd lambda1 = testutil::to_eigen(basis.eigenvalues);
        const Eigen::MatrixXd deflated = densify(g) - u1 * lambda1.asDiagonal() * u1.transpose();
        const Eigen::MatrixXd dense_op =
            (Eigen::MatrixXd::Identity(ni, ni) - alpha * deflated) / (1.0 - alpha);

        const auto z = testutil::random_dense_vector(n, seed + 5);
        const auto mine = op.apply(z);
        const Eigen::VectorXd oracle = dense_op * testutil::to_eigen(z);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(mine[i] - oracle[static_cast<Eigen::Index>(i)]) <= 1e-10);
    }
}

TEST_CASE("conjugate gradient: zero right-hand side converges immediately") {
    const SparseGraph g = two_node_graph();
    const SpectralBasis empty;
    const DeflatedOperator op(g, empty, FilterParams{0.5});
    const std::vector<double> b{0.0, 0.0};
    const auto [x, report] = conjugate_gradient(op, b, 10, 1e-10);
    CHECK(report.converged);
    CHECK(report.iterations == 0);
    CHECK(report.residual_norms.size() == 1);
    for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("conjugate gradient: identity operator solves in one iteration") {
    const auto identity = [](std::span<const double> in, std::span<double> out) {
        std::copy(in.begin(), in.end(), out.begin());
    };
    const auto b = testutil::random_dense_vector(12, 3);
    const auto [x, report] = conjugate_gradient(identity, b, 10, 1e-12);
    CHECK(report.converged);
    CHECK(report.iterations == 1);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("conjugate gradient: random SPD system matches the dense solver after n iterations") {
    const std::size_t n = 16;
    Rng rng(99);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian();
    const Eigen::MatrixXd spd =
        m * m.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);

    const auto apply = [&](std::span<const double> in, std::span<double> out) {
        Eigen::Map<const Eigen::VectorXd> vin(in.data(), static_cast<Eigen::Index>(n));
        Eigen::Map<Eigen::VectorXd> vout(out.data(), static_cast<Eigen::Index>(n));
        vout = spd * vin;
    };
    const auto b = testutil::random_dense_vector(n, 5);
    const auto [x, report] = conjugate_gradient(apply, b, n, 1e-14);
    const Eigen::VectorXd exact = spd.llt().solve(testutil::to_eigen(b));

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - exact[static_cast<Eigen::Index>(i)]) * (x[i] - exact[static_cast<Eigen::Index>(i)]);
        den += exact[static_cast<Eigen::Index>(i)] * exact[static_cast<Eigen::Index>(i)];
    }
    CHECK(std::sqrt(num / den) <= 1e-8);
    CHECK(report.residual_norms.size() == report.iterations + 1);
}

TEST_CASE("conjugate gradient: rejects non-positive tolerance and non-SPD operators") {
    const std::vector<double> b{1.0, 2.0};
    const auto identity = [](std::span<const double> in, std::span<double> out) {
        std::copy(in.begin(), in.end(), out.begin());
    };
    CHECK_THROWS_AS((void)conjugate_gradient(identity, b, 5, 0.0), std::invalid_argument);

    const auto negate = [](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = -in[i];
    };
    CHECK_THROWS_AS((void)conjugate_gradient(negate, b, 5, 1e-8), std::runtime_error);
}

TEST_CASE("CG A-norm error: monotone per iteration and within the kappa bound") {
    for (std::uint64_t seed : {4u, 9u}) {
        const std::size_t n = 24;
        const SparseGraph g = testutil::random_normalized_graph(n, seed);
        const SpectralBasis basis = top_eigenpairs(g, seed % 3);
        const double alpha = 0.9;
        const DeflatedOperator op(g, basis, FilterParams{alpha});

        // dense image of the operator for the exact solution and kappa
        const auto ni = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd dense_op(ni, ni);
        std::vector<double> unit(n, 0.0), col(n);
        for (std::size_t j = 0; j < n; ++j) {
            unit[j] = 1.0;
            op.apply(unit, col);
            dense_op.col(static_cast<Eigen::Index>(j)) = testutil::to_eigen(col);
            unit[j] = 0.0;
        }
        const auto evals = testutil::dense_eigenvalues_descending(dense_op);
        const double kappa = evals[0] / evals[ni - 1];

        const auto b = testutil::random_dense_vector(n, seed + 1);
        const Eigen::VectorXd exact = dense_op.llt().solve(testutil::to_eigen(b));
        const auto a_norm = [&](const Eigen::VectorXd& e) { return std::sqrt(e.dot(dense_op * e)); };
        const double e0 = a_norm(exact);  // x0 = 0

        double previous = e0;
        for (std::size_t iters = 1; iters <= n; ++iters) {
            const auto [x, report] = conjugate_gradient(op, b, iters, 1e-30);
            const Eigen::VectorXd err = exact - testutil::to_eigen(x);
            const double e = a_norm(err);
            CHECK(e <= previous * (1.0 + 1e-12) + 1e-14);
            CHECK(e / e0 <= cg_error_bound(kappa, iters) + 1e-9);
            previous = e;
        }
    }
}

TEST_CASE("temporal_term: r=0 run to convergence matches the dense filter") {
    const SparseGraph g = testutil::random_normalized_graph(32, 51);
    const SpectralBasis empty;
    const FilterParams p{0.9};
    ObservationVector y;
    y.n = 32;
    y.indices = {0, 7, 21};
    y.values = {1.0, 0.5, 0.25};

    const auto [x, report] = temporal_term(g, empty, y, p, 1000, 1e-12);
    CHECK(report.converged);
    const auto yd = y.densify();
    const auto oracle = dense_exact_filter(g, p, yd);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - oracle[i]) <= 1e-8);
}

TEST_CASE("temporal_term: full deflation reduces to (1-alpha) y") {
    const SparseGraph g = testutil::random_normalized_graph(12, 3);
    const SpectralBasis basis = top_eigenpairs(g, 12);
    const FilterParams p{0.99};
    ObservationVector y;
    y.n = 12;
    y.indices = {2, 5};
    y.values = {1.0, 2.0};

    const auto [x, report] = temporal_term(g, basis, y, p, 100, 1e-13);
    CHECK(report.converged);
    const auto yd = y.densify();
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(x[i] == doctest::Approx((1.0 - p.alpha) * yd[i]).epsilon(1e-7));
}

TEST_CASE("CGReport CSV serialization") {
    CGReport report;
    report.iterations = 2;
    report.residual_norms = {1.0, 0.5, 0.125};
    report.converged = true;
    const std::string path = "cg_report_test.csv";
    write_cg_report_csv(path, report);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "iteration,residual");
    std::getline(in, line);
    CHECK(line == "0,1");
    std::getline(in, line);
    CHECK(line == "1,0.5");
    std::remove(path.c_str());
}
