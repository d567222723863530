#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hybrid/rng.hpp"
#include "hybrid/spectral.hpp"

namespace hybrid {

namespace {

Eigen::VectorXd random_unit(Rng& rng, std::size_t n) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.gaussian();
    const double norm = v.norm();
    return norm > 0.0 ? Eigen::VectorXd(v / norm) : Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), 0);
}

// Twice-iterated classical Gram-Schmidt against the first j columns of V.
// Returns the removed coefficients (needed for the projected matrix) and
// leaves the residual in w.
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& V, Eigen::Index j, Eigen::VectorXd& w) {
    if (j == 0) return Eigen::VectorXd();
    Eigen::VectorXd c = V.leftCols(j).transpose() * w;
    w.noalias() -= V.leftCols(j) * c;
    Eigen::VectorXd c2 = V.leftCols(j).transpose() * w;
    w.noalias() -= V.leftCols(j) * c2;
    c += c2;
    return c;
}

void fix_sign(std::span<double> column) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < column.size(); ++i) {
        const double m = std::abs(column[i]);
        if (m > best) {
            best = m;
            arg = i;
        }
    }
    if (column[arg] < 0.0)
        for (double& v : column) v = -v;
}

}  // namespace

SpectralBasis top_eigenpairs(const SparseGraph& g, std::size_t r, const LanczosOptions& opts) {
    if (!g.normalized) throw std::logic_error("top_eigenpairs: graph must be normalized");
    if (r > g.n) throw std::invalid_argument("top_eigenpairs: rank exceeds graph size");

    const std::size_t n = g.n;
    SpectralBasis basis;
    basis.n = n;
    if (r == 0) return basis;

    const auto ni = static_cast<Eigen::Index>(n);
    const auto want = static_cast<Eigen::Index>(r);
    const std::size_t m_request = opts.subspace ? opts.subspace : std::max<std::size_t>(2 * r + 16, 32);
    const auto m = static_cast<Eigen::Index>(std::min(n, std::max(m_request, r)));

    Rng rng(opts.seed ^ (0x9e3779b97f4a7c15ULL * (n + 1)) ^ r);
    Eigen::MatrixXd V(ni, m);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd w(ni), av(ni);

    const auto matvec = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
        g.matvec(std::span<const double>(x.data(), n), std::span<double>(out.data(), n));
    };

    // Fills V/T columns j..m-1 starting from `next` (unit, orthogonal to
    // the first j columns). Breakdowns are replaced by fresh random
    // directions, which is how degenerate eigenvalues acquire their full
    // multiplicity. Returns the number of usable columns.
    Eigen::Index filled = 0;
    Eigen::VectorXd next = random_unit(rng, n);
    const auto extend = [&](Eigen::Index j) -> Eigen::Index {
        while (j < m) {
            V.col(j) = next;
            matvec(V.col(j), av);
            w = av;
            Eigen::VectorXd c = orthogonalize(V, j + 1, w);
            T.block(0, j, j + 1, 1) = c;
            T.block(j, 0, 1, j + 1) = c.transpose();
            ++j;
            if (j == m) break;

            const double beta = w.norm();
            if (beta > 1e-12) {
                next = w / beta;
            } else {
                // invariant subspace hit
                if (j >= ni) break;
                bool ok = false;
                for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
                    next = random_unit(rng, n);
                    orthogonalize(V, j, next);
                    const double norm = next.norm();
                    if (norm > 1e-8) {
                        next /= norm;
                        ok = true;
                    }
                }
                if (!ok) break;
            }
        }
        return j;
    };

    double worst_residual = std::numeric_limits<double>::infinity();
    for (std::size_t restart = 0; restart < opts.max_restarts; ++restart) {
        filled = extend(filled);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(filled, filled));
        if (es.info() != Eigen::Success)
            throw std::runtime_error("top_eigenpairs: projected eigensolve failed");

        // Eigen sorts ascending; flip to descending.
        const Eigen::Index avail = std::min<Eigen::Index>(want, filled);
        Eigen::VectorXd theta(filled);
        Eigen::MatrixXd Y(filled, filled);
        for (Eigen::Index i = 0; i < filled; ++i) {
            theta[i] = es.eigenvalues()[filled - 1 - i];
            Y.col(i) = es.eigenvectors().col(filled - 1 - i);
        }

        Eigen::MatrixXd X = V.leftCols(filled) * Y.leftCols(avail);
        worst_residual = 0.0;
        bool converged = avail == want;
        for (Eigen::Index i = 0; i < avail; ++i) {
            matvec(X.col(i), av);
            const double res = (av - theta[i] * X.col(i)).norm();
            worst_residual = std::max(worst_residual, res);
            if (res > opts.tol * std::max(1.0, std::abs(theta[i]))) converged = false;
        }

        if (converged) {
            basis.rank = r;
            basis.eigenvalues.assign(theta.data(), theta.data() + want);
            basis.dense.resize(n * r);
            for (Eigen::Index j = 0; j < want; ++j) {
                std::copy(X.col(j).data(), X.col(j).data() + ni, basis.dense.begin() + j * ni);
                fix_sign(std::span<double>(basis.dense.data() + j * ni, n));
            }
            return basis;
        }

        // Thick restart: keep the leading Ritz vectors plus a buffer, and
        // rotate the projected matrix along with them.
        const Eigen::Index keep = std::min<Eigen::Index>(filled - 1 > 0 ? filled - 1 : filled,
                                                         std::min<Eigen::Index>(want + 8, filled));
        if (keep <= 0 || keep >= m) {
            // subspace exhausted without convergence; reseed
            filled = 0;
            next = random_unit(rng, n);
            continue;
        }
        Eigen::MatrixXd Vk = V.leftCols(filled) * Y.leftCols(keep);
        Eigen::MatrixXd Tk = Y.leftCols(keep).transpose() * T.topLeftCorner(filled, filled) * Y.leftCols(keep);
        V.leftCols(keep) = Vk;
        T.setZero();
        T.topLeftCorner(keep, keep) = Tk;
        filled = keep;

        // continue from the last residual direction when usable, otherwise
        // inject a fresh random one; either way orthogonalize against the
        // kept Ritz vectors
        const double beta = w.norm();
        next = beta > 1e-10 ? Eigen::VectorXd(w / beta) : random_unit(rng, n);
        for (int attempt = 0; attempt < 8; ++attempt) {
            orthogonalize(V, filled, next);
            const double norm = next.norm();
            if (norm > 1e-8) {
                next /= norm;
                break;
            }
            next = random_unit(rng, n);
        }
    }

    std::ostringstream msg;
    msg << "top_eigenpairs: no convergence after " << opts.max_restarts
        << " restarts (worst residual " << worst_residual << ", tolerance " << opts.tol << ")";
    throw std::runtime_error(msg.str());
}

}  // namespace hybrid
