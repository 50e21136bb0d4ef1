#pragma once

#include "minsurf/errors.hpp"
#include "minsurf/operators.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace minsurf {

/// Eigenpair of the pencil A w = lambda M w, with w M-normalized.
struct EigenPair
{
    double lambda = 0.0;
    Eigen::VectorXd field;
    double residual = 0.0; // |A w - lambda M w| / |M w|
};

struct EigenSolverOptions
{
    double tol = 1e-8;
    std::uint64_t seed = 0;
    int max_restarts = 200;
    /// Lower bound on the spectrum; the shift sits one unit below it so that
    /// A - shift * M is positive definite.
    double lower_bound = 0.0;
    /// Problems up to this size are solved densely.
    Eigen::Index dense_limit = 400;
    /// Eigenvalues closer than this (relative) are reported as one cluster.
    double cluster_tolerance = 1e-3;
};

/// Index ranges [first, last) of eigenvalue clusters in a sorted list.
inline std::vector<std::pair<int, int>> eigen_clusters(const std::vector<EigenPair>& pairs, double rel = 1e-3)
{
    std::vector<std::pair<int, int>> clusters;
    int start = 0;
    for (int i = 1; i <= static_cast<int>(pairs.size()); ++i) {
        const bool split = i == static_cast<int>(pairs.size()) ||
                           std::abs(pairs[i].lambda - pairs[i - 1].lambda) >
                               rel * std::max({std::abs(pairs[i].lambda), std::abs(pairs[i - 1].lambda), 1.0});
        if (split) {
            clusters.emplace_back(start, i);
            start = i;
        }
    }
    return clusters;
}

namespace detail {

inline double relative_residual(const SparseMatrix& a, const SparseMatrix& m, const Eigen::VectorXd& w, double lambda)
{
    const Eigen::VectorXd mw = m * w;
    const double denom = mw.norm();
    return denom > 0.0 ? (a * w - lambda * mw).norm() / denom : 0.0;
}

/// Fix the sign so that the first entry of significant size is positive.
inline void normalize_sign(Eigen::VectorXd& w)
{
    const double big = w.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (std::abs(w[i]) > 1e-6 * big) {
            if (w[i] < 0.0) w = -w;
            return;
        }
    }
}

/// Growing M-orthonormal basis used by the block Krylov iteration.
class MBasis
{
public:
    MBasis(const SparseMatrix& m, Eigen::Index rows, Eigen::Index capacity)
        : m_mass(m)
        , m_v(rows, capacity)
        , m_mv(rows, capacity)
    {}

    Eigen::Index size() const { return m_size; }
    auto vectors() const { return m_v.leftCols(m_size); }

    /// Orthogonalize the columns of `block` against the basis and each other,
    /// then append the survivors. Returns the number appended.
    Eigen::Index append(Eigen::MatrixXd block)
    {
        for (int pass = 0; pass < 2 && m_size > 0; ++pass) {
            const Eigen::MatrixXd coeff = m_mv.leftCols(m_size).transpose() * block;
            block -= m_v.leftCols(m_size) * coeff;
        }
        Eigen::Index added = 0;
        for (Eigen::Index j = 0; j < block.cols() && m_size < m_v.cols(); ++j) {
            Eigen::VectorXd w = block.col(j);
            const double before = std::sqrt(std::max(w.dot(m_mass * w), 0.0));
            if (!(before > 0.0)) continue;
            const Eigen::Index first_new = m_size - added;
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index c = first_new; c < m_size; ++c) w -= m_mv.col(c).dot(w) * m_v.col(c);
                if (pass == 0 && first_new > 0) {
                    const Eigen::VectorXd coeff = m_mv.leftCols(first_new).transpose() * w;
                    w -= m_v.leftCols(first_new) * coeff;
                }
            }
            Eigen::VectorXd mw = m_mass * w;
            const double after = std::sqrt(std::max(w.dot(mw), 0.0));
            if (!(after > 1e-10 * before)) continue;
            m_v.col(m_size) = w / after;
            m_mv.col(m_size) = mw / after;
            ++m_size;
            ++added;
        }
        return added;
    }

private:
    const SparseMatrix& m_mass;
    Eigen::MatrixXd m_v;
    Eigen::MatrixXd m_mv;
    Eigen::Index m_size = 0;
};

inline std::vector<EigenPair> solve_dense(const SparseMatrix& a, const SparseMatrix& m, int k)
{
    const Eigen::MatrixXd ad = Eigen::MatrixXd(a);
    const Eigen::MatrixXd md = Eigen::MatrixXd(m);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (ad + ad.transpose()), 0.5 * (md + md.transpose()));
    if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed", 0.0);
    std::vector<EigenPair> out;
    for (int i = 0; i < k; ++i) out.push_back({es.eigenvalues()[i], es.eigenvectors().col(i), 0.0});
    return out;
}

} // namespace detail

/// The k smallest eigenpairs of A w = lambda M w (A symmetric, M SPD).
///
/// Large problems use shift-invert block Krylov subspaces with Rayleigh-Ritz
/// restarts; the starting block is drawn from a seeded generator. Returned
/// pairs are sorted ascending and M-orthonormal; within a cluster the basis
/// is re-orthonormalized in index order.
inline std::vector<EigenPair> solve_smallest_eigenpairs(
    const SparseMatrix& a,
    const SparseMatrix& m,
    int k,
    const EigenSolverOptions& options = {})
{
    const Eigen::Index n = a.rows();
    if (a.cols() != n || m.rows() != n || m.cols() != n) throw ParameterError("matrix dimensions do not match");
    if (k < 1 || k > n - 1) throw ParameterError("k must satisfy 1 <= k <= dimension - 1");

    std::vector<EigenPair> pairs;
    if (n <= options.dense_limit) {
        pairs = detail::solve_dense(a, m, k);
    } else {
        const double shift = options.lower_bound - 1.0;
        const SparseMatrix shifted = a - shift * m;
        Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
        if (factor.info() != Eigen::Success) throw SolverError("factorization of shifted operator failed", 0.0);

        const Eigen::Index block = std::min<Eigen::Index>(n - 1, k + std::max(8, k / 2));
        const int steps = 3;
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd x(n, block);
        for (Eigen::Index j = 0; j < block; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);
        }

        double best = std::numeric_limits<double>::infinity();
        bool converged = false;
        for (int restart = 0; restart < options.max_restarts && !converged; ++restart) {
            detail::MBasis basis(m, n, std::min<Eigen::Index>(n, block * (steps + 1)));
            Eigen::Index first = basis.size();
            basis.append(x);
            for (int s = 0; s < steps; ++s) {
                const Eigen::Index last = basis.size();
                Eigen::MatrixXd w(n, last - first);
                for (Eigen::Index c = first; c < last; ++c) w.col(c - first) = factor.solve(m * basis.vectors().col(c));
                first = last;
                if (basis.append(std::move(w)) == 0) break;
            }
            const auto v = basis.vectors();
            const Eigen::MatrixXd av = a * v;
            Eigen::MatrixXd h = v.transpose() * av;
            h = 0.5 * (h + h.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            const Eigen::Index keep = std::min<Eigen::Index>(block, v.cols());
            x = v * es.eigenvectors().leftCols(keep);
            double worst = 0.0;
            for (int i = 0; i < k; ++i) {
                worst = std::max(worst, detail::relative_residual(a, m, x.col(i), es.eigenvalues()[i]));
            }
            best = std::min(best, worst);
            if (worst <= options.tol) {
                converged = true;
                for (int i = 0; i < k; ++i) pairs.push_back({es.eigenvalues()[i], x.col(i), 0.0});
            } else if (keep < block) {
                throw SolverError("Krylov subspace collapsed", best);
            }
        }
        if (!converged) throw SolverError("eigensolver did not converge", best);
    }

    std::sort(pairs.begin(), pairs.end(), [](const EigenPair& l, const EigenPair& r) { return l.lambda < r.lambda; });
    for (const auto& [lo, hi] : eigen_clusters(pairs, options.cluster_tolerance)) {
        for (int i = lo; i < hi; ++i) {
            Eigen::VectorXd& w = pairs[i].field;
            for (int j = lo; j < i; ++j) w -= pairs[j].field.dot(m * w) * pairs[j].field;
            w /= std::sqrt(w.dot(m * w));
        }
    }
    for (auto& p : pairs) {
        detail::normalize_sign(p.field);
        p.residual = detail::relative_residual(a, m, p.field, p.lambda);
    }
    return pairs;
}

} // namespace minsurf
