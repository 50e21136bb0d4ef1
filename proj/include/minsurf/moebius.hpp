#pragma once

#include "minsurf/errors.hpp"
#include "minsurf/operators.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace minsurf {

/// Per-vertex ambient vector field along the surface (V x (n+1)).
struct TangentField
{
    Eigen::MatrixXd vectors;

    TangentField operator+(const TangentField& o) const { return {vectors + o.vectors}; }
    TangentField operator-(const TangentField& o) const { return {vectors - o.vectors}; }
    TangentField operator*(double s) const { return {s * vectors}; }
};

/// Decomposition X = X^T + X^N into the parts tangent and normal to the
/// surface inside T S^n.
struct SplitField
{
    Eigen::MatrixXd tangential;
    Eigen::MatrixXd normal;
};

inline constexpr double tangency_tolerance = 1e-10;

/// Largest |X(x) . x| relative to max(1, |X(x)|).
inline double sphere_tangency_defect(const SurfaceMesh& mesh, const TangentField& x)
{
    const Eigen::VectorXd dots = x.vectors.cwiseProduct(mesh.vertices()).rowwise().sum();
    const Eigen::VectorXd scale = x.vectors.rowwise().norm().cwiseMax(1.0);
    return dots.cwiseAbs().cwiseQuotient(scale).maxCoeff();
}

inline void require_sphere_tangent(const SurfaceMesh& mesh, const TangentField& x)
{
    if (x.vectors.rows() != mesh.num_vertices() || x.vectors.cols() != mesh.ambient_dim() + 1) {
        throw ContractError("tangent field has the wrong shape");
    }
    if (sphere_tangency_defect(mesh, x) > tangency_tolerance) {
        throw ContractError("field is not tangent to the sphere");
    }
}

/// Projection of arbitrary per-vertex vectors onto T_x S^n.
inline TangentField project_to_sphere(const SurfaceMesh& mesh, const Eigen::MatrixXd& raw)
{
    const Eigen::VectorXd dots = raw.cwiseProduct(mesh.vertices()).rowwise().sum();
    return {raw - dots.asDiagonal() * mesh.vertices()};
}

/// The conformal field xi_v(x) = v - <v, x> x, i.e. the sphere gradient of <x, v>.
inline TangentField moebius_field(const SurfaceMesh& mesh, const Eigen::VectorXd& v)
{
    if (v.size() != mesh.ambient_dim() + 1) throw ContractError("direction has the wrong dimension");
    if (!(v.norm() > 0.0)) throw ParameterError("Moebius direction must be nonzero");
    const Eigen::VectorXd dots = mesh.vertices() * v;
    Eigen::MatrixXd out = -(dots.asDiagonal() * mesh.vertices());
    out.rowwise() += v.transpose();
    return {out};
}

/// xi_i = moebius_field(e_i); `i` is zero-based.
inline TangentField moebius_field(const SurfaceMesh& mesh, int i)
{
    return moebius_field(mesh, Eigen::VectorXd::Unit(mesh.ambient_dim() + 1, i));
}

/// Combination sum_j a_j xi_j.
inline TangentField moebius_combination(const SurfaceMesh& mesh, const Eigen::VectorXd& a)
{
    if (a.size() != mesh.ambient_dim() + 1) throw ContractError("coefficient vector has the wrong dimension");
    const Eigen::VectorXd dots = mesh.vertices() * a;
    Eigen::MatrixXd out = -(dots.asDiagonal() * mesh.vertices());
    out.rowwise() += a.transpose();
    return {out};
}

/// f * X, vertex by vertex.
inline TangentField scale_field(const ScalarField& f, const TangentField& x)
{
    if (f.size() != x.vectors.rows()) throw ContractError("scalar field length does not match");
    return {f.asDiagonal() * x.vectors};
}

/// Split along the discrete tangent planes stored in `disc`.
inline SplitField split_tangent_normal(const Discretization& disc, const TangentField& x)
{
    require_sphere_tangent(disc.mesh(), x);
    const auto& p = disc.planes();
    const Eigen::VectorXd c1 = x.vectors.cwiseProduct(p.first).rowwise().sum();
    const Eigen::VectorXd c2 = x.vectors.cwiseProduct(p.second).rowwise().sum();
    SplitField s;
    s.tangential = c1.asDiagonal() * p.first + c2.asDiagonal() * p.second;
    s.normal = x.vectors - s.tangential;
    return s;
}

/// Worst-case errors of the pointwise Moebius identities for one index i.
struct MoebiusIdentityRow
{
    int index = 0;
    double norm_error = 0.0;       // | |xi_i|^2 - (1 - x_i^2) |, over vertices
    double tangential_error = 0.0; // | |xi_i^T|^2 - |grad x_i|^2 |, over faces
    double covariant_error = 0.0;  // | D_w xi_i + x_i w |, over edges
};

struct MoebiusIdentityReport
{
    std::vector<MoebiusIdentityRow> rows;
    double normal_sum_error = 0.0; // max_v | sum_i |xi_i^N|^2 - (n - 2) |
    double h = 0.0;

    double max_norm_error() const
    {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.norm_error);
        return m;
    }
    double max_tangential_error() const
    {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.tangential_error);
        return m;
    }
    double max_covariant_error() const
    {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.covariant_error);
        return m;
    }
};

/// Evaluate the pointwise Moebius identities on the mesh.
///
/// The tangential identity compares the face mean of |xi_i^T|^2 with the
/// squared gradient of the P1 interpolant of x_i. The covariant identity
/// uses the edge difference quotient of xi_i, projected to T S^n at the
/// normalized edge midpoint, against -x_i(midpoint) times the unit chord.
inline MoebiusIdentityReport pointwise_identity_report(const Discretization& disc)
{
    const SurfaceMesh& mesh = disc.mesh();
    const int dim = disc.dim();
    MoebiusIdentityReport report;
    report.h = disc.h();
    Eigen::VectorXd normal_sum = Eigen::VectorXd::Zero(mesh.num_vertices());

    for (int i = 0; i < dim; ++i) {
        MoebiusIdentityRow row;
        row.index = i;
        const TangentField xi = moebius_field(mesh, i);
        const Eigen::VectorXd xi2 = xi.vectors.rowwise().squaredNorm();
        const Eigen::VectorXd xc = disc.coordinate(i);
        row.norm_error = (xi2 - (Eigen::VectorXd::Ones(xc.size()) - xc.cwiseAbs2())).cwiseAbs().maxCoeff();

        const SplitField split = split_tangent_normal(disc, xi);
        const Eigen::VectorXd t2 = split.tangential.rowwise().squaredNorm();
        normal_sum += split.normal.rowwise().squaredNorm();

        for (Index f = 0; f < mesh.num_faces(); ++f) {
            const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
            const Eigen::MatrixXd& g = disc.hat_gradients_of(f);
            const Eigen::VectorXd grad = g.col(0) * xc[t[0]] + g.col(1) * xc[t[1]] + g.col(2) * xc[t[2]];
            const double mean_t2 = (t2[t[0]] + t2[t[1]] + t2[t[2]]) / 3.0;
            row.tangential_error = std::max(row.tangential_error, std::abs(mean_t2 - grad.squaredNorm()));

            for (int c = 0; c < 3; ++c) {
                const Index p = t[c];
                const Index q = t[(c + 1) % 3];
                if (p > q) continue; // each undirected edge once
                const Eigen::VectorXd xp = mesh.vertex(p);
                const Eigen::VectorXd xq = mesh.vertex(q);
                const double len = (xq - xp).norm();
                const Eigen::VectorXd w = (xq - xp) / len;
                const Eigen::VectorXd mid = (xp + xq).normalized();
                Eigen::VectorXd dxi = (xi.vectors.row(q) - xi.vectors.row(p)).transpose() / len;
                dxi -= dxi.dot(mid) * mid;
                row.covariant_error = std::max(row.covariant_error, (dxi + mid[i] * w).norm());
            }
        }
        report.rows.push_back(row);
    }
    report.normal_sum_error = (normal_sum.array() - (dim - 3)).abs().maxCoeff();
    return report;
}

/// Gram matrix G_ij = int xi_i . xi_j = int (delta_ij - x_i x_j), vertex quadrature.
inline Eigen::MatrixXd moebius_gram(const Discretization& disc)
{
    const Eigen::MatrixXd& x = disc.mesh().vertices();
    const Eigen::MatrixXd g =
        disc.area() * Eigen::MatrixXd::Identity(disc.dim(), disc.dim()) - x.transpose() * disc.weights().asDiagonal() * x;
    return 0.5 * (g + g.transpose());
}

struct MoebiusProjection
{
    TangentField perp;
    Eigen::VectorXd coefficients;          // a with X = perp + sum_j a_j xi_j
    Eigen::VectorXd orthogonality_residuals; // |int perp . xi_j| / (|X| |xi_j|)
    bool gram_singular = false;
};

/// L2 projection of X onto the orthogonal complement of span{xi_1..xi_{n+1}}.
///
/// Solves G a = (int X . xi_j)_j; a rank-deficient Gram matrix falls back to
/// a least-squares solve and sets `gram_singular`.
inline MoebiusProjection project_orthogonal_to_moebius(const Discretization& disc, const TangentField& x)
{
    require_sphere_tangent(disc.mesh(), x);
    const int dim = disc.dim();
    std::vector<TangentField> xis;
    Eigen::VectorXd rhs(dim);
    for (int j = 0; j < dim; ++j) {
        xis.push_back(moebius_field(disc.mesh(), j));
        rhs[j] = disc.pair(x.vectors, xis.back().vectors);
    }
    const Eigen::MatrixXd g = moebius_gram(disc);

    MoebiusProjection out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    out.gram_singular = es.eigenvalues().minCoeff() <= 1e-12 * top;
    if (out.gram_singular) {
        out.coefficients = g.completeOrthogonalDecomposition().solve(rhs);
    } else {
        out.coefficients = g.llt().solve(rhs);
    }
    // One step of iterative refinement keeps the residuals at round-off level.
    const Eigen::VectorXd correction = g.completeOrthogonalDecomposition().solve(rhs - g * out.coefficients);
    out.coefficients += correction;

    out.perp = x - moebius_combination(disc.mesh(), out.coefficients);
    const double xnorm = std::sqrt(disc.pair(x.vectors, x.vectors));
    out.orthogonality_residuals.resize(dim);
    for (int j = 0; j < dim; ++j) {
        const double xin = std::sqrt(disc.pair(xis[j].vectors, xis[j].vectors));
        const double denom = xnorm * xin;
        const double r = std::abs(disc.pair(out.perp.vectors, xis[j].vectors));
        out.orthogonality_residuals[j] = denom > 0.0 ? r / denom : r;
    }
    return out;
}

} // namespace minsurf
