#pragma once

#include "minsurf/mesh.hpp"

#include <Eigen/Dense>

namespace minsurf {

/// Gradients of the three P1 hat functions of face `f`, one per column.
///
/// Works in any ambient dimension: the gradient of the hat at a corner is the
/// height vector towards that corner divided by its squared length.
inline Eigen::MatrixXd hat_gradients(const SurfaceMesh& mesh, Index f)
{
    const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
    Eigen::MatrixXd grads(mesh.ambient_dim() + 1, 3);
    for (int c = 0; c < 3; ++c) {
        const Eigen::VectorXd pi = mesh.vertex(t[c]);
        const Eigen::VectorXd pj = mesh.vertex(t[(c + 1) % 3]);
        const Eigen::VectorXd pk = mesh.vertex(t[(c + 2) % 3]);
        const Eigen::VectorXd u = (pk - pj).normalized();
        Eigen::VectorXd height = (pi - pj) - (pi - pj).dot(u) * u;
        const double h2 = height.squaredNorm();
        if (!(h2 > 0.0)) throw MeshError("degenerate face " + std::to_string(f));
        grads.col(c) = height / h2;
    }
    return grads;
}

/// Orthonormal basis (columns) of the plane spanned by face `f`.
inline Eigen::MatrixXd face_plane(const SurfaceMesh& mesh, Index f)
{
    const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
    const Eigen::VectorXd e1 = mesh.vertex(t[1]) - mesh.vertex(t[0]);
    const Eigen::VectorXd e2 = mesh.vertex(t[2]) - mesh.vertex(t[0]);
    Eigen::MatrixXd basis(e1.size(), 2);
    basis.col(0) = e1.normalized();
    Eigen::VectorXd w = e2 - e2.dot(basis.col(0)) * basis.col(0);
    if (!(w.norm() > 0.0)) throw MeshError("degenerate face " + std::to_string(f));
    basis.col(1) = w.normalized();
    return basis;
}

/// Orthonormal basis of T_x S^n (n columns), from Gram-Schmidt on the
/// projected ambient axes in index order. Axes whose residual falls below
/// 1e-6 are skipped.
inline Eigen::MatrixXd sphere_frame(const Eigen::VectorXd& x)
{
    const Eigen::Index dim = x.size();
    Eigen::MatrixXd frame(dim, dim - 1);
    Eigen::Index filled = 0;
    for (Eigen::Index axis = 0; axis < dim && filled < dim - 1; ++axis) {
        Eigen::VectorXd w = Eigen::VectorXd::Unit(dim, axis);
        w -= w.dot(x) * x;
        for (Eigen::Index j = 0; j < filled; ++j) w -= w.dot(frame.col(j)) * frame.col(j);
        const double nrm = w.norm();
        if (nrm < 1e-6) continue;
        frame.col(filled++) = w / nrm;
    }
    if (filled != dim - 1) throw MeshError("could not build a sphere-tangent frame");
    return frame;
}

/// Per-vertex orthonormal basis of the surface tangent plane, as two
/// V x (n+1) matrices. Both vectors are orthogonal to the position.
struct TangentPlanes
{
    Eigen::MatrixXd first;
    Eigen::MatrixXd second;
    bool from_chart = false;

    /// Tangential projection of the vector `w` at vertex `v`.
    Eigen::VectorXd project(Index v, const Eigen::VectorXd& w) const
    {
        const Eigen::VectorXd t1 = first.row(v).transpose();
        const Eigen::VectorXd t2 = second.row(v).transpose();
        return w.dot(t1) * t1 + w.dot(t2) * t2;
    }
};

namespace detail {

inline void orthonormalize_pair(const Eigen::VectorXd& x, Eigen::VectorXd& a, Eigen::VectorXd& b)
{
    a -= a.dot(x) * x;
    a.normalize();
    b -= b.dot(x) * x;
    b -= b.dot(a) * a;
    b.normalize();
}

} // namespace detail

/// Discrete tangent planes of the surface at its vertices.
///
/// Uses the analytic chart when present; otherwise the dominant 2-plane of the
/// area-weighted sum of incident face-plane projectors.
inline TangentPlanes compute_tangent_planes(const SurfaceMesh& mesh)
{
    const Index nv = mesh.num_vertices();
    const int dim = mesh.ambient_dim() + 1;
    TangentPlanes planes{Eigen::MatrixXd(nv, dim), Eigen::MatrixXd(nv, dim), false};

    if (mesh.chart()) {
        planes.from_chart = true;
        for (Index v = 0; v < nv; ++v) {
            const Eigen::VectorXd x = mesh.vertex(v);
            Eigen::VectorXd a = mesh.chart()->d_first.row(v).transpose();
            Eigen::VectorXd b = mesh.chart()->d_second.row(v).transpose();
            detail::orthonormalize_pair(x, a, b);
            planes.first.row(v) = a.transpose();
            planes.second.row(v) = b.transpose();
        }
        return planes;
    }

    std::vector<Eigen::MatrixXd> projector(static_cast<std::size_t>(nv), Eigen::MatrixXd::Zero(dim, dim));
    std::vector<int> incident(static_cast<std::size_t>(nv), 0);
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const Eigen::MatrixXd basis = face_plane(mesh, f);
        const Eigen::MatrixXd p = mesh.face_area(f) * (basis * basis.transpose());
        for (Index v : mesh.faces()[static_cast<std::size_t>(f)]) {
            projector[static_cast<std::size_t>(v)] += p;
            ++incident[static_cast<std::size_t>(v)];
        }
    }
    for (Index v = 0; v < nv; ++v) {
        if (incident[static_cast<std::size_t>(v)] == 0) {
            throw MeshError("isolated vertex " + std::to_string(v) + " has no tangent plane");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projector[static_cast<std::size_t>(v)]);
        Eigen::VectorXd a = es.eigenvectors().col(dim - 1);
        Eigen::VectorXd b = es.eigenvectors().col(dim - 2);
        detail::orthonormalize_pair(mesh.vertex(v), a, b);
        planes.first.row(v) = a.transpose();
        planes.second.row(v) = b.transpose();
    }
    return planes;
}

} // namespace minsurf
