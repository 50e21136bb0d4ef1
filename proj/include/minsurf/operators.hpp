#pragma once

#include "minsurf/geometry.hpp"
#include "minsurf/mesh.hpp"

#include <Eigen/Sparse>

#include <array>
#include <vector>

namespace minsurf {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

enum class MassMode { lumped, consistent };

/// P1 stiffness matrix, S_ij = int grad(phi_i) . grad(phi_j).
///
/// Off-diagonals are the cotangent weights; the diagonal is set to minus the
/// off-diagonal row sum so constants lie in the kernel exactly.
inline SparseMatrix assemble_stiffness(const SurfaceMesh& mesh)
{
    const Index nv = mesh.num_vertices();
    Triplets triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.num_faces()) * 6);
    Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(nv);
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const double area = mesh.face_area(f);
        if (!(area > 0.0)) throw MeshError("zero-area triangle " + std::to_string(f));
        const Eigen::MatrixXd grads = hat_gradients(mesh, f);
        const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
        for (int a = 0; a < 3; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                const double w = area * grads.col(a).dot(grads.col(b));
                triplets.emplace_back(t[a], t[b], w);
                triplets.emplace_back(t[b], t[a], w);
                diagonal[t[a]] -= w;
                diagonal[t[b]] -= w;
            }
        }
    }
    for (Index v = 0; v < nv; ++v) triplets.emplace_back(v, v, diagonal[v]);
    SparseMatrix s(nv, nv);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return s;
}

/// Vertex weights: one third of the area of every incident triangle. These
/// are the row sums of the consistent mass matrix, so `weights . f` is the
/// exact integral of the P1 interpolant of f.
inline Eigen::VectorXd vertex_weights(const SurfaceMesh& mesh)
{
    Eigen::VectorXd m = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const double third = mesh.face_area(f) / 3.0;
        for (Index v : mesh.faces()[static_cast<std::size_t>(f)]) m[v] += third;
    }
    return m;
}

/// Mixed Voronoi vertex areas: circumcentric cells on non-obtuse triangles,
/// A/2 to the obtuse corner and A/4 to the others otherwise. They partition
/// each triangle, so the total equals the mesh area.
inline Eigen::VectorXd voronoi_areas(const SurfaceMesh& mesh)
{
    Eigen::VectorXd m = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
        const double area = mesh.face_area(f);
        if (!(area > 0.0)) throw MeshError("zero-area triangle " + std::to_string(f));
        const std::array<Eigen::VectorXd, 3> p{mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2])};
        std::array<double, 3> cot{};
        int obtuse = -1;
        for (int c = 0; c < 3; ++c) {
            const double d = (p[(c + 1) % 3] - p[c]).dot(p[(c + 2) % 3] - p[c]);
            cot[c] = d / (2.0 * area);
            if (d < 0.0) obtuse = c;
        }
        for (int c = 0; c < 3; ++c) {
            const int j = (c + 1) % 3;
            const int k = (c + 2) % 3;
            if (obtuse < 0) {
                m[t[c]] += ((p[c] - p[j]).squaredNorm() * cot[k] + (p[c] - p[k]).squaredNorm() * cot[j]) / 8.0;
            } else {
                m[t[c]] += (c == obtuse) ? area / 2.0 : area / 4.0;
            }
        }
    }
    return m;
}

/// Mass matrix of the P1 space. The lumped mode is diagonal with the mixed
/// Voronoi areas; both modes carry the total mesh area.
inline SparseMatrix assemble_mass(const SurfaceMesh& mesh, MassMode mode = MassMode::consistent)
{
    const Index nv = mesh.num_vertices();
    SparseMatrix m(nv, nv);
    Triplets triplets;
    if (mode == MassMode::lumped) {
        const Eigen::VectorXd d = voronoi_areas(mesh);
        for (Index v = 0; v < nv; ++v) triplets.emplace_back(v, v, d[v]);
    } else {
        triplets.reserve(static_cast<std::size_t>(mesh.num_faces()) * 9);
        for (Index f = 0; f < mesh.num_faces(); ++f) {
            const double area = mesh.face_area(f);
            if (!(area > 0.0)) throw MeshError("zero-area triangle " + std::to_string(f));
            const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    triplets.emplace_back(t[a], t[b], area * (a == b ? 2.0 : 1.0) / 12.0);
                }
            }
        }
    }
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

/// Same as the consistent mass matrix with a per-face weight (face mean of
/// the vertex values of `weight`).
inline SparseMatrix assemble_weighted_mass(const SurfaceMesh& mesh, const Eigen::VectorXd& weight)
{
    if (weight.size() != mesh.num_vertices()) throw ContractError("weight length mismatch");
    SparseMatrix m(mesh.num_vertices(), mesh.num_vertices());
    Triplets triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.num_faces()) * 9);
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
        const double w = (weight[t[0]] + weight[t[1]] + weight[t[2]]) / 3.0;
        const double area = mesh.face_area(f);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                triplets.emplace_back(t[a], t[b], w * area * (a == b ? 2.0 : 1.0) / 12.0);
            }
        }
    }
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

/// Integral of the P1 interpolant of a vertex field.
inline double integrate(const SurfaceMesh& mesh, const ScalarField& values)
{
    if (values.size() != mesh.num_vertices()) throw ContractError("field length does not match vertex count");
    return vertex_weights(mesh).dot(values);
}

/// Integral of a face-wise constant density.
inline double integrate_faces(const SurfaceMesh& mesh, const Eigen::VectorXd& density)
{
    if (density.size() != mesh.num_faces()) throw ContractError("density length does not match face count");
    double total = 0.0;
    for (Index f = 0; f < mesh.num_faces(); ++f) total += mesh.face_area(f) * density[f];
    return total;
}

/// Per-face gradient of the P1 interpolant of `values` (F x (n+1)).
inline Eigen::MatrixXd surface_gradient(const SurfaceMesh& mesh, const ScalarField& values)
{
    if (values.size() != mesh.num_vertices()) throw ContractError("field length does not match vertex count");
    Eigen::MatrixXd g(mesh.num_faces(), mesh.ambient_dim() + 1);
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
        const Eigen::MatrixXd grads = hat_gradients(mesh, f);
        g.row(f) = (grads.col(0) * values[t[0]] + grads.col(1) * values[t[1]] + grads.col(2) * values[t[2]])
                       .transpose();
    }
    return g;
}

inline bool is_symmetric(const SparseMatrix& q, double relative_tolerance = 1e-12)
{
    const SparseMatrix diff = SparseMatrix(q.transpose()) - q;
    double qmax = 0.0;
    for (int k = 0; k < q.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(q, k); it; ++it) qmax = std::max(qmax, std::abs(it.value()));
    }
    double dmax = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
    }
    return dmax <= relative_tolerance * qmax;
}

/// Mesh together with the operators every downstream computation needs.
///
/// Pointwise integrands (products of vertex quantities) use vertex
/// quadrature via `integrate`/`pair`; bilinear forms of P1 fields use the
/// consistent mass matrix.
class Discretization
{
public:
    explicit Discretization(SurfaceMesh mesh)
        : m_mesh(std::move(mesh))
        , m_stiffness(assemble_stiffness(m_mesh))
        , m_mass(assemble_mass(m_mesh, MassMode::consistent))
        , m_weights(vertex_weights(m_mesh))
        , m_planes(compute_tangent_planes(m_mesh))
    {
        m_face_areas.resize(m_mesh.num_faces());
        m_hat_gradients.reserve(static_cast<std::size_t>(m_mesh.num_faces()));
        for (Index f = 0; f < m_mesh.num_faces(); ++f) {
            m_face_areas[f] = m_mesh.face_area(f);
            m_hat_gradients.push_back(hat_gradients(m_mesh, f));
        }
    }

    const SurfaceMesh& mesh() const { return m_mesh; }
    int n() const { return m_mesh.ambient_dim(); }
    int dim() const { return m_mesh.ambient_dim() + 1; }
    Index num_vertices() const { return m_mesh.num_vertices(); }
    const SparseMatrix& stiffness() const { return m_stiffness; }
    const SparseMatrix& mass() const { return m_mass; }
    const Eigen::VectorXd& weights() const { return m_weights; }
    const TangentPlanes& planes() const { return m_planes; }
    const Eigen::VectorXd& face_areas() const { return m_face_areas; }
    const Eigen::MatrixXd& hat_gradients_of(Index f) const
    {
        return m_hat_gradients[static_cast<std::size_t>(f)];
    }
    double area() const { return m_weights.sum(); }
    double h() const { return m_mesh.mesh_size(); }

    /// Column `i` of the vertex coordinates, i.e. the function x_i.
    ScalarField coordinate(int i) const { return m_mesh.vertices().col(i); }

    double integrate(const ScalarField& values) const
    {
        if (values.size() != num_vertices()) throw ContractError("field length does not match vertex count");
        return m_weights.dot(values);
    }

    /// Vertex-quadrature L2 pairing of two vector fields (V x d each).
    double pair(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const
    {
        return m_weights.dot(x.cwiseProduct(y).rowwise().sum());
    }

private:
    SurfaceMesh m_mesh;
    SparseMatrix m_stiffness;
    SparseMatrix m_mass;
    Eigen::VectorXd m_weights;
    TangentPlanes m_planes;
    Eigen::VectorXd m_face_areas;
    std::vector<Eigen::MatrixXd> m_hat_gradients;
};

} // namespace minsurf
