#pragma once

#include "minsurf/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace minsurf {

using Index = int;
using Face = std::array<Index, 3>;
using Faces = std::vector<Face>;

/// Per-vertex scalar function on a mesh.
using ScalarField = Eigen::VectorXd;

/// Analytic parametrization attached to catalog surfaces.
///
/// Derivatives are sampled at the mesh vertices; `a_squared` holds |A|^2 of the
/// surface inside S^3 and is only populated for hypersurfaces.
struct Chart
{
    std::string domain;
    std::function<Eigen::VectorXd(double, double)> map;
    Eigen::MatrixXd parameters; // V x 2
    Eigen::MatrixXd d_first;    // V x (n+1), derivative along the first parameter
    Eigen::MatrixXd d_second;   // V x (n+1), derivative along the second parameter
    std::optional<Eigen::VectorXd> a_squared;
};

/// Closed triangulated surface immersed in the unit sphere S^n of R^{n+1}.
///
/// Immutable after construction. The constructor validates the manifold
/// structure, the unit-norm condition and positivity of triangle areas.
class SurfaceMesh
{
public:
    static constexpr double unit_tolerance = 1e-12;

    SurfaceMesh(
        int n,
        Eigen::MatrixXd vertices,
        Faces faces,
        std::optional<Chart> chart = std::nullopt,
        std::string name = "mesh")
        : m_n(n)
        , m_vertices(std::move(vertices))
        , m_faces(std::move(faces))
        , m_chart(std::move(chart))
        , m_name(std::move(name))
    {
        if (m_n < 2) throw ParameterError("ambient sphere dimension must be >= 2");
        if (m_vertices.cols() != m_n + 1) {
            throw MeshError("vertex coordinates must have n+1 entries");
        }
        validate();
        compute_topology();
        compute_span();
    }

    int ambient_dim() const { return m_n; }
    Index num_vertices() const { return static_cast<Index>(m_vertices.rows()); }
    Index num_faces() const { return static_cast<Index>(m_faces.size()); }
    Index num_edges() const { return m_num_edges; }

    const Eigen::MatrixXd& vertices() const { return m_vertices; }
    Eigen::VectorXd vertex(Index v) const { return m_vertices.row(v).transpose(); }
    const Faces& faces() const { return m_faces; }
    const std::optional<Chart>& chart() const { return m_chart; }
    const std::string& name() const { return m_name; }

    int genus() const { return m_genus; }
    int components() const { return m_components; }

    /// Numerical rank of the vertex Gram matrix (cutoff 1e-8 * largest eigenvalue).
    int span_rank() const { return m_span_rank; }
    bool contained_in_geodesic_s2() const { return m_span_rank <= 3; }
    bool full() const { return m_span_rank == m_n + 1; }

    /// Longest edge length.
    double mesh_size() const { return m_mesh_size; }

    double face_area(Index f) const
    {
        const auto& t = m_faces[static_cast<std::size_t>(f)];
        const Eigen::VectorXd e1 = vertex(t[1]) - vertex(t[0]);
        const Eigen::VectorXd e2 = vertex(t[2]) - vertex(t[0]);
        const double g = e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2);
        return 0.5 * std::sqrt(std::max(g, 0.0));
    }

    double total_area() const
    {
        double a = 0.0;
        for (Index f = 0; f < num_faces(); ++f) a += face_area(f);
        return a;
    }

private:
    void validate()
    {
        const Index nv = num_vertices();
        for (Index v = 0; v < nv; ++v) {
            if (!m_vertices.row(v).allFinite()) throw MeshError("non-finite vertex coordinate");
            if (std::abs(m_vertices.row(v).norm() - 1.0) > unit_tolerance) {
                throw MeshError("vertex " + std::to_string(v) + " is not on the unit sphere");
            }
        }
        if (m_faces.empty()) throw MeshError("mesh has no faces");

        std::vector<std::pair<Index, Index>> directed;
        directed.reserve(3 * m_faces.size());
        for (const auto& t : m_faces) {
            for (int c = 0; c < 3; ++c) {
                if (t[c] < 0 || t[c] >= nv) throw MeshError("face index out of range");
            }
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
                throw MeshError("face with repeated vertex");
            }
            for (int c = 0; c < 3; ++c) directed.emplace_back(t[c], t[(c + 1) % 3]);
        }
        std::sort(directed.begin(), directed.end());
        if (std::adjacent_find(directed.begin(), directed.end()) != directed.end()) {
            throw MeshError("edge used twice with the same orientation (non-manifold or non-orientable)");
        }
        for (const auto& [a, b] : directed) {
            if (!std::binary_search(directed.begin(), directed.end(), std::make_pair(b, a))) {
                throw MeshError("boundary edge found; mesh must be closed");
            }
        }
        m_num_edges = static_cast<Index>(directed.size() / 2);

        m_mesh_size = 0.0;
        for (Index f = 0; f < num_faces(); ++f) {
            if (!(face_area(f) > 0.0)) throw MeshError("degenerate triangle " + std::to_string(f));
            const auto& t = m_faces[static_cast<std::size_t>(f)];
            for (int c = 0; c < 3; ++c) {
                m_mesh_size =
                    std::max(m_mesh_size, (m_vertices.row(t[c]) - m_vertices.row(t[(c + 1) % 3])).norm());
            }
        }
    }

    void compute_topology()
    {
        std::vector<Index> parent(static_cast<std::size_t>(num_vertices()));
        std::iota(parent.begin(), parent.end(), 0);
        std::function<Index(Index)> find = [&](Index a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        for (const auto& t : m_faces) {
            parent[find(t[1])] = find(t[0]);
            parent[find(t[2])] = find(t[0]);
        }
        m_components = 0;
        for (Index v = 0; v < num_vertices(); ++v) m_components += (find(v) == v) ? 1 : 0;
        const int euler = num_vertices() - m_num_edges + num_faces();
        m_genus = (2 * m_components - euler) / 2;
    }

    void compute_span()
    {
        const Eigen::MatrixXd gram = m_vertices.transpose() * m_vertices;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const Eigen::VectorXd ev = es.eigenvalues();
        const double cutoff = 1e-8 * ev.maxCoeff();
        m_span_rank = static_cast<int>((ev.array() > cutoff).count());
    }

    int m_n;
    Eigen::MatrixXd m_vertices;
    Faces m_faces;
    std::optional<Chart> m_chart;
    std::string m_name;
    Index m_num_edges = 0;
    int m_genus = 0;
    int m_components = 0;
    int m_span_rank = 0;
    double m_mesh_size = 0.0;
};

} // namespace minsurf
