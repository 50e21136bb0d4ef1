#pragma once

#include "minsurf/moebius.hpp"
#include "minsurf/operators.hpp"

#include <Eigen/Dense>

#include <random>

namespace minsurf {

/// Random polynomials of low degree in the ambient coordinates, restricted
/// to the surface. They are smooth and mesh independent, so the same sample
/// can be compared across resolutions.
class BandLimitedSampler
{
public:
    BandLimitedSampler(int ambient_dim, std::uint64_t seed, int degree = 2)
        : m_dim(ambient_dim)
        , m_degree(degree)
        , m_rng(seed)
    {}

    /// Coefficients for one scalar polynomial: constant, linear and (degree 2)
    /// the upper-triangular quadratic monomials, each standard normal.
    Eigen::VectorXd draw_coefficients()
    {
        Eigen::VectorXd c(num_monomials());
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = m_normal(m_rng);
        return c;
    }

    ScalarField evaluate(const Eigen::MatrixXd& points, const Eigen::VectorXd& c) const
    {
        ScalarField out = ScalarField::Constant(points.rows(), c[0]);
        int k = 1;
        for (int i = 0; i < m_dim; ++i) out += c[k++] * points.col(i);
        if (m_degree >= 2) {
            for (int i = 0; i < m_dim; ++i) {
                for (int j = i; j < m_dim; ++j) out += c[k++] * points.col(i).cwiseProduct(points.col(j));
            }
        }
        return out;
    }

    ScalarField scalar(const SurfaceMesh& mesh) { return evaluate(mesh.vertices(), draw_coefficients()); }

    /// Sphere-tangent field: each ambient component a random polynomial, then
    /// projected to T S^n.
    TangentField field(const SurfaceMesh& mesh)
    {
        Eigen::MatrixXd raw(mesh.num_vertices(), m_dim);
        for (int k = 0; k < m_dim; ++k) raw.col(k) = scalar(mesh);
        return project_to_sphere(mesh, raw);
    }

    Eigen::VectorXd direction()
    {
        Eigen::VectorXd v(m_dim);
        for (int i = 0; i < m_dim; ++i) v[i] = m_normal(m_rng);
        return v;
    }

    Eigen::VectorXd unit_direction() { return direction().normalized(); }

private:
    int num_monomials() const { return 1 + m_dim + (m_degree >= 2 ? m_dim * (m_dim + 1) / 2 : 0); }

    int m_dim;
    int m_degree;
    std::mt19937_64 m_rng;
    std::normal_distribution<double> m_normal;
};

} // namespace minsurf
