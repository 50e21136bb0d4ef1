#pragma once

#include "minsurf/mesh.hpp"
#include "minsurf/operators.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace minsurf {

/// Reference data attached to a catalog surface. Fields are only set when
/// the value is known in closed form or from the literature.
struct KnownData
{
    std::optional<double> area;
    std::optional<double> lambda1;
    std::optional<int> lambda1_multiplicity;
    std::optional<double> a_squared;
    std::optional<int> area_index;
    std::optional<int> energy_index;
    bool contained_in_geodesic_s2 = false;
    bool minimal = true;
    /// Where each known value comes from ("analytic", "oracle", "literature").
    std::map<std::string, std::string> provenance;
};

struct CatalogEntry
{
    std::string name;
    std::string description;
    std::string resolution_meaning;
    int min_n = 3;
    KnownData known;
};

namespace detail {

inline SurfaceMesh make_mesh(
    int n,
    const std::vector<Eigen::Vector3d>& points,
    Faces faces,
    std::optional<Chart> chart,
    std::string name)
{
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()), n + 1);
    for (std::size_t i = 0; i < points.size(); ++i) v.row(static_cast<Eigen::Index>(i)).head<3>() = points[i].normalized();
    return SurfaceMesh(n, std::move(v), std::move(faces), std::move(chart), std::move(name));
}

inline void icosphere(int res, std::vector<Eigen::Vector3d>& points, Faces& faces)
{
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    points = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& p : points) p.normalize();
    faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (int level = 0; level < res; ++level) {
        std::map<std::pair<Index, Index>, Index> midpoint;
        auto mid = [&](Index a, Index b) {
            const auto key = std::minmax(a, b);
            if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
            points.push_back((points[a] + points[b]).normalized());
            const Index id = static_cast<Index>(points.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        Faces refined;
        refined.reserve(faces.size() * 4);
        for (const auto& t : faces) {
            const Index ab = mid(t[0], t[1]);
            const Index bc = mid(t[1], t[2]);
            const Index ca = mid(t[2], t[0]);
            refined.push_back({t[0], ab, ca});
            refined.push_back({t[1], bc, ab});
            refined.push_back({t[2], ca, bc});
            refined.push_back({ab, bc, ca});
        }
        faces = std::move(refined);
    }
}

} // namespace detail

/// Totally geodesic S^2 = S^n intersected with the span of e1, e2, e3.
///
/// `res` is the number of icosahedron subdivisions. The attached chart stores
/// an orthonormal frame of the exact tangent plane at each vertex.
inline SurfaceMesh build_equatorial_sphere(int n, int res)
{
    if (n < 2) throw ParameterError("equatorial sphere needs n >= 2");
    if (res < 0) throw ParameterError("subdivision level must be >= 0");
    std::vector<Eigen::Vector3d> points;
    Faces faces;
    detail::icosphere(res, points, faces);

    const auto nv = static_cast<Eigen::Index>(points.size());
    Chart chart;
    chart.domain = "S^2 (local orthonormal frames)";
    chart.map = [n](double theta, double phi) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
        x.head<3>() << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
        return x;
    };
    chart.parameters.resize(nv, 2);
    chart.d_first = Eigen::MatrixXd::Zero(nv, n + 1);
    chart.d_second = Eigen::MatrixXd::Zero(nv, n + 1);
    for (Eigen::Index v = 0; v < nv; ++v) {
        const Eigen::Vector3d p = points[static_cast<std::size_t>(v)].normalized();
        chart.parameters(v, 0) = std::acos(std::clamp(p.z(), -1.0, 1.0));
        chart.parameters(v, 1) = std::atan2(p.y(), p.x());
        Eigen::Vector3d t1 = Eigen::Vector3d::Zero();
        for (int axis = 0; axis < 3; ++axis) {
            t1 = Eigen::Vector3d::Unit(axis) - p[axis] * p;
            if (t1.norm() > 0.5) break;
        }
        t1.normalize();
        const Eigen::Vector3d t2 = p.cross(t1);
        chart.d_first.row(v).head<3>() = t1.transpose();
        chart.d_second.row(v).head<3>() = t2.transpose();
    }
    if (n == 3) chart.a_squared = Eigen::VectorXd::Zero(nv);
    return detail::make_mesh(n, points, std::move(faces), std::move(chart), "equatorial-sphere");
}

namespace detail {

inline SurfaceMesh torus_in(int n, int res, std::string name)
{
    if (res < 8) throw ParameterError("torus grid size must be >= 8");
    if (n < 3) throw ParameterError("a Clifford torus needs n >= 3");
    const double s = 1.0 / std::sqrt(2.0);
    const Index nv = res * res;
    auto id = [res](int i, int j) { return ((i % res) * res) + (j % res); };

    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(nv, n + 1);
    Chart chart;
    chart.domain = "[0, 2pi) x [0, 2pi)";
    chart.map = [n, s](double a, double b) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
        x.head<4>() << s * std::cos(a), s * std::sin(a), s * std::cos(b), s * std::sin(b);
        return x;
    };
    chart.parameters.resize(nv, 2);
    chart.d_first = Eigen::MatrixXd::Zero(nv, n + 1);
    chart.d_second = Eigen::MatrixXd::Zero(nv, n + 1);
    for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
            const double a = 2.0 * std::numbers::pi * i / res;
            const double b = 2.0 * std::numbers::pi * j / res;
            const Index k = id(i, j);
            v.row(k) = chart.map(a, b).transpose();
            v.row(k).normalize();
            chart.parameters.row(k) << a, b;
            chart.d_first.row(k).head<2>() << -s * std::sin(a), s * std::cos(a);
            chart.d_second.row(k).segment<2>(2) << -s * std::sin(b), s * std::cos(b);
        }
    }
    if (n == 3) chart.a_squared = Eigen::VectorXd::Constant(nv, 2.0);

    Faces faces;
    faces.reserve(static_cast<std::size_t>(2 * nv));
    for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return SurfaceMesh(n, std::move(v), std::move(faces), std::move(chart), std::move(name));
}

} // namespace detail

/// Clifford torus (cos a, sin a, cos b, sin b)/sqrt(2) in S^3 on a res x res
/// grid; each grid quad is split along its (i,j)-(i+1,j+1) diagonal.
inline SurfaceMesh build_clifford_torus(int res)
{
    return detail::torus_in(3, res, "clifford-torus");
}

/// Product of k circles placed in the first 2k coordinates of R^{n+1}.
/// Only k = 2 (the Clifford torus) is available.
inline SurfaceMesh build_product_torus(int k, int n, int res)
{
    if (k != 2) throw UnsupportedError("only the product of two circles is in the catalog");
    return detail::torus_in(n, res, n == 3 ? "clifford-torus" : "product-torus");
}

/// Equatorial sphere with every vertex moved by a random offset in all n+1
/// coordinates and projected back to S^n. Not minimal; used as a negative
/// control. `amplitude` is relative to the mesh size.
inline SurfaceMesh build_jittered_sphere(int n, int res, double amplitude = 0.2, std::uint64_t seed = 0)
{
    const SurfaceMesh base = build_equatorial_sphere(n, res);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::MatrixXd v = base.vertices();
    const double scale = amplitude * base.mesh_size();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) v(i, c) += scale * uniform(rng);
        v.row(i).normalize();
    }
    return SurfaceMesh(n, std::move(v), base.faces(), std::nullopt, "jittered-sphere");
}

inline std::vector<CatalogEntry> catalog()
{
    const double pi = std::numbers::pi;
    std::vector<CatalogEntry> entries;

    CatalogEntry sphere{"equatorial-sphere", "totally geodesic S^2 in S^n (icosphere)",
                        "icosahedron subdivision level", 2, {}};
    sphere.known.area = 4.0 * pi;
    sphere.known.lambda1 = 2.0;
    sphere.known.lambda1_multiplicity = 3;
    sphere.known.a_squared = 0.0;
    sphere.known.area_index = 1;
    sphere.known.contained_in_geodesic_s2 = true;
    sphere.known.provenance = {{"area", "analytic"},
                               {"lambda1", "oracle: spherical harmonics k(k+1)"},
                               {"a_squared", "analytic"},
                               {"area_index", "literature: Urbano, totally geodesic sphere has index 1 (n = 3)"}};
    entries.push_back(sphere);

    CatalogEntry clifford{"clifford-torus", "Clifford torus (cos a, sin a, cos b, sin b)/sqrt(2) in S^3",
                          "grid points per circle", 3, {}};
    clifford.known.area = 2.0 * pi * pi;
    clifford.known.lambda1 = 2.0;
    clifford.known.lambda1_multiplicity = 4;
    clifford.known.a_squared = 2.0;
    clifford.known.area_index = 5;
    clifford.known.energy_index = 4;
    clifford.known.provenance = {{"area", "oracle: flat torus of side sqrt(2) pi"},
                                 {"lambda1", "oracle: flat-torus spectrum 2(j^2 + k^2)"},
                                 {"a_squared", "analytic"},
                                 {"area_index", "literature: Urbano, Clifford torus has index 5"},
                                 {"energy_index", "literature: Lawson surface xi_{1,1}, ind_E = 4"}};
    entries.push_back(clifford);

    CatalogEntry product{"product-torus", "Clifford torus included equatorially in S^n, n >= 3 (full only for n = 3)",
                         "grid points per circle", 3, {}};
    product.known.area = 2.0 * pi * pi;
    product.known.lambda1 = 2.0;
    product.known.lambda1_multiplicity = 4;
    product.known.provenance = {{"area", "analytic: isometric inclusion"},
                                {"lambda1", "analytic: intrinsic flat metric unchanged by inclusion"}};
    entries.push_back(product);

    CatalogEntry jitter{"jittered-sphere", "negative control: equatorial sphere with randomly displaced vertices",
                        "icosahedron subdivision level", 2, {}};
    jitter.known.minimal = false;
    jitter.known.provenance = {{"minimal", "construction: random displacement breaks minimality"}};
    entries.push_back(jitter);
    return entries;
}

/// Build a catalog surface by name. `res` follows the entry's resolution semantics.
inline SurfaceMesh build_catalog_surface(const std::string& name, int n, int res, std::uint64_t seed = 0)
{
    if (name == "equatorial-sphere" || name == "equator" || name == "sphere") return build_equatorial_sphere(n, res);
    if (name == "clifford-torus" || name == "clifford") {
        if (n != 3) throw ParameterError("clifford-torus lives in S^3; use product-torus for n > 3");
        return build_clifford_torus(res);
    }
    if (name == "product-torus") return build_product_torus(2, n, res);
    if (name == "jittered-sphere") return build_jittered_sphere(n, res, 0.2, seed);
    throw UnsupportedError("unknown catalog surface '" + name + "'");
}

/// Pointwise residual of -Delta u = 2u on the mesh.
struct MinimalityReport
{
    double max_residual = 0.0;          // max_v,i |(M_L^{-1} S u - 2u)_{v,i}|
    double weighted_rms_residual = 0.0; // sqrt(sum_v m_v |r_v|^2 / area)
    double max_gradient_defect = 0.0;   // max_f | |grad u|^2 - 2 |
    double tolerance = 0.0;
    bool minimal = false;
};

/// Strong-form residual via the lumped (Voronoi) mass inverse. Meshes whose
/// residual exceeds `tolerance` are flagged non-minimal.
inline MinimalityReport minimality_residual(const SurfaceMesh& mesh, double tolerance = 0.05)
{
    const SparseMatrix s = assemble_stiffness(mesh);
    const Eigen::VectorXd m = voronoi_areas(mesh);
    const Eigen::MatrixXd& u = mesh.vertices();
    const Eigen::MatrixXd r = (m.cwiseInverse().asDiagonal() * (s * u)) - 2.0 * u;

    MinimalityReport report;
    report.tolerance = tolerance;
    report.max_residual = r.cwiseAbs().maxCoeff();
    report.weighted_rms_residual = std::sqrt(m.dot(r.rowwise().squaredNorm()) / m.sum());
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const Eigen::MatrixXd g = hat_gradients(mesh, f);
        const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
        double energy = 0.0;
        for (int i = 0; i <= mesh.ambient_dim(); ++i) {
            energy += (g.col(0) * u(t[0], i) + g.col(1) * u(t[1], i) + g.col(2) * u(t[2], i)).squaredNorm();
        }
        report.max_gradient_defect = std::max(report.max_gradient_defect, std::abs(energy - 2.0));
    }
    report.minimal = report.max_residual <= tolerance;
    return report;
}

} // namespace minsurf
