#pragma once

#include "minsurf/eigensolver.hpp"
#include "minsurf/geometry.hpp"
#include "minsurf/moebius.hpp"
#include "minsurf/operators.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace minsurf {

/// Coordinate form of the second variation of energy,
///   sum_k int <grad X^k, grad Y^k> - 2 X^k Y^k,
/// with the scalar stiffness and consistent mass applied componentwise.
inline double energy_form_coordinate(const Discretization& disc, const TangentField& x, const TangentField& y)
{
    require_sphere_tangent(disc.mesh(), x);
    require_sphere_tangent(disc.mesh(), y);
    const Eigen::MatrixXd sy = disc.stiffness() * y.vectors - 2.0 * (disc.mass() * y.vectors);
    return x.vectors.cwiseProduct(sy).sum();
}

inline double energy_form_coordinate(const Discretization& disc, const TangentField& x)
{
    return energy_form_coordinate(disc, x, x);
}

/// int <D X, D Y> with D the covariant derivative of S^n.
///
/// On each face the flat derivative of the P1 interpolant is projected to
/// T S^n at the normalized face centroid.
inline double covariant_gradient_pairing(const Discretization& disc, const TangentField& x, const TangentField& y)
{
    const SurfaceMesh& mesh = disc.mesh();
    double total = 0.0;
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.faces()[static_cast<std::size_t>(f)];
        const Eigen::VectorXd c =
            (mesh.vertex(t[0]) + mesh.vertex(t[1]) + mesh.vertex(t[2])).normalized();
        const Eigen::MatrixXd& g = disc.hat_gradients_of(f);
        Eigen::MatrixXd px(c.size(), 3);
        Eigen::MatrixXd py(c.size(), 3);
        for (int a = 0; a < 3; ++a) {
            const Eigen::VectorXd xa = x.vectors.row(t[a]).transpose();
            const Eigen::VectorXd ya = y.vectors.row(t[a]).transpose();
            px.col(a) = xa - xa.dot(c) * c;
            py.col(a) = ya - ya.dot(c) * c;
        }
        const Eigen::Matrix3d gg = g.transpose() * g;
        const Eigen::Matrix3d xy = px.transpose() * py;
        total += disc.face_areas()[f] * gg.cwiseProduct(xy).sum();
    }
    return total;
}

/// Covariant form  int |D X|^2 - 2 |X^N|^2 - |X^T|^2  (cross-check of the
/// coordinate form; the mass terms use vertex quadrature).
inline double energy_form_covariant(const Discretization& disc, const TangentField& x)
{
    const SplitField s = split_tangent_normal(disc, x);
    return covariant_gradient_pairing(disc, x, x) - 2.0 * disc.pair(s.normal, s.normal) -
           disc.pair(s.tangential, s.tangential);
}

/// Jacobi form of the area, int <grad f, grad g> - 2 f g - |A|^2 f g.
/// Only for surfaces in S^3 whose chart provides |A|^2.
inline double area_jacobi_form(const Discretization& disc, const ScalarField& f, const ScalarField& g)
{
    const SurfaceMesh& mesh = disc.mesh();
    if (mesh.ambient_dim() != 3) throw UnsupportedError("area Jacobi form is only available in S^3");
    if (!mesh.chart() || !mesh.chart()->a_squared) {
        throw UnsupportedError("area Jacobi form needs the analytic |A|^2 of a catalog surface");
    }
    if (f.size() != mesh.num_vertices() || g.size() != mesh.num_vertices()) {
        throw ContractError("field length does not match vertex count");
    }
    const SparseMatrix ma = assemble_weighted_mass(mesh, *mesh.chart()->a_squared);
    return f.dot(disc.stiffness() * g) - 2.0 * f.dot(disc.mass() * g) - f.dot(ma * g);
}

enum class FormKind { energy, area_jacobi };

inline std::string to_string(FormKind k)
{
    return k == FormKind::energy ? "energy" : "areaJacobi";
}

/// Matrix of a second-variation form together with its mass matrix.
///
/// For the energy form the unknowns are the coordinates in a per-vertex
/// orthonormal frame of T_x S^n (n per vertex, vertex-major).
struct QuadraticFormMatrix
{
    SparseMatrix q;
    SparseMatrix m;
    FormKind kind = FormKind::energy;
    /// Lower bound on the spectrum of q w = mu m w.
    double lower_bound = 0.0;
    /// Frames used for the energy form, one (n+1) x n block per vertex.
    std::vector<Eigen::MatrixXd> frames;

    /// Ambient field of a coefficient vector (energy form only).
    TangentField field(const Eigen::VectorXd& w) const
    {
        const auto nv = static_cast<Eigen::Index>(frames.size());
        const Eigen::Index dim = frames.front().rows();
        const Eigen::Index nf = frames.front().cols();
        Eigen::MatrixXd out(nv, dim);
        for (Eigen::Index v = 0; v < nv; ++v) out.row(v) = (frames[v] * w.segment(v * nf, nf)).transpose();
        return {out};
    }
};

inline QuadraticFormMatrix assemble_energy_form(const Discretization& disc)
{
    const SurfaceMesh& mesh = disc.mesh();
    const int nf = mesh.ambient_dim();
    QuadraticFormMatrix form;
    form.kind = FormKind::energy;
    form.lower_bound = -2.0; // S >= 0 gives q >= -2 m
    form.frames.reserve(static_cast<std::size_t>(mesh.num_vertices()));
    for (Index v = 0; v < mesh.num_vertices(); ++v) form.frames.push_back(sphere_frame(mesh.vertex(v)));

    const SparseMatrix sm = disc.stiffness() - 2.0 * disc.mass();
    Triplets tq;
    Triplets tm;
    tq.reserve(static_cast<std::size_t>(sm.nonZeros()) * nf * nf);
    tm.reserve(static_cast<std::size_t>(sm.nonZeros()) * nf * nf);
    const SparseMatrix& mass = disc.mass();
    for (int k = 0; k < sm.outerSize(); ++k) {
        SparseMatrix::InnerIterator im(mass, k);
        for (SparseMatrix::InnerIterator it(sm, k); it; ++it) {
            const Index r = static_cast<Index>(it.row());
            const Index c = static_cast<Index>(it.col());
            while (im && im.row() < it.row()) ++im;
            const double mv = (im && im.row() == it.row()) ? im.value() : 0.0;
            const Eigen::MatrixXd overlap = form.frames[r].transpose() * form.frames[c];
            for (int a = 0; a < nf; ++a) {
                for (int b = 0; b < nf; ++b) {
                    tq.emplace_back(r * nf + a, c * nf + b, it.value() * overlap(a, b));
                    if (mv != 0.0) tm.emplace_back(r * nf + a, c * nf + b, mv * overlap(a, b));
                }
            }
        }
    }
    const Eigen::Index size = static_cast<Eigen::Index>(mesh.num_vertices()) * nf;
    form.q.resize(size, size);
    form.m.resize(size, size);
    form.q.setFromTriplets(tq.begin(), tq.end());
    form.m.setFromTriplets(tm.begin(), tm.end());
    return form;
}

inline QuadraticFormMatrix assemble_area_jacobi(const Discretization& disc)
{
    const SurfaceMesh& mesh = disc.mesh();
    if (mesh.ambient_dim() != 3) throw UnsupportedError("area Jacobi form is only available in S^3");
    if (!mesh.chart() || !mesh.chart()->a_squared) {
        throw UnsupportedError("area Jacobi form needs the analytic |A|^2 of a catalog surface");
    }
    const Eigen::VectorXd& a2 = *mesh.chart()->a_squared;
    QuadraticFormMatrix form;
    form.kind = FormKind::area_jacobi;
    form.q = disc.stiffness() - 2.0 * disc.mass() - assemble_weighted_mass(mesh, a2);
    form.m = disc.mass();
    form.lower_bound = -(2.0 + a2.maxCoeff());
    return form;
}

struct IndexReport
{
    FormKind kind = FormKind::energy;
    int count_negative = 0;
    double delta = 0.1;
    std::vector<double> negative;  // eigenvalues below -delta
    std::vector<double> near_zero; // eigenvalues in [-delta, delta]
    std::vector<double> eigenvalues; // every computed eigenvalue, ascending
};

/// Number of eigenvalues of q w = mu m w below -delta.
///
/// Eigenpairs are requested in growing batches until one eigenvalue above
/// delta is seen, so the count and the near-zero band are complete.
inline IndexReport negative_index_count(
    const QuadraticFormMatrix& form,
    double delta = 0.1,
    std::uint64_t seed = 0,
    int initial_k = 16)
{
    if (!(delta >= 0.0)) throw ParameterError("delta must be non-negative");
    const auto size = static_cast<int>(form.q.rows());
    EigenSolverOptions options;
    options.seed = seed;
    options.lower_bound = form.lower_bound;
    int k = std::min(initial_k, size - 1);
    std::vector<EigenPair> pairs;
    for (;;) {
        pairs = solve_smallest_eigenpairs(form.q, form.m, k, options);
        if (pairs.back().lambda > delta || k == size - 1) break;
        k = std::min(2 * k, size - 1);
    }
    IndexReport report;
    report.kind = form.kind;
    report.delta = delta;
    for (const auto& p : pairs) {
        report.eigenvalues.push_back(p.lambda);
        if (p.lambda < -delta) {
            report.negative.push_back(p.lambda);
        } else if (p.lambda <= delta) {
            report.near_zero.push_back(p.lambda);
        }
    }
    report.count_negative = static_cast<int>(report.negative.size());
    return report;
}

/// Value of r(g, b) in the index bracket ind_E <= ind_A <= ind_E + r, with the
/// list of formula cases (1, 2, 3) whose range contains (g, b).
struct BracketTerm
{
    int value = 0;
    std::vector<int> cases;
};

inline BracketTerm ejiri_micallef_r(int genus, int branch_points)
{
    if (genus < 0 || branch_points < 0) throw ParameterError("genus and branch count must be non-negative");
    const int g = genus;
    const int b = branch_points;
    BracketTerm out;
    std::vector<int> values;
    if (b <= 2 * g - 3) {
        out.cases.push_back(1);
        values.push_back(6 * g - 6 - 2 * b);
    }
    if (2 * g - 2 <= b && b <= 4 * g - 4) {
        out.cases.push_back(2);
        // [-b/2] is the integer part (floor) of -b/2
        const int floor_half = -((b + 1) / 2);
        values.push_back(4 * g - 2 + 2 * floor_half);
    }
    if (b >= 4 * g - 3) {
        out.cases.push_back(3);
        values.push_back(0);
    }
    if (values.empty()) {
        throw ParameterError(
            "no case of the bracket formula applies to g=" + std::to_string(g) + ", b=" + std::to_string(b));
    }
    out.value = values.front();
    return out;
}

} // namespace minsurf
