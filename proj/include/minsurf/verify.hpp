#pragma once

#include "minsurf/catalog.hpp"
#include "minsurf/certificates.hpp"
#include "minsurf/eigensolver.hpp"
#include "minsurf/moebius.hpp"
#include "minsurf/sampling.hpp"
#include "minsurf/second_variation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace minsurf {

/// One row of the identity report. `error` is compared with `tolerance`
/// after division by `scale` (scale 1 means an absolute check).
struct CheckResult
{
    std::string name;
    std::string kind;       // "algebraic", "discretization" or "gate"
    std::string provenance; // "analytic", "oracle" or "proof identity"
    double lhs = 0.0;
    double rhs = 0.0;
    double error = 0.0;
    double scale = 1.0;
    double tolerance = 0.0;
    int samples = 1;
    bool pass = false;
};

struct VerifyOptions
{
    double tolerance = 0.02;
    double algebraic_tolerance = 1e-12;
    double orthogonality_tolerance = 1e-8;
    double minimality_tolerance = 0.05;
    /// Covariant edge check: error <= covariant_factor * h.
    double covariant_factor = 0.05;
    int random_fields = 50;
    int random_directions = 20;
    int random_coefficients = 20;
    /// Eigenfunctions up to this eigenvalue enter the eigen identities.
    double lambda_max = 6.0;
    /// Relative slack on lambda_max for discrete eigenvalues just above it.
    double lambda_slack = 0.05;
    int k = 24;
    std::uint64_t seed = 0;
};

struct VerifyReport
{
    std::string surface;
    int n = 0;
    double h = 0.0;
    MinimalityReport minimality;
    std::vector<CheckResult> checks;

    bool all_pass() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
    std::vector<CheckResult> failures() const
    {
        std::vector<CheckResult> out;
        std::copy_if(checks.begin(), checks.end(), std::back_inserter(out), [](const CheckResult& c) {
            return !c.pass;
        });
        return out;
    }
};

namespace detail {

/// Aggregates many samples of one identity into its worst case.
class WorstCase
{
public:
    WorstCase(std::string name, std::string kind, std::string provenance, double tolerance)
    {
        m_result.name = std::move(name);
        m_result.kind = std::move(kind);
        m_result.provenance = std::move(provenance);
        m_result.tolerance = tolerance;
        m_result.samples = 0;
        m_result.pass = true;
    }

    void add(double lhs, double rhs, double scale)
    {
        const double err = std::abs(lhs - rhs);
        const double rel = scale > 0.0 ? err / scale : err;
        if (m_result.samples == 0 || rel > m_worst) {
            m_worst = rel;
            m_result.lhs = lhs;
            m_result.rhs = rhs;
            m_result.error = err;
            m_result.scale = scale;
        }
        ++m_result.samples;
        m_result.pass = m_worst <= m_result.tolerance;
    }

    void add(const IdentityValues& v) { add(v.lhs, v.rhs, v.scale); }

    CheckResult result() const { return m_result; }

private:
    CheckResult m_result;
    double m_worst = 0.0;
};

/// Scale for D^2E(xi_v) = -2 int |xi_v^N|^2: the normal mass, but at least
/// h^2 |xi_v|^2 so that fields tangent to the surface (normal mass zero) are
/// measured against the discretization level.
inline double moebius_energy_scale(const Discretization& disc, const TangentField& xi, double normal_mass)
{
    return std::max(normal_mass, disc.h() * disc.h() * disc.pair(xi.vectors, xi.vectors));
}

inline double h1_norm_squared(const Discretization& disc, const TangentField& x)
{
    return x.vectors.cwiseProduct(disc.stiffness() * x.vectors).sum() + disc.pair(x.vectors, x.vectors);
}

} // namespace detail

/// The identity suite. The minimality gate runs first; a non-minimal mesh
/// returns with that single failing check.
inline VerifyReport run_verification(const SurfaceMesh& mesh, const VerifyOptions& options = {})
{
    VerifyReport report;
    report.surface = mesh.name();
    report.n = mesh.ambient_dim();
    report.h = mesh.mesh_size();
    report.minimality = minimality_residual(mesh, options.minimality_tolerance);
    {
        CheckResult gate;
        gate.name = "minimality gate: max |M_L^-1 S u - 2u|";
        gate.kind = "gate";
        gate.provenance = "analytic";
        gate.lhs = report.minimality.max_residual;
        gate.error = report.minimality.max_residual;
        gate.tolerance = options.minimality_tolerance;
        gate.pass = report.minimality.minimal;
        report.checks.push_back(gate);
        if (!gate.pass) return report;
    }

    const Discretization disc(mesh);
    const int n = disc.n();
    const int dim = disc.dim();
    const double tol = options.tolerance;
    BandLimitedSampler sampler(dim, options.seed);

    // Pointwise Moebius identities.
    const MoebiusIdentityReport pw = pointwise_identity_report(disc);
    {
        detail::WorstCase c("|xi_i|^2 = 1 - x_i^2 (pointwise)", "algebraic", "analytic", options.algebraic_tolerance);
        for (const auto& row : pw.rows) c.add(row.norm_error, 0.0, 1.0);
        report.checks.push_back(c.result());
    }
    {
        Eigen::VectorXd total = Eigen::VectorXd::Zero(mesh.num_vertices());
        for (int i = 0; i < dim; ++i) total += moebius_field(mesh, i).vectors.rowwise().squaredNorm();
        const double err = (total.array() - n).abs().maxCoeff();
        detail::WorstCase c("sum_i |xi_i|^2 = n (pointwise)", "algebraic", "analytic", options.algebraic_tolerance);
        c.add(n + err, n, n);
        report.checks.push_back(c.result());
    }
    {
        const Eigen::MatrixXd g = moebius_gram(disc);
        detail::WorstCase c("trace G = n area", "algebraic", "analytic", 1e-9);
        c.add(g.trace(), n * disc.area(), n * disc.area());
        report.checks.push_back(c.result());
    }
    if (n > 2) {
        detail::WorstCase c("sum_i |xi_i^N|^2 = n - 2 (pointwise)", "discretization", "proof identity", tol);
        c.add(n - 2 + pw.normal_sum_error, n - 2, n - 2);
        report.checks.push_back(c.result());
    }
    {
        detail::WorstCase c("|xi_i^T|^2 = |grad x_i|^2 (per face)", "discretization", "proof identity", tol);
        c.add(pw.max_tangential_error(), 0.0, 1.0);
        report.checks.push_back(c.result());
    }
    {
        detail::WorstCase c("D_w xi_i = -x_i w (per edge, tolerance in units of h)", "discretization",
                            "proof identity", options.covariant_factor);
        c.add(pw.max_covariant_error(), 0.0, disc.h());
        report.checks.push_back(c.result());
    }

    // D^2E(xi_v) = -2 int |xi_v^N|^2.
    {
        detail::WorstCase c("D^2E(xi_v) = -2 int |xi_v^N|^2 (coordinate axes and random v)", "discretization",
                            "proof identity", tol);
        std::vector<Eigen::VectorXd> dirs;
        for (int i = 0; i < dim; ++i) dirs.push_back(Eigen::VectorXd::Unit(dim, i));
        for (int t = 0; t < options.random_directions; ++t) dirs.push_back(sampler.unit_direction());
        for (const auto& v : dirs) {
            const TangentField xi = moebius_field(mesh, v);
            const SplitField s = split_tangent_normal(disc, xi);
            const double nm = disc.pair(s.normal, s.normal);
            c.add(energy_form_coordinate(disc, xi), -2.0 * nm, detail::moebius_energy_scale(disc, xi, nm));
        }
        report.checks.push_back(c.result());
    }

    // Coordinate against covariant energy form.
    {
        detail::WorstCase c("coordinate form = covariant form (random fields, scale |X|_H1^2)", "discretization",
                            "proof identity", tol);
        for (int t = 0; t < options.random_fields; ++t) {
            const TangentField x = sampler.field(mesh);
            c.add(energy_form_coordinate(disc, x), energy_form_covariant(disc, x), detail::h1_norm_squared(disc, x));
        }
        report.checks.push_back(c.result());
    }

    // Canonical-variation sum on random f and on eigenfunctions.
    const int k = std::min<int>(options.k, static_cast<int>(mesh.num_vertices()) - 1);
    EigenSolverOptions eo;
    eo.seed = options.seed;
    const auto pairs = solve_smallest_eigenpairs(disc.stiffness(), disc.mass(), k, eo);
    const double lambda_cap = options.lambda_max * (1.0 + options.lambda_slack);
    {
        detail::WorstCase c("sum_i D^2E(f xi_i) = n int |grad f|^2 - (2n-4) int f^2", "discretization",
                            "proof identity", tol);
        for (int t = 0; t < options.random_fields; ++t) c.add(prop1_sum(disc, sampler.scalar(mesh)));
        for (const auto& p : pairs) {
            if (p.lambda <= lambda_cap) c.add(prop1_sum(disc, p.field));
        }
        report.checks.push_back(c.result());
    }

    // Eigenfunction identities, in their division-free forms.
    {
        detail::WorstCase c55("(4 - lambda) int f xi_i . a xi = -2 int f xi_i^T . a xi^T", "discretization",
                              "proof identity", tol);
        detail::WorstCase cn("2 int f xi_i^N . a xi^N = (6 - lambda) int f xi_i . a xi", "discretization",
                             "proof identity", tol);
        detail::WorstCase cm("-2 int <D(f xi_i), D(a xi)> = -2 int f xi_i^T . a xi^T", "discretization",
                             "proof identity", tol);
        for (const auto& p : pairs) {
            if (p.lambda <= 1e-8 || p.lambda > lambda_cap || std::abs(p.lambda - 4.0) <= 1e-6) continue;
            for (int t = 0; t < options.random_coefficients; ++t) {
                const Eigen::VectorXd a = sampler.direction();
                for (int i = 0; i < dim; ++i) {
                    c55.add(identity_55(disc, p.field, p.lambda, a, i).cross_multiplied);
                    cn.add(identity_normal(disc, p.field, p.lambda, a, i).regular);
                    cm.add(mixed_gradient_identity(disc, p.field, a, i));
                }
            }
        }
        report.checks.push_back(c55.result());
        report.checks.push_back(cn.result());
        report.checks.push_back(cm.result());
    }

    // Certificate pipeline.
    if (n >= 3) {
        CertificateOptions co;
        co.seed = options.seed;
        const CertificateSet set = build_certificate(disc, co);
        detail::WorstCase orth("projection orthogonality residuals", "algebraic", "proof identity",
                               options.orthogonality_tolerance);
        detail::WorstCase dec("D^2E(X) = D^2E(f xi) - 2 int |a xi^N|^2 + 4 int f xi^N . a xi^N", "discretization",
                              "proof identity", tol);
        detail::WorstCase pig("pigeonhole: sum_i [D^2E(f xi_i) - c int |f xi_i^N|^2] = 0", "discretization",
                              "proof identity", tol);
        detail::WorstCase nsum("sum_i int |f xi_i^N|^2 = (n - 2) int f^2", "discretization", "proof identity", tol);
        for (const auto& r : set.members) {
            orth.add(r.orthogonality_residuals.maxCoeff(), 0.0, 1.0);
            dec.add(r.d2e_value, r.decomposition_value, r.decomposition_scale);
            if (r.pigeonhole_sum) pig.add(*r.pigeonhole_sum, 0.0, r.pigeonhole_scale);
            nsum.add(r.normal_mass_sum, (n - 2) * r.f_mass, (n - 2) * r.f_mass);
        }
        report.checks.push_back(orth.result());
        report.checks.push_back(dec.result());
        report.checks.push_back(pig.result());
        report.checks.push_back(nsum.result());

        const ThresholdChainResult chain = threshold_chain_check(n);
        CheckResult c;
        c.name = "threshold chain equivalence (exact rationals)";
        c.kind = "algebraic";
        c.provenance = "proof identity";
        c.lhs = chain.mismatches;
        c.error = chain.mismatches;
        c.samples = chain.samples;
        c.pass = chain.mismatches == 0;
        report.checks.push_back(c);
    }
    return report;
}

} // namespace minsurf
