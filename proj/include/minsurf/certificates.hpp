#pragma once

#include "minsurf/eigensolver.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/moebius.hpp"
#include "minsurf/operators.hpp"
#include "minsurf/second_variation.hpp"

#include <boost/rational.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace minsurf {

/// The variation f * xi_i.
struct CanonicalVariation
{
    ScalarField f;
    int i = 0;
    TangentField field;
};

inline CanonicalVariation canonical_variation(const Discretization& disc, const ScalarField& f, int i)
{
    if (i < 0 || i >= disc.dim()) throw ParameterError("Moebius index out of range");
    return {f, i, scale_field(f, moebius_field(disc.mesh(), i))};
}

/// Two sides of an identity together with the scale its error is measured against.
struct IdentityValues
{
    double lhs = 0.0;
    double rhs = 0.0;
    double scale = 0.0;

    double error() const { return std::abs(lhs - rhs); }
    double relative_error() const { return scale > 0.0 ? error() / scale : error(); }
};

/// Sum over i of D^2E(f xi_i) against n int |grad f|^2 - (2n - 4) int f^2.
/// The scale is |lhs| + |rhs| + area.
inline IdentityValues prop1_sum(const Discretization& disc, const ScalarField& f)
{
    if (f.size() != disc.num_vertices()) throw ContractError("field length does not match vertex count");
    const int n = disc.n();
    IdentityValues out;
    for (int i = 0; i < disc.dim(); ++i) out.lhs += energy_form_coordinate(disc, canonical_variation(disc, f, i).field);
    out.rhs = n * f.dot(disc.stiffness() * f) - (2.0 * n - 4.0) * f.dot(disc.mass() * f);
    out.scale = std::abs(out.lhs) + std::abs(out.rhs) + disc.area();
    return out;
}

/// Cauchy-Schwarz scale sqrt(int |X|^2) sqrt(int |Y|^2).
inline double l2_product_scale(const Discretization& disc, const TangentField& x, const TangentField& y)
{
    return std::sqrt(disc.pair(x.vectors, x.vectors) * disc.pair(y.vectors, y.vectors));
}

inline void require_regular_lambda(double lambda)
{
    if (std::abs(lambda - 4.0) <= 1e-6) throw ParameterError("lambda is too close to 4; the identity is singular");
}

/// Pairings of f xi_i with a_j xi_j used by the eigenfunction identities.
struct EigenPairings
{
    double full = 0.0;       // int f xi_i . a xi
    double tangential = 0.0; // int f xi_i^T . a xi^T
    double normal = 0.0;     // int f xi_i^N . a xi^N
    double scale = 0.0;      // Cauchy-Schwarz bound on all three
};

inline EigenPairings eigen_pairings(const Discretization& disc, const ScalarField& f, const Eigen::VectorXd& a, int i)
{
    const TangentField fx = canonical_variation(disc, f, i).field;
    const TangentField ax = moebius_combination(disc.mesh(), a);
    const SplitField sf = split_tangent_normal(disc, fx);
    const SplitField sa = split_tangent_normal(disc, ax);
    EigenPairings p;
    p.full = disc.pair(fx.vectors, ax.vectors);
    p.tangential = disc.pair(sf.tangential, sa.tangential);
    p.normal = disc.pair(sf.normal, sa.normal);
    p.scale = l2_product_scale(disc, fx, ax);
    return p;
}

/// For an eigenfunction f with eigenvalue lambda:
///   int f xi_i . a xi = -2 / (4 - lambda) int f xi_i^T . a xi^T.
/// `cross_multiplied` is (4 - lambda) lhs against -2 int f xi^T . a xi^T,
/// which stays well conditioned for lambda near 4.
struct Identity55
{
    IdentityValues direct;
    IdentityValues cross_multiplied;
};

inline Identity55 identity_55(
    const Discretization& disc, const ScalarField& f, double lambda, const Eigen::VectorXd& a, int i)
{
    require_regular_lambda(lambda);
    const EigenPairings p = eigen_pairings(disc, f, a, i);
    Identity55 out;
    out.direct = {p.full, -2.0 / (4.0 - lambda) * p.tangential, p.scale};
    out.cross_multiplied = {(4.0 - lambda) * p.full, -2.0 * p.tangential, p.scale};
    return out;
}

/// Normal-part identity:
///   int f xi_i^N . a xi^N = -(6 - lambda)/(4 - lambda) int f xi_i^T . a xi^T
///                         = (6 - lambda)/2 int f xi_i . a xi.
struct IdentityNormal
{
    double lhs = 0.0;
    double rhs_tangential = 0.0;
    double rhs_full = 0.0;
    double scale = 0.0;
    /// 2 lhs against (6 - lambda) int f xi . a xi (no division by 4 - lambda).
    IdentityValues regular;
};

inline IdentityNormal identity_normal(
    const Discretization& disc, const ScalarField& f, double lambda, const Eigen::VectorXd& a, int i)
{
    require_regular_lambda(lambda);
    const EigenPairings p = eigen_pairings(disc, f, a, i);
    IdentityNormal out;
    out.lhs = p.normal;
    out.rhs_tangential = -(6.0 - lambda) / (4.0 - lambda) * p.tangential;
    out.rhs_full = 0.5 * (6.0 - lambda) * p.full;
    out.scale = p.scale;
    out.regular = {2.0 * p.normal, (6.0 - lambda) * p.full, 2.0 * p.scale};
    return out;
}

/// -2 int <D(f xi_i), D(a xi)> against -2 int f xi_i^T . a xi^T, for any f.
///
/// D is the covariant derivative of S^n; the pairing is taken from the
/// coordinate stiffness minus int X^T . Y^T. The scale is the product of the
/// coordinate H^1 norms.
inline IdentityValues mixed_gradient_identity(
    const Discretization& disc, const ScalarField& f, const Eigen::VectorXd& a, int i)
{
    const TangentField fx = canonical_variation(disc, f, i).field;
    const TangentField ax = moebius_combination(disc.mesh(), a);
    const SplitField sf = split_tangent_normal(disc, fx);
    const SplitField sa = split_tangent_normal(disc, ax);
    const double tt = disc.pair(sf.tangential, sa.tangential);
    const double coordinate = fx.vectors.cwiseProduct(disc.stiffness() * ax.vectors).sum();
    const auto h1 = [&](const TangentField& x) {
        return x.vectors.cwiseProduct(disc.stiffness() * x.vectors).sum() + disc.pair(x.vectors, x.vectors);
    };
    IdentityValues out;
    out.lhs = -2.0 * (coordinate - tt);
    out.rhs = -2.0 * tt;
    out.scale = 2.0 * std::sqrt(h1(fx) * h1(ax));
    return out;
}

/// (n - 2) / (2n), the eigenvalue threshold of the certificate.
inline double threshold(int n)
{
    if (n <= 2) throw ParameterError("threshold needs n >= 3 (n = " + std::to_string(n) + ")");
    return static_cast<double>(n - 2) / (2.0 * n);
}

using Rational = boost::rational<long long>;

inline Rational threshold_rational(int n)
{
    if (n <= 2) throw ParameterError("threshold needs n >= 3 (n = " + std::to_string(n) + ")");
    return Rational(n - 2, 2LL * n);
}

/// Ratio constant (n lambda - 2n + 4) / (n - 2).
inline Rational selection_constant(int n, const Rational& lambda)
{
    if (n <= 2) throw ParameterError("selection constant needs n >= 3");
    return (Rational(n) * lambda - Rational(2 * n - 4)) / Rational(n - 2);
}

struct ThresholdChainResult
{
    int samples = 0;
    int mismatches = 0;
    int below_threshold = 0;
};

/// Exact check of (n lambda - 2n + 4)/(n - 2) < -3/2  <=>  lambda < (n - 2)/(2n)
/// over the rationals p/q with 1 <= q <= q_max and 0 <= p < q * lambda_max,
/// until `count` samples have been taken.
inline ThresholdChainResult threshold_chain_check(int n, int count = 10000, int lambda_max = 2)
{
    const Rational t = threshold_rational(n);
    ThresholdChainResult r;
    for (long long q = 1; r.samples < count; ++q) {
        for (long long p = 0; p < q * lambda_max && r.samples < count; ++p) {
            const Rational lambda(p, q);
            const bool lhs = selection_constant(n, lambda) < Rational(-3, 2);
            const bool rhs = lambda < t;
            ++r.samples;
            if (lhs != rhs) ++r.mismatches;
            if (rhs) ++r.below_threshold;
        }
    }
    return r;
}

enum class Verdict { negative, nonnegative, hypothesis_not_met };

inline std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::negative: return "negative";
    case Verdict::nonnegative: return "nonnegative";
    case Verdict::hypothesis_not_met: return "hypothesis-not-met";
    }
    return "unknown";
}

struct CandidateRow
{
    int i = 0;
    double d2e = 0.0;
    double normal_mass = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
};

struct CertificateOptions
{
    std::uint64_t seed = 0;
    /// Overrides lambda_1 for a plumbing run; the report is marked synthetic.
    std::optional<double> synthetic_lambda;
    int k = 8;
    double orthogonality_tolerance = 1e-8;
    /// Normal masses below this fraction of int f^2 make the ratio undefined.
    double normal_mass_floor = 1e-10;
};

struct CertificateReport
{
    std::string surface;
    int n = 0;
    double h = 0.0;
    bool synthetic = false;
    bool contained_in_geodesic_s2 = false;

    double lambda1 = 0.0;
    double lambda1_computed = 0.0;
    int multiplicity = 0;
    int member = 0; // position of f inside the first cluster
    double threshold = 0.0;
    bool hypothesis_met = false;
    bool proposition_applies = false; // lambda <= 1
    double f_mass = 0.0;              // int f^2 (mass matrix)

    std::vector<CandidateRow> candidates;
    bool ratio_undefined = false;
    int i0 = 0;
    double d2e_f_xi = 0.0;
    double normal_mass = 0.0;

    Eigen::VectorXd a;
    Eigen::VectorXd orthogonality_residuals;
    bool gram_singular = false;
    double d2e_value = 0.0;

    /// D^2E(f xi) - 2 int |a xi^N|^2 + 4 int f xi^N . a xi^N.
    double decomposition_value = 0.0;
    double decomposition_scale = 0.0;

    /// sum_i D^2E(f xi_i) - c sum_i int |f xi_i^N|^2, c = (n lambda - 2n + 4)/(n - 2);
    /// skipped in synthetic mode.
    std::optional<double> pigeonhole_sum;
    double pigeonhole_scale = 0.0;
    double normal_mass_sum = 0.0; // sum_i int |f xi_i^N|^2, compared with (n - 2) int f^2

    /// Young bound 4 int f xi^N . a xi^N <= int |f xi^N|^2 + 4 int |a xi^N|^2 (gamma = 2),
    /// evaluated when lambda <= 1.
    std::optional<IdentityValues> holder;

    Verdict verdict = Verdict::nonnegative;
};

namespace detail {

inline CertificateReport certificate_for(
    const Discretization& disc,
    const ScalarField& f,
    double lambda_computed,
    int multiplicity,
    int member,
    const CertificateOptions& options)
{
    const SurfaceMesh& mesh = disc.mesh();
    const int n = disc.n();
    CertificateReport r;
    r.surface = mesh.name();
    r.n = n;
    r.h = disc.h();
    r.synthetic = options.synthetic_lambda.has_value();
    r.contained_in_geodesic_s2 = mesh.contained_in_geodesic_s2();
    r.lambda1_computed = lambda_computed;
    r.lambda1 = options.synthetic_lambda.value_or(lambda_computed);
    r.multiplicity = multiplicity;
    r.member = member;
    r.threshold = threshold(n);
    r.hypothesis_met = r.lambda1 < r.threshold && !r.contained_in_geodesic_s2;
    r.proposition_applies = r.lambda1 <= 1.0;
    r.f_mass = f.dot(disc.mass() * f);

    const double c = (n * r.lambda1 - 2.0 * n + 4.0) / (n - 2.0);
    double d2e_sum = 0.0;
    double abs_sum = 0.0;
    std::vector<TangentField> variations;
    for (int i = 0; i < disc.dim(); ++i) {
        variations.push_back(canonical_variation(disc, f, i).field);
        const SplitField s = split_tangent_normal(disc, variations.back());
        CandidateRow row;
        row.i = i;
        row.d2e = energy_form_coordinate(disc, variations.back());
        row.normal_mass = disc.pair(s.normal, s.normal);
        if (row.normal_mass > options.normal_mass_floor * r.f_mass) row.ratio = row.d2e / row.normal_mass;
        d2e_sum += row.d2e;
        abs_sum += std::abs(row.d2e) + std::abs(c) * row.normal_mass;
        r.normal_mass_sum += row.normal_mass;
        r.candidates.push_back(row);
    }
    if (!r.synthetic) {
        r.pigeonhole_sum = d2e_sum - c * r.normal_mass_sum;
        r.pigeonhole_scale = abs_sum;
    }

    // Lowest ratio wins; ties go to the lower index. Without any defined
    // ratio the raw D^2E value decides.
    r.ratio_undefined = true;
    for (const auto& row : r.candidates) {
        if (!std::isnan(row.ratio)) r.ratio_undefined = false;
    }
    int best = 0;
    for (int i = 1; i < disc.dim(); ++i) {
        const auto& cand = r.candidates[i];
        const auto& inc = r.candidates[best];
        if (r.ratio_undefined) {
            if (cand.d2e < inc.d2e) best = i;
        } else if (!std::isnan(cand.ratio) && (std::isnan(inc.ratio) || cand.ratio < inc.ratio)) {
            best = i;
        }
    }
    r.i0 = best;
    r.d2e_f_xi = r.candidates[best].d2e;
    r.normal_mass = r.candidates[best].normal_mass;

    const TangentField& fx = variations[best];
    const MoebiusProjection proj = project_orthogonal_to_moebius(disc, fx);
    r.a = proj.coefficients;
    r.orthogonality_residuals = proj.orthogonality_residuals;
    r.gram_singular = proj.gram_singular;
    r.d2e_value = energy_form_coordinate(disc, proj.perp);

    const TangentField ax = moebius_combination(mesh, r.a);
    const SplitField sf = split_tangent_normal(disc, fx);
    const SplitField sa = split_tangent_normal(disc, ax);
    const double aa_normal = disc.pair(sa.normal, sa.normal);
    const double fa_normal = disc.pair(sf.normal, sa.normal);
    r.decomposition_value = r.d2e_f_xi - 2.0 * aa_normal + 4.0 * fa_normal;
    r.decomposition_scale = std::abs(r.d2e_f_xi) + 2.0 * aa_normal + 4.0 * std::abs(fa_normal);

    if (r.proposition_applies) {
        r.holder = IdentityValues{4.0 * fa_normal, r.normal_mass + 4.0 * aa_normal, 0.0};
    }

    const bool orthogonal = r.orthogonality_residuals.maxCoeff() <= options.orthogonality_tolerance;
    if (r.contained_in_geodesic_s2) {
        r.verdict = Verdict::hypothesis_not_met;
    } else {
        r.verdict = (r.d2e_value < 0.0 && orthogonal) ? Verdict::negative : Verdict::nonnegative;
    }
    return r;
}

} // namespace detail

/// Certificates for every member of the first nonzero eigenvalue cluster;
/// the first entry uses the lowest-index member.
struct CertificateSet
{
    std::vector<CertificateReport> members;
    const CertificateReport& primary() const { return members.front(); }
};

inline CertificateSet build_certificate(const Discretization& disc, const CertificateOptions& options = {})
{
    threshold(disc.n());
    EigenSolverOptions eo;
    eo.seed = options.seed;
    const int max_k = static_cast<int>(disc.num_vertices()) - 1;
    int k = std::min(std::max(options.k, 2), max_k);
    std::vector<EigenPair> pairs;
    std::vector<std::pair<int, int>> clusters;
    for (;;) {
        pairs = solve_smallest_eigenpairs(disc.stiffness(), disc.mass(), k, eo);
        clusters = eigen_clusters(pairs, eo.cluster_tolerance);
        // A third cluster proves the first nonzero one is complete.
        if (clusters.size() >= 3 || k == max_k) break;
        k = std::min(2 * k, max_k);
    }
    if (clusters.size() < 2) throw SolverError("no nonzero eigenvalue found", 0.0);
    const auto [lo, hi] = clusters[1];
    CertificateSet set;
    for (int j = lo; j < hi; ++j) {
        set.members.push_back(
            detail::certificate_for(disc, pairs[j].field, pairs[j].lambda, hi - lo, j - lo, options));
    }
    return set;
}

/// Matrix B_ij = D^2E(xi_i, xi_j). Negative definiteness witnesses ind_E >= n + 1.
struct ElSoufiCheck
{
    Eigen::MatrixXd matrix;
    Eigen::VectorXd eigenvalues;
    int count_negative = 0;
    bool applicable = false; // surface not in a geodesic S^2
    bool pass = false;
};

inline ElSoufiCheck el_soufi_lower_bound_check(const Discretization& disc)
{
    const int dim = disc.dim();
    std::vector<TangentField> xi;
    for (int i = 0; i < dim; ++i) xi.push_back(moebius_field(disc.mesh(), i));
    ElSoufiCheck out;
    out.matrix.resize(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            out.matrix(i, j) = out.matrix(j, i) = energy_form_coordinate(disc, xi[i], xi[j]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix);
    out.eigenvalues = es.eigenvalues();
    const double scale = out.eigenvalues.cwiseAbs().maxCoeff();
    for (int i = 0; i < dim; ++i) {
        if (out.eigenvalues[i] < -1e-9 * scale) ++out.count_negative;
    }
    out.applicable = !disc.mesh().contained_in_geodesic_s2();
    out.pass = out.applicable && out.count_negative == dim;
    return out;
}

} // namespace minsurf
