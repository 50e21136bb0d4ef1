#include "minsurf/catalog.hpp"
#include "minsurf/certificates.hpp"
#include "minsurf/sampling.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace minsurf;

namespace {

constexpr double pi = std::numbers::pi;

const Discretization& clifford32()
{
    static const Discretization d(build_clifford_torus(32));
    return d;
}

const std::vector<EigenPair>& clifford32_pairs()
{
    static const auto pairs = solve_smallest_eigenpairs(clifford32().stiffness(), clifford32().mass(), 10);
    return pairs;
}

} // namespace

TEST(CanonicalVariation, IsPointwiseProduct)
{
    const Discretization& d = clifford32();
    const ScalarField f = d.coordinate(1);
    const CanonicalVariation v = canonical_variation(d, f, 2);
    const TangentField xi = moebius_field(d.mesh(), 2);
    for (Index k = 0; k < d.num_vertices(); k += 37) {
        EXPECT_EQ(v.field.vectors.row(k), f[k] * xi.vectors.row(k));
    }
    EXPECT_THROW(canonical_variation(d, f, 4), ParameterError);
}

TEST(Prop1, ConstantFunction)
{
    const Discretization d(build_clifford_torus(64));
    const IdentityValues r = prop1_sum(d, Eigen::VectorXd::Ones(d.num_vertices()));
    EXPECT_NEAR(r.rhs, -2.0 * d.area(), 1e-9 * d.area());
    EXPECT_NEAR(r.rhs, -4.0 * pi * pi, 0.02 * 4.0 * pi * pi);
    EXPECT_LE(r.relative_error(), 0.02);
}

TEST(Prop1, FirstEigenfunction)
{
    const IdentityValues r = prop1_sum(clifford32(), clifford32_pairs()[1].field);
    EXPECT_NEAR(r.rhs, 4.0, 0.08);
    EXPECT_NEAR(r.lhs, 4.0, 0.08);
}

TEST(Prop1, RandomBandLimited)
{
    BandLimitedSampler s(4, 1);
    for (int t = 0; t < 10; ++t) EXPECT_LE(prop1_sum(clifford32(), s.scalar(clifford32().mesh())).relative_error(), 0.02);
}

TEST(Identity55, ZeroCoefficientsAndSingularLambda)
{
    const Discretization& d = clifford32();
    const ScalarField& f = clifford32_pairs()[1].field;
    const Identity55 z = identity_55(d, f, 2.0, Eigen::Vector4d::Zero(), 0);
    EXPECT_EQ(z.direct.lhs, 0.0);
    EXPECT_EQ(z.direct.rhs, 0.0);
    EXPECT_THROW(identity_55(d, f, 4.0 + 1e-7, Eigen::Vector4d::Ones(), 0), ParameterError);
    EXPECT_THROW(identity_normal(d, f, 4.0, Eigen::Vector4d::Ones(), 0), ParameterError);
}

TEST(Identity55, EigenfunctionsWithRandomCoefficients)
{
    const Discretization& d = clifford32();
    BandLimitedSampler s(4, 3);
    for (const auto& p : clifford32_pairs()) {
        if (p.lambda < 1e-8 || p.lambda > 4.3) continue;
        for (int t = 0; t < 5; ++t) {
            const Eigen::VectorXd a = s.direction();
            for (int i = 0; i < 4; ++i) {
                const Identity55 r = identity_55(d, p.field, p.lambda, a, i);
                EXPECT_LE(r.cross_multiplied.relative_error(), 0.02);
                const IdentityNormal nrm = identity_normal(d, p.field, p.lambda, a, i);
                EXPECT_LE(nrm.regular.relative_error(), 0.02);
                EXPECT_EQ(nrm.regular.lhs, 2.0 * nrm.lhs);
            }
        }
    }
}

TEST(Identity55, EquatorFirstEigenfunction)
{
    const Discretization d(build_equatorial_sphere(3, 3));
    const auto pairs = solve_smallest_eigenpairs(d.stiffness(), d.mass(), 4);
    BandLimitedSampler s(4, 8);
    for (int t = 0; t < 5; ++t) {
        const Identity55 r = identity_55(d, pairs[1].field, pairs[1].lambda, s.direction(), 3);
        EXPECT_LE(r.direct.relative_error(), 0.02);
    }
}

TEST(MixedGradient, ZeroCoefficientsConstantAndEigenfunction)
{
    const Discretization& d = clifford32();
    const IdentityValues z = mixed_gradient_identity(d, clifford32_pairs()[1].field, Eigen::Vector4d::Zero(), 0);
    EXPECT_EQ(z.lhs, 0.0);
    EXPECT_EQ(z.rhs, 0.0);
    const IdentityValues e = mixed_gradient_identity(d, clifford32_pairs()[1].field, Eigen::Vector4d::Unit(1), 0);
    EXPECT_LE(e.relative_error(), 0.02);
    const IdentityValues c = mixed_gradient_identity(d, Eigen::VectorXd::Ones(d.num_vertices()), Eigen::Vector4d::Unit(1), 0);
    EXPECT_LE(c.relative_error(), 0.02);
    const IdentityValues cc = mixed_gradient_identity(d, Eigen::VectorXd::Ones(d.num_vertices()), Eigen::Vector4d::Unit(0), 0);
    EXPECT_LE(cc.relative_error(), 0.02);
    EXPECT_GT(std::abs(cc.rhs), 1.0);
}

TEST(MixedGradient, HoldsForGeneralFunctions)
{
    const Discretization& d = clifford32();
    BandLimitedSampler s(4, 4);
    for (int t = 0; t < 5; ++t) {
        const IdentityValues r = mixed_gradient_identity(d, s.scalar(d.mesh()), s.direction(), t % 4);
        EXPECT_LE(r.relative_error(), 0.02);
    }
}

TEST(Threshold, ValuesAndErrors)
{
    EXPECT_EQ(threshold_rational(3), Rational(1, 6));
    EXPECT_EQ(threshold_rational(4), Rational(1, 4));
    EXPECT_EQ(threshold(3), 1.0 / 6.0);
    EXPECT_EQ(threshold(4), 0.25);
    EXPECT_THROW(threshold(2), ParameterError);
    EXPECT_THROW(threshold_rational(1), ParameterError);
}

TEST(Threshold, ChainIsExact)
{
    for (int n = 3; n <= 8; ++n) {
        const ThresholdChainResult r = threshold_chain_check(n, 10000);
        EXPECT_EQ(r.samples, 10000);
        EXPECT_EQ(r.mismatches, 0) << n;
        EXPECT_GT(r.below_threshold, 0);
    }
}

TEST(Certificate, CliffordHypothesisNotMet)
{
    const CertificateSet set = build_certificate(clifford32());
    ASSERT_EQ(set.members.size(), 4u);
    for (const auto& r : set.members) {
        EXPECT_FALSE(r.hypothesis_met);
        EXPECT_FALSE(r.synthetic);
        EXPECT_EQ(r.multiplicity, 4);
        EXPECT_DOUBLE_EQ(r.threshold, 1.0 / 6.0);
        EXPECT_LE(r.orthogonality_residuals.maxCoeff(), 1e-8);
        EXPECT_NEAR(r.d2e_value, r.decomposition_value, 0.02 * r.decomposition_scale);
        ASSERT_TRUE(r.pigeonhole_sum);
        EXPECT_LE(std::abs(*r.pigeonhole_sum), 0.02 * r.pigeonhole_scale);
        EXPECT_NEAR(r.normal_mass_sum, r.f_mass, 0.02 * r.f_mass);
        EXPECT_FALSE(r.proposition_applies);
        EXPECT_FALSE(r.holder);
        EXPECT_EQ(r.verdict, r.d2e_value < 0.0 ? Verdict::negative : Verdict::nonnegative);
    }
}

TEST(Certificate, SelectsMinimalRatio)
{
    const CertificateReport r = build_certificate(clifford32()).primary();
    for (const auto& c : r.candidates) {
        if (!std::isnan(c.ratio)) {
            EXPECT_GE(c.ratio, r.candidates[r.i0].ratio);
        }
    }
    EXPECT_EQ(r.d2e_f_xi, r.candidates[r.i0].d2e);
}

TEST(Certificate, SyntheticLambdaPlumbing)
{
    CertificateOptions o;
    o.synthetic_lambda = 0.1;
    const CertificateReport r = build_certificate(clifford32(), o).primary();
    EXPECT_TRUE(r.synthetic);
    EXPECT_EQ(r.lambda1, 0.1);
    EXPECT_NEAR(r.lambda1_computed, 2.0, 0.02);
    EXPECT_TRUE(r.hypothesis_met);
    EXPECT_TRUE(r.proposition_applies);
    EXPECT_FALSE(r.pigeonhole_sum);
    ASSERT_TRUE(r.holder);
    EXPECT_LE(r.holder->lhs, r.holder->rhs);
    EXPECT_EQ(r.a.size(), 4);
    EXPECT_LE(r.orthogonality_residuals.maxCoeff(), 1e-8);
}

TEST(Certificate, EquatorIsExcluded)
{
    const CertificateReport r = build_certificate(Discretization(build_equatorial_sphere(3, 3))).primary();
    EXPECT_TRUE(r.contained_in_geodesic_s2);
    EXPECT_EQ(r.verdict, Verdict::hypothesis_not_met);
    EXPECT_EQ(r.multiplicity, 3);
}

TEST(Certificate, RejectsTwoSphere)
{
    EXPECT_THROW(build_certificate(Discretization(build_equatorial_sphere(2, 2))), ParameterError);
}

TEST(ElSoufi, CliffordNegativeDefinite)
{
    const ElSoufiCheck c = el_soufi_lower_bound_check(clifford32());
    EXPECT_TRUE(c.applicable);
    EXPECT_TRUE(c.pass);
    EXPECT_EQ(c.count_negative, 4);
    EXPECT_LT(c.eigenvalues.maxCoeff(), 0.0);
}

TEST(ElSoufi, EquatorNotClaimed)
{
    const ElSoufiCheck c = el_soufi_lower_bound_check(Discretization(build_equatorial_sphere(3, 3)));
    EXPECT_FALSE(c.applicable);
    EXPECT_FALSE(c.pass);
    EXPECT_EQ(c.count_negative, 1);
}

TEST(ElSoufi, ProductTorusInS4)
{
    const ElSoufiCheck c = el_soufi_lower_bound_check(Discretization(build_product_torus(2, 4, 16)));
    EXPECT_TRUE(c.applicable);
    EXPECT_EQ(c.matrix.rows(), 5);
    EXPECT_EQ(c.count_negative, 5);
    EXPECT_TRUE(c.pass);
}
