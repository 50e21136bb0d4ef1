// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Tolerances are pinned here and not read from the library defaults.

#include "minsurf/minsurf.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace minsurf;

namespace {

constexpr double kRelTol = 0.02;
constexpr double kAlgebraicTol = 1e-12;
constexpr double kOrthTol = 1e-8;
constexpr double kSpectrumTol = 0.01;
constexpr double kIndexDelta = 0.1;
constexpr double kLambdaCap = 6.0 * 1.05;
constexpr double kConvergenceRatioMax = 0.75;
constexpr double kJitterResidualMin = 0.5;
constexpr int kRandomFields = 50;
constexpr int kRandomDirections = 20;
constexpr int kRandomCoefficients = 20;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome
{
    bool pass = true;
    std::vector<std::string> details;

    void expect(bool ok, const std::string& what)
    {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
    }
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Surfaces
{
    SurfaceMesh clifford64 = build_clifford_torus(64);
    SurfaceMesh clifford128 = build_clifford_torus(128);
    // Sphere resolution is a subdivision level: level 4 stands in for res=64, level 5 for res=128.
    SurfaceMesh sphere4 = build_equatorial_sphere(3, 4);
    SurfaceMesh sphere5 = build_equatorial_sphere(3, 5);
    Discretization dc64{clifford64};
    Discretization dc128{clifford128};
    Discretization ds4{sphere4};
    Discretization ds5{sphere5};
};

std::vector<EigenPair> spectrum(const Discretization& d, int k)
{
    EigenSolverOptions eo;
    eo.seed = kSeed;
    return solve_smallest_eigenpairs(d.stiffness(), d.mass(), k, eo);
}

Outcome spectrum_fidelity(const Surfaces& s)
{
    Outcome o;
    struct Case
    {
        const char* name;
        const Discretization* d;
        int multiplicity;
    };
    for (const Case c : {Case{"clifford res=64", &s.dc64, 4}, Case{"equator level=4", &s.ds4, 3}}) {
        const auto pairs = spectrum(*c.d, 10);
        const auto clusters = eigen_clusters(pairs);
        const bool have = clusters.size() >= 2;
        const double l1 = have ? pairs[clusters[1].first].lambda : 0.0;
        const int mult = have ? clusters[1].second - clusters[1].first : 0;
        o.expect(have && std::abs(l1 - 2.0) <= kSpectrumTol * 2.0,
                 fmt("%s: lambda1 = %.6f (|rel err| %.2e <= %.2g)", c.name, l1, std::abs(l1 - 2.0) / 2.0, kSpectrumTol));
        o.expect(mult == c.multiplicity, fmt("%s: cluster size %d (expected %d)", c.name, mult, c.multiplicity));
    }
    return o;
}

struct IndexCounts
{
    int area_equator_64 = -1;
    int area_equator_128 = -1;
    int area_clifford_64 = -1;
    int area_clifford_128 = -1;
    int energy_clifford_64 = -1;
    int energy_clifford_128 = -1;
};

Outcome index_counts(const Surfaces& s, IndexCounts& out)
{
    Outcome o;
    auto area = [](const Discretization& d) {
        return negative_index_count(assemble_area_jacobi(d), kIndexDelta, kSeed).count_negative;
    };
    auto energy = [](const Discretization& d) {
        return negative_index_count(assemble_energy_form(d), kIndexDelta, kSeed).count_negative;
    };
    out.area_equator_64 = area(s.ds4);
    out.area_equator_128 = area(s.ds5);
    out.area_clifford_64 = area(s.dc64);
    out.area_clifford_128 = area(s.dc128);
    out.energy_clifford_64 = energy(s.dc64);
    out.energy_clifford_128 = energy(s.dc128);
    o.expect(out.area_equator_64 == 1 && out.area_equator_128 == 1,
             fmt("equator ind_A: level 4 -> %d, level 5 -> %d (expected 1)", out.area_equator_64, out.area_equator_128));
    o.expect(out.area_clifford_64 == 5 && out.area_clifford_128 == 5,
             fmt("clifford ind_A: res 64 -> %d, res 128 -> %d (expected 5)", out.area_clifford_64,
                 out.area_clifford_128));
    o.expect(out.energy_clifford_64 == 4 && out.energy_clifford_128 == 4,
             fmt("clifford ind_E: res 64 -> %d, res 128 -> %d (expected 4)", out.energy_clifford_64,
                 out.energy_clifford_128));
    return o;
}

Outcome moebius_identities(const Surfaces& s)
{
    Outcome o;
    for (const Discretization* d : {&s.dc64, &s.ds4}) {
        const std::string name = d->mesh().name();
        const auto pw = pointwise_identity_report(*d);
        o.expect(pw.max_norm_error() <= kAlgebraicTol,
                 fmt("%s: max | |xi_i|^2 - (1 - x_i^2) | = %.2e <= %.0e", name.c_str(), pw.max_norm_error(),
                     kAlgebraicTol));
        const double nm2 = d->n() - 2.0;
        o.expect(pw.normal_sum_error <= kRelTol * nm2,
                 fmt("%s: max | sum |xi_i^N|^2 - (n-2) | = %.2e <= %.2g", name.c_str(), pw.normal_sum_error,
                     kRelTol * nm2));

        BandLimitedSampler sampler(d->dim(), kSeed);
        std::vector<Eigen::VectorXd> dirs;
        for (int i = 0; i < d->dim(); ++i) dirs.push_back(Eigen::VectorXd::Unit(d->dim(), i));
        for (int t = 0; t < kRandomDirections; ++t) dirs.push_back(sampler.unit_direction());
        double worst = 0.0;
        int tangent_only = 0;
        for (const auto& v : dirs) {
            const TangentField xi = moebius_field(d->mesh(), v);
            const SplitField sp = split_tangent_normal(*d, xi);
            const double normal = d->pair(sp.normal, sp.normal);
            // A field tangent to the surface has zero normal mass; it is then
            // measured against h^2 |xi|^2, the size of the discretization error.
            if (normal <= d->h() * d->h() * d->pair(xi.vectors, xi.vectors)) ++tangent_only;
            const double scale = std::max(normal, d->h() * d->h() * d->pair(xi.vectors, xi.vectors));
            worst = std::max(worst, std::abs(energy_form_coordinate(*d, xi) + 2.0 * normal) / scale);
        }
        o.expect(worst <= kRelTol,
                 fmt("%s: max |D2E(xi_v) + 2 int|xi_v^N|^2| / int|xi_v^N|^2 = %.2e over %zu directions "
                     "(%d tangent to the surface)",
                     name.c_str(), worst, dirs.size(), tangent_only));
    }
    return o;
}

double worst_form_gap(const Discretization& d)
{
    BandLimitedSampler sampler(d.dim(), kSeed);
    double worst = 0.0;
    for (int t = 0; t < kRandomFields; ++t) {
        const TangentField x = sampler.field(d.mesh());
        const double h1 = x.vectors.cwiseProduct(d.stiffness() * x.vectors).sum() + d.pair(x.vectors, x.vectors);
        worst = std::max(worst, std::abs(energy_form_coordinate(d, x) - energy_form_covariant(d, x)) / h1);
    }
    return worst;
}

Outcome form_equivalence(const Surfaces& s)
{
    Outcome o;
    const double e64 = worst_form_gap(s.dc64);
    const double e128 = worst_form_gap(s.dc128);
    o.expect(e64 <= kRelTol, fmt("clifford res 64: worst |coord - cov| / |X|_H1^2 = %.3e <= %.2g", e64, kRelTol));
    o.expect(e128 <= e64 * kConvergenceRatioMax,
             fmt("clifford res 128: %.3e, ratio %.3f <= %.2f", e128, e128 / e64, kConvergenceRatioMax));
    return o;
}

Outcome prop1(const Surfaces& s)
{
    Outcome o;
    for (const Discretization* d : {&s.dc64, &s.ds4}) {
        BandLimitedSampler sampler(d->dim(), kSeed);
        double worst = 0.0;
        for (int t = 0; t < kRandomFields; ++t) worst = std::max(worst, prop1_sum(*d, sampler.scalar(d->mesh())).relative_error());
        int eig = 0;
        for (const auto& p : spectrum(*d, 24)) {
            if (p.lambda > kLambdaCap) continue;
            worst = std::max(worst, prop1_sum(*d, p.field).relative_error());
            ++eig;
        }
        o.expect(worst <= kRelTol, fmt("%s: worst relative error %.3e over %d random f and %d eigenfunctions",
                                       d->mesh().name().c_str(), worst, kRandomFields, eig));
    }
    return o;
}

Outcome proof_identities(const Surfaces& s)
{
    Outcome o;
    const Discretization& d = s.dc64;
    const auto pairs = spectrum(d, 16);
    BandLimitedSampler sampler(d.dim(), kSeed);
    for (const double target : {2.0, 4.0}) {
        double w55 = 0.0;
        double wn = 0.0;
        double wm = 0.0;
        int used = 0;
        for (const auto& p : pairs) {
            if (std::abs(p.lambda - target) > kRelTol * target) continue;
            ++used;
            for (int t = 0; t < kRandomCoefficients; ++t) {
                const Eigen::VectorXd a = sampler.direction();
                for (int i = 0; i < d.dim(); ++i) {
                    w55 = std::max(w55, identity_55(d, p.field, p.lambda, a, i).cross_multiplied.relative_error());
                    wn = std::max(wn, identity_normal(d, p.field, p.lambda, a, i).regular.relative_error());
                    wm = std::max(wm, mixed_gradient_identity(d, p.field, a, i).relative_error());
                }
            }
        }
        o.expect(used >= 4, fmt("lambda ~ %.0f: %d eigenpairs selected", target, used));
        o.expect(w55 <= kRelTol, fmt("lambda ~ %.0f: (4-lambda)-identity worst %.3e", target, w55));
        o.expect(wn <= kRelTol, fmt("lambda ~ %.0f: normal-part identity worst %.3e", target, wn));
        o.expect(wm <= kRelTol, fmt("lambda ~ %.0f: mixed-gradient identity worst %.3e", target, wm));
    }
    return o;
}

Outcome certificate_plumbing(const Surfaces& s)
{
    Outcome o;
    CertificateOptions co;
    co.seed = kSeed;
    const CertificateSet set = build_certificate(s.dc64, co);
    double orth = 0.0;
    double dec = 0.0;
    double pig = 0.0;
    bool pig_present = true;
    for (const auto& r : set.members) {
        orth = std::max(orth, r.orthogonality_residuals.maxCoeff());
        dec = std::max(dec, std::abs(r.d2e_value - r.decomposition_value) / r.decomposition_scale);
        if (r.pigeonhole_sum) {
            pig = std::max(pig, std::abs(*r.pigeonhole_sum) / r.pigeonhole_scale);
        } else {
            pig_present = false;
        }
    }
    o.expect(!set.members.empty(), fmt("certificates built for %zu cluster members", set.members.size()));
    o.expect(orth <= kOrthTol, fmt("orthogonality residual %.2e <= %.0e", orth, kOrthTol));
    o.expect(dec <= kRelTol, fmt("three-term decomposition relative error %.2e", dec));
    o.expect(pig_present && pig <= kRelTol, fmt("pigeonhole sum relative error %.2e", pig));
    const ThresholdChainResult chain = threshold_chain_check(3, 10000);
    o.expect(chain.samples == 10000 && chain.mismatches == 0,
             fmt("threshold chain: %d samples, %d mismatches (%d below threshold)", chain.samples, chain.mismatches,
                 chain.below_threshold));
    o.expect(threshold_rational(3) == Rational(1, 6) && threshold(3) == 1.0 / 6.0, "threshold(3) == 1/6 exactly");
    return o;
}

Outcome bracket(const IndexCounts& c)
{
    Outcome o;
    const int r1 = ejiri_micallef_r(1, 0).value;
    const int e = c.energy_clifford_64;
    const int a = c.area_clifford_64;
    o.expect(e == 4 && a == 5 && r1 == 2 && e <= a && a <= e + r1,
             fmt("clifford: ind_E %d <= ind_A %d <= ind_E + r(1,0) = %d", e, a, e + r1));
    o.expect(ejiri_micallef_r(0, 0).value == 0, fmt("r(0,0) = %d", ejiri_micallef_r(0, 0).value));
    o.expect(ejiri_micallef_r(3, 0).value == 12, fmt("r(3,0) = %d", ejiri_micallef_r(3, 0).value));
    return o;
}

Outcome negative_control()
{
    Outcome o;
    for (int level : {3, 4}) {
        const MinimalityReport m = minimality_residual(build_jittered_sphere(3, level, 0.2, kSeed));
        o.expect(!m.minimal && m.max_residual > kJitterResidualMin,
                 fmt("jittered sphere level %d: residual %.3f > %.1f", level, m.max_residual, kJitterResidualMin));
    }
    const std::string cmd = std::string(MINSURF_CLI_PATH) + " verify --surface jittered-sphere --res 4 --out /dev/null >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.expect(code == 1, fmt("minsurf_cli verify exit code %d (expected 1)", code));
    return o;
}

} // namespace

int main()
{
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const Surfaces surfaces;
    IndexCounts counts;

    struct Criterion
    {
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"spectrum fidelity", [&] { return spectrum_fidelity(surfaces); }},
        {"index counts", [&] { return index_counts(surfaces, counts); }},
        {"Moebius identities", [&] { return moebius_identities(surfaces); }},
        {"form equivalence", [&] { return form_equivalence(surfaces); }},
        {"canonical-variation sum", [&] { return prop1(surfaces); }},
        {"eigenfunction identity suite", [&] { return proof_identities(surfaces); }},
        {"certificate plumbing", [&] { return certificate_plumbing(surfaces); }},
        {"index bracket", [&] { return bracket(counts); }},
        {"negative control", [] { return negative_control(); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = clock::now();
        const Outcome o = criteria[i].run();
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        std::printf("[%s] AC%zu %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].title, secs);
        for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
                std::chrono::duration<double>(clock::now() - start).count());
    return failed == 0 ? 0 : 1;
}
