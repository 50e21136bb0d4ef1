#pragma once

#include "minsurf/catalog.hpp"
#include "minsurf/certificates.hpp"
#include "minsurf/eigensolver.hpp"
#include "minsurf/second_variation.hpp"
#include "minsurf/verify.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

namespace minsurf {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json to_array(const Eigen::VectorXd& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline std::string fmt17(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// "index,lambda,residual" with 17 significant digits.
inline void write_spectrum_csv(std::ostream& out, const std::vector<EigenPair>& pairs)
{
    out << "index,lambda,residual\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out << i << ',' << detail::fmt17(pairs[i].lambda) << ',' << detail::fmt17(pairs[i].residual) << '\n';
    }
}

inline Json to_json(const CatalogEntry& e)
{
    Json j;
    j["name"] = e.name;
    j["description"] = e.description;
    j["res"] = e.resolution_meaning;
    j["min_n"] = e.min_n;
    Json known = Json::object();
    if (e.known.area) known["area"] = *e.known.area;
    if (e.known.lambda1) known["lambda1"] = *e.known.lambda1;
    if (e.known.lambda1_multiplicity) known["lambda1_multiplicity"] = *e.known.lambda1_multiplicity;
    if (e.known.a_squared) known["a_squared"] = *e.known.a_squared;
    if (e.known.area_index) known["area_index"] = *e.known.area_index;
    if (e.known.energy_index) known["energy_index"] = *e.known.energy_index;
    known["contained_in_geodesic_s2"] = e.known.contained_in_geodesic_s2;
    known["minimal"] = e.known.minimal;
    j["known"] = known;
    Json prov = Json::object();
    for (const auto& [key, value] : e.known.provenance) prov[key] = value;
    j["provenance"] = prov;
    return j;
}

inline Json to_json(const CheckResult& c)
{
    return Json{{"name", c.name},          {"kind", c.kind},   {"provenance", c.provenance},
                {"lhs", c.lhs},            {"rhs", c.rhs},     {"error", c.error},
                {"scale", c.scale},        {"tolerance", c.tolerance},
                {"samples", c.samples},    {"pass", c.pass}};
}

inline Json to_json(const VerifyReport& r, int res)
{
    Json j;
    j["surface"] = r.surface;
    j["n"] = r.n;
    j["res"] = res;
    j["h"] = r.h;
    j["minimality"] = Json{{"max_residual", r.minimality.max_residual},
                           {"weighted_rms_residual", r.minimality.weighted_rms_residual},
                           {"max_gradient_defect", r.minimality.max_gradient_defect},
                           {"tolerance", r.minimality.tolerance},
                           {"minimal", r.minimality.minimal}};
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    j["checks"] = checks;
    j["all_pass"] = r.all_pass();
    return j;
}

inline Json to_json(const IndexReport& r, const std::string& surface, int res, double h)
{
    Json j;
    j["surface"] = surface;
    j["res"] = res;
    j["h"] = h;
    j["kind"] = to_string(r.kind);
    j["count_negative"] = r.count_negative;
    j["eigenvalues"] = r.eigenvalues;
    j["negative"] = r.negative;
    j["near_zero"] = r.near_zero;
    j["delta"] = r.delta;
    j["tolerances"] = Json{{"eigensolver_residual", EigenSolverOptions{}.tol}, {"delta", r.delta}};
    return j;
}

inline Json to_json(const ElSoufiCheck& c)
{
    Json m = Json::array();
    for (Eigen::Index i = 0; i < c.matrix.rows(); ++i) m.push_back(detail::to_array(c.matrix.row(i).transpose()));
    return Json{{"matrix", m},
                {"eigenvalues", detail::to_array(c.eigenvalues)},
                {"count_negative", c.count_negative},
                {"applicable", c.applicable},
                {"pass", c.pass}};
}

inline Json to_json(const CertificateReport& r, int res)
{
    Json j;
    j["surface"] = r.surface;
    j["n"] = r.n;
    j["res"] = res;
    j["h"] = r.h;
    j["synthetic"] = r.synthetic;
    j["lambda1"] = r.lambda1;
    j["lambda1_computed"] = r.lambda1_computed;
    j["multiplicity"] = r.multiplicity;
    j["cluster_member"] = r.member;
    j["threshold"] = r.threshold;
    j["hypothesis_met"] = r.hypothesis_met;
    j["contained_in_geodesic_s2"] = r.contained_in_geodesic_s2;
    j["proposition_applies"] = r.proposition_applies;
    j["normalization"] = Json{{"int_f2", r.f_mass}, {"note", "D2E values scale with the square of f"}};
    Json cands = Json::array();
    for (const auto& c : r.candidates) {
        Json row{{"i", c.i}, {"d2e", c.d2e}, {"normal_mass", c.normal_mass}};
        row["ratio"] = std::isnan(c.ratio) ? Json(nullptr) : Json(c.ratio);
        cands.push_back(row);
    }
    j["candidates"] = cands;
    j["ratio_undefined"] = r.ratio_undefined;
    j["i0"] = r.i0;
    j["d2e_f_xi"] = r.d2e_f_xi;
    j["normal_mass"] = r.normal_mass;
    j["a"] = detail::to_array(r.a);
    j["gram_singular"] = r.gram_singular;
    j["orthogonality_residuals"] = detail::to_array(r.orthogonality_residuals);
    j["d2e_value"] = r.d2e_value;
    j["decomposition"] = Json{{"value", r.decomposition_value}, {"scale", r.decomposition_scale}};
    if (r.pigeonhole_sum) {
        j["pigeonhole"] = Json{{"sum", *r.pigeonhole_sum}, {"scale", r.pigeonhole_scale}};
    } else {
        j["pigeonhole"] = Json{{"skipped", "synthetic eigenvalue"}};
    }
    j["normal_mass_sum"] = r.normal_mass_sum;
    if (r.holder) {
        j["holder_gamma_2"] = Json{{"lhs", r.holder->lhs}, {"rhs", r.holder->rhs}, {"pass", r.holder->lhs <= r.holder->rhs}};
    }
    j["verdict"] = to_string(r.verdict);
    j["tolerances"] = Json{{"orthogonality", 1e-8}};
    return j;
}

inline void print_table(std::ostream& out, const VerifyReport& r)
{
    out << "surface " << r.surface << "  n=" << r.n << "  h=" << r.h << '\n';
    for (const auto& c : r.checks) {
        const double rel = c.scale > 0.0 ? c.error / c.scale : c.error;
        out << (c.pass ? "  PASS  " : "  FAIL  ") << std::left << std::setw(80) << c.name << std::right
            << std::setw(12) << std::setprecision(3) << rel << " <= " << c.tolerance << '\n';
    }
}

} // namespace minsurf
