#include "minsurf/minsurf.hpp"
#include "minsurf/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

enum ExitCode { ok = 0, verification_failed = 1, usage = 2, numerical = 3 };

struct Flags
{
    std::optional<std::string> config;
    std::optional<std::string> surface;
    std::optional<int> n;
    std::optional<int> res;
    std::optional<int> k;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> synthetic_lambda;
    std::optional<double> tolerance;
    std::optional<std::string> mass_mode;
};

void add_common_flags(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--config", f.config, "key=value config file (flags take precedence)");
    cmd->add_option("--surface", f.surface, "catalog surface name or nOFF mesh path");
    cmd->add_option("--n", f.n, "ambient sphere dimension");
    cmd->add_option("--res", f.res, "resolution (see `catalog`)");
    cmd->add_option("--k", f.k, "number of eigenpairs");
    cmd->add_option("--delta", f.delta, "separation threshold for index counts");
    cmd->add_option("--seed", f.seed, "seed for starting blocks and random samples");
    cmd->add_option("--out", f.out, "output path");
    cmd->add_option("--synthetic-lambda", f.synthetic_lambda, "override lambda_1 (plumbing run)");
    cmd->add_option("--tolerance", f.tolerance, "relative tolerance of discretization-limited checks");
    cmd->add_option("--mass-mode", f.mass_mode, "mass matrix for spectra: consistent or lumped");
}

minsurf::RunConfig resolve(const Flags& f)
{
    minsurf::RunConfig c;
    if (f.config) minsurf::apply_config_file(c, *f.config);
    if (f.surface) c.surface = *f.surface;
    if (f.n) c.n = *f.n;
    if (f.res) c.res = *f.res;
    if (f.k) c.k = *f.k;
    if (f.delta) c.delta = *f.delta;
    if (f.seed) c.seed = *f.seed;
    if (f.out) c.out = *f.out;
    if (f.synthetic_lambda) c.synthetic_lambda = *f.synthetic_lambda;
    if (f.tolerance) c.tolerance = *f.tolerance;
    if (f.mass_mode) minsurf::apply_setting(c, "mass_mode", *f.mass_mode);
    return c;
}

minsurf::SurfaceMesh load_surface(const minsurf::RunConfig& c)
{
    if (std::filesystem::exists(c.surface)) return minsurf::read_noff(c.surface);
    return minsurf::build_catalog_surface(c.surface, c.n, c.res, c.seed);
}

void emit(const minsurf::RunConfig& c, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(c.out);
    if (!out) throw minsurf::ConfigError("cannot write '" + c.out + "'");
    out << text << '\n';
}

int cmd_catalog(const minsurf::RunConfig& c)
{
    minsurf::Json list = minsurf::Json::array();
    for (const auto& e : minsurf::catalog()) {
        list.push_back(minsurf::to_json(e));
        std::cerr << e.name << ": " << e.description << '\n';
        if (e.known.lambda1) {
            std::cerr << "    lambda1 = " << *e.known.lambda1 << " [" << e.known.provenance.at("lambda1") << "]\n";
        }
        if (e.known.area_index) {
            std::cerr << "    ind_A = " << *e.known.area_index << " [" << e.known.provenance.at("area_index") << "]\n";
        }
        if (e.known.energy_index) {
            std::cerr << "    ind_E = " << *e.known.energy_index << " [" << e.known.provenance.at("energy_index")
                      << "]\n";
        }
    }
    emit(c, list.dump(2));
    return ok;
}

int cmd_spectrum(const minsurf::RunConfig& c)
{
    if (c.k < 1) throw minsurf::ParameterError("k must be at least 1");
    const minsurf::SurfaceMesh mesh = load_surface(c);
    const auto s = minsurf::assemble_stiffness(mesh);
    const auto m = minsurf::assemble_mass(
        mesh, c.mass_mode == "lumped" ? minsurf::MassMode::lumped : minsurf::MassMode::consistent);
    minsurf::EigenSolverOptions eo;
    eo.seed = c.seed;
    const auto pairs = minsurf::solve_smallest_eigenpairs(s, m, std::max(c.k, 2), eo);
    const auto clusters = minsurf::eigen_clusters(pairs, eo.cluster_tolerance);

    std::ostringstream csv;
    minsurf::write_spectrum_csv(csv, std::vector<minsurf::EigenPair>(pairs.begin(), pairs.begin() + c.k));
    std::ostream& summary = c.out.empty() ? std::cerr : std::cout;
    summary << mesh.name() << "  V=" << mesh.num_vertices() << "  h=" << mesh.mesh_size() << '\n';
    if (clusters.size() >= 2) {
        const auto [lo, hi] = clusters[1];
        summary << "lambda1 = " << pairs[lo].lambda << "  multiplicity " << hi - lo
                << (hi == static_cast<int>(pairs.size()) ? " (cluster may continue past k)" : "") << '\n';
        if (mesh.ambient_dim() >= 3) {
            const double t = minsurf::threshold(mesh.ambient_dim());
            summary << "threshold (n-2)/(2n) = " << t << "  lambda1 " << (pairs[lo].lambda < t ? "<" : ">=")
                    << " threshold\n";
        }
    }
    emit(c, csv.str());
    return ok;
}

int cmd_verify(const minsurf::RunConfig& c)
{
    const minsurf::SurfaceMesh mesh = load_surface(c);
    minsurf::VerifyOptions vo;
    vo.tolerance = c.tolerance;
    vo.minimality_tolerance = c.minimality_tolerance;
    vo.seed = c.seed;
    const minsurf::VerifyReport r = minsurf::run_verification(mesh, vo);
    minsurf::print_table(c.out.empty() ? std::cerr : std::cout, r);
    emit(c, minsurf::to_json(r, c.res).dump(2));
    if (!r.all_pass()) {
        std::cerr << "failing checks:\n";
        for (const auto& f : r.failures()) std::cerr << "  " << f.name << '\n';
        return verification_failed;
    }
    return ok;
}

int cmd_index(const minsurf::RunConfig& c)
{
    const minsurf::SurfaceMesh mesh = load_surface(c);
    const minsurf::Discretization disc(mesh);
    minsurf::Json j;
    j["surface"] = mesh.name();
    j["n"] = mesh.ambient_dim();
    j["res"] = c.res;
    j["h"] = disc.h();
    j["genus"] = mesh.genus();

    const auto energy = minsurf::negative_index_count(minsurf::assemble_energy_form(disc), c.delta, c.seed);
    j["energy"] = minsurf::to_json(energy, mesh.name(), c.res, disc.h());
    std::cerr << "ind_E = " << energy.count_negative << " (near-zero band " << energy.near_zero.size() << ")\n";

    const auto es = minsurf::el_soufi_lower_bound_check(disc);
    j["el_soufi"] = minsurf::to_json(es);
    if (es.applicable) {
        std::cerr << "El Soufi bound ind_E >= n+1: " << (es.pass ? "witnessed" : "not witnessed") << '\n';
    } else {
        std::cerr << "El Soufi bound not claimed: surface lies in a totally geodesic S^2\n";
    }

    bool pass = true;
    const bool has_area_form = mesh.ambient_dim() == 3 && mesh.chart() && mesh.chart()->a_squared;
    if (has_area_form) {
        const auto area = minsurf::negative_index_count(minsurf::assemble_area_jacobi(disc), c.delta, c.seed);
        j["area"] = minsurf::to_json(area, mesh.name(), c.res, disc.h());
        std::cerr << "ind_A = " << area.count_negative << " (near-zero band " << area.near_zero.size() << ")\n";
        const auto r = minsurf::ejiri_micallef_r(mesh.genus(), 0);
        const bool ok_bracket = energy.count_negative <= area.count_negative &&
                                area.count_negative <= energy.count_negative + r.value;
        j["bracket"] = minsurf::Json{{"genus", mesh.genus()},     {"branch_points", 0},
                                     {"r", r.value},              {"cases", r.cases},
                                     {"ind_E", energy.count_negative}, {"ind_A", area.count_negative},
                                     {"pass", ok_bracket}};
        std::cerr << "bracket " << energy.count_negative << " <= " << area.count_negative << " <= "
                  << energy.count_negative + r.value << ": " << (ok_bracket ? "pass" : "FAIL") << '\n';
        pass = ok_bracket;
    }
    emit(c, j.dump(2));
    return pass ? ok : verification_failed;
}

int cmd_certificate(const minsurf::RunConfig& c)
{
    minsurf::threshold(c.n);
    const minsurf::SurfaceMesh mesh = load_surface(c);
    const minsurf::Discretization disc(mesh);
    minsurf::CertificateOptions co;
    co.seed = c.seed;
    co.synthetic_lambda = c.synthetic_lambda;
    co.k = c.k;
    const auto set = minsurf::build_certificate(disc, co);
    minsurf::Json j = minsurf::to_json(set.primary(), c.res);
    minsurf::Json members = minsurf::Json::array();
    for (const auto& r : set.members) members.push_back(minsurf::to_json(r, c.res));
    j["cluster_reports"] = members;
    std::cerr << "verdict " << minsurf::to_string(set.primary().verdict) << (set.primary().synthetic ? " (synthetic)" : "")
              << "  D2E(X) = " << set.primary().d2e_value << '\n';
    emit(c, j.dump(2));
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Second-variation toolkit for minimal surfaces in spheres"};
    app.require_subcommand(1);
    Flags flags;
    struct Command
    {
        const char* name;
        const char* help;
        int (*run)(const minsurf::RunConfig&);
    };
    const Command commands[] = {
        {"catalog", "list catalog surfaces and their known data", cmd_catalog},
        {"spectrum", "lowest Laplace-Beltrami eigenpairs as CSV", cmd_spectrum},
        {"verify", "run the identity suite", cmd_verify},
        {"index", "energy and area index counts", cmd_index},
        {"certificate", "run the certificate pipeline", cmd_certificate},
    };
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const auto& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        add_common_flags(sub, flags);
        subs.emplace_back(sub, &cmd);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        const minsurf::RunConfig config = resolve(flags);
        for (const auto& [sub, cmd] : subs) {
            if (sub->parsed()) return cmd->run(config);
        }
    } catch (const minsurf::SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical;
    } catch (const minsurf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}
