#include "minsurf/report.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(MINSURF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("minsurf_cli_" + name);
}

minsurf::Json read_json(const std::filesystem::path& p)
{
    std::ifstream in(p);
    return minsurf::Json::parse(in);
}

} // namespace

TEST(Cli, CatalogListsEntries)
{
    const auto out = temp_file("catalog.json");
    ASSERT_EQ(run("catalog --out " + out.string()), 0);
    const auto j = read_json(out);
    ASSERT_EQ(j.size(), 4u);
    EXPECT_EQ(j[1]["name"], "clifford-torus");
    EXPECT_EQ(j[1]["known"]["lambda1"], 2.0);
    EXPECT_EQ(j[0]["known"]["area_index"], 1);
}

TEST(Cli, SpectrumCsvAndUsageErrors)
{
    const auto out = temp_file("spectrum.csv");
    ASSERT_EQ(run("spectrum --surface equatorial-sphere --res 3 --k 4 --out " + out.string()), 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "index,lambda,residual");
    int rows = 0;
    for (std::string line; std::getline(in, line);) rows += line.empty() ? 0 : 1;
    EXPECT_EQ(rows, 4);
    EXPECT_EQ(run("spectrum --k 0"), 2);
    EXPECT_EQ(run("spectrum --res notanumber"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("spectrum --surface no-such-surface"), 2);
}

TEST(Cli, ConfigFileAndFlagPrecedence)
{
    const auto cfg = temp_file("run.cfg");
    {
        std::ofstream f(cfg);
        f << "surface = equatorial-sphere\nres = 2\nk = 3\n";
    }
    const auto out = temp_file("spectrum_cfg.csv");
    ASSERT_EQ(run("spectrum --config " + cfg.string() + " --k 5 --out " + out.string()), 0);
    std::ifstream in(out);
    int rows = -1;
    for (std::string line; std::getline(in, line);) rows += line.empty() ? 0 : 1;
    EXPECT_EQ(rows, 5);
    const auto bad = temp_file("bad.cfg");
    {
        std::ofstream f(bad);
        f << "unknown_key = 1\n";
    }
    EXPECT_EQ(run("spectrum --config " + bad.string()), 2);
}

TEST(Cli, CertificateModes)
{
    const auto out = temp_file("cert.json");
    ASSERT_EQ(run("certificate --res 16 --out " + out.string()), 0);
    auto j = read_json(out);
    EXPECT_EQ(j["hypothesis_met"], false);
    EXPECT_EQ(j["synthetic"], false);
    EXPECT_EQ(j["cluster_reports"].size(), 4u);

    ASSERT_EQ(run("certificate --res 16 --synthetic-lambda 0.1 --out " + out.string()), 0);
    j = read_json(out);
    EXPECT_EQ(j["synthetic"], true);
    EXPECT_EQ(j["lambda1"], 0.1);
    EXPECT_TRUE(j.contains("holder_gamma_2"));

    EXPECT_EQ(run("certificate --surface equatorial-sphere --n 2 --res 2"), 2);
}

TEST(Cli, VerifyAndIndexOnSmallMeshes)
{
    const auto out = temp_file("verify.json");
    EXPECT_EQ(run("verify --surface jittered-sphere --res 3 --out " + out.string()), 1);
    auto j = read_json(out);
    EXPECT_EQ(j["checks"].size(), 1u);
    EXPECT_EQ(j["minimality"]["minimal"], false);

    // Coarse torus: algebraic checks pass, discretization-limited ones do not.
    EXPECT_EQ(run("verify --res 8 --out " + out.string()), 1);
    j = read_json(out);
    bool algebraic_ok = true;
    bool some_failure = false;
    for (const auto& c : j["checks"]) {
        if (c["kind"] == "algebraic") algebraic_ok = algebraic_ok && c["pass"].get<bool>();
        if (!c["pass"].get<bool>()) some_failure = true;
    }
    EXPECT_TRUE(algebraic_ok);
    EXPECT_TRUE(some_failure);

    const auto idx = temp_file("index.json");
    ASSERT_EQ(run("index --surface equatorial-sphere --res 3 --out " + idx.string()), 0);
    j = read_json(idx);
    EXPECT_EQ(j["area"]["count_negative"], 1);
    EXPECT_EQ(j["el_soufi"]["applicable"], false);
}

TEST(Cli, MeshFileInput)
{
    const auto mesh = temp_file("torus.off");
    ASSERT_EQ(run("spectrum --res 8 --k 2 --out /dev/null"), 0);
    {
        std::ofstream f(mesh);
        f << "nOFF\n4 4 4 0\n";
        f << "1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n";
        f << "3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";
    }
    EXPECT_EQ(run("spectrum --surface " + mesh.string() + " --k 2 --out /dev/null"), 0);
}
