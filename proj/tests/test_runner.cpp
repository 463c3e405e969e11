#include <doctest.h>

#include "rmtlab/runner.hpp"

#include <filesystem>
#include <fstream>
#include <set>

using namespace rmtlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path temp_dir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("rmtlab_runner_" + tag);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("law experiment produces the documented outputs") {
    auto out = temp_dir("law");
    auto cfg = ExperimentConfig::from_json(
        {{"schema", 1},
         {"kind", "law"},
         {"seed", 1},
         {"out", out.string()},
         {"measure", {{"kind", "point_mass"}}},
         {"params", {{"theta", 1.0}, {"expect_L_plus", 2.0}}}});
    auto manifest = run(cfg);
    CHECK(manifest.all_pass());
    CHECK(fs::exists(out / "law.csv"));
    CHECK(fs::exists(out / "law.json"));
    CHECK(fs::exists(out / "classical_locations.csv"));
    CHECK(fs::exists(out / "manifest.json"));
    auto lawj = nlohmann::json::parse(slurp(out / "law.json"));
    CHECK(std::abs(lawj["L_plus"].get<double>() - 2.0) < 1e-10);
    CHECK(std::abs(lawj["zeta_plus"].get<double>() - 1.0) < 1e-10);
    fs::remove_all(out);
}

TEST_CASE("manifest lists every file in the output directory") {
    auto out = temp_dir("manifest");
    auto cfg = ExperimentConfig::from_json({{"schema", 1},
                                            {"kind", "moments"},
                                            {"seed", 2},
                                            {"out", out.string()}});
    auto manifest = run(cfg);
    std::set<std::string> listed(manifest.outputs.begin(), manifest.outputs.end());
    for (auto& entry : fs::directory_iterator(out))
        CHECK(listed.count(entry.path().filename().string()) == 1);
    CHECK(listed.size() == 2);  // moments.json + manifest.json
    fs::remove_all(out);
}

TEST_CASE("reruns with the same seed are byte identical") {
    auto out1 = temp_dir("det1"), out2 = temp_dir("det2");
    auto mk = [&](const fs::path& out) {
        return ExperimentConfig::from_json(
            {{"schema", 1},
             {"kind", "locallaw"},
             {"seed", 77},
             {"out", out.string()},
             {"threads", 2},
             {"measure", {{"kind", "two_point"}, {"a", 0.5}}},
             {"ensemble", {{"beta", 1}, {"N", 120}, {"potential", "quantile"}}},
             {"params",
              {{"E_list", {0.0}}, {"eta_list", {0.1, 0.5}}, {"samples", 12}}}});
    };
    run(mk(out1));
    run(mk(out2));
    CHECK(slurp(out1 / "locallaw.csv") == slurp(out2 / "locallaw.csv"));
    CHECK(slurp(out1 / "locallaw.csv").size() > 40);
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("config validation rejects constraint violations") {
    SUBCASE("unknown kind") {
        auto cfg = ExperimentConfig::from_json(
            {{"schema", 1}, {"kind", "frobnicate"}, {"seed", 1}});
        CHECK_THROWS_AS(run(cfg), ConfigInvalid);
    }

    SUBCASE("missing schema") {
        CHECK_THROWS_AS(ExperimentConfig::from_json({{"kind", "law"}}),
                        ConfigInvalid);
    }

    SUBCASE("mcmc size cap") {
        auto cfg = ExperimentConfig::from_json({{"schema", 1},
                                                {"kind", "beta"},
                                                {"seed", 1},
                                                {"params", {{"N", 200}}}});
        CHECK_THROWS_AS(run(cfg), ConfigInvalid);
    }

    SUBCASE("pair correlation window rule for random potentials") {
        auto cfg = ExperimentConfig::from_json(
            {{"schema", 1},
             {"kind", "paircorr"},
             {"seed", 1},
             {"measure", {{"kind", "two_point"}, {"a", 0.5}}},
             {"ensemble", {{"beta", 2}, {"N", 400}, {"potential", "iid"}}},
             {"params", {{"b", 0.01}, {"samples", 120}}}});
        // 0.01 < 400^{-1/2} = 0.05 violates the random-V window rule
        CHECK_THROWS_AS(run(cfg), ConfigInvalid);
    }

    SUBCASE("matrix size cap") {
        auto cfg = ExperimentConfig::from_json(
            {{"schema", 1},
             {"kind", "locallaw"},
             {"seed", 1},
             {"measure", {{"kind", "point_mass"}}},
             {"ensemble", {{"beta", 1}, {"N", 8192}}},
             {"params", {{"samples", 2}}}});
        CHECK_THROWS_AS(run(cfg), ConfigInvalid);
    }
}

TEST_CASE("dbm experiment writes the agreement report") {
    auto out = temp_dir("dbm");
    auto cfg = ExperimentConfig::from_json(
        {{"schema", 1},
         {"kind", "dbm"},
         {"seed", 5},
         {"out", out.string()},
         {"threads", 2},
         {"measure", {{"kind", "two_point"}, {"a", 0.5}}},
         {"ensemble", {{"beta", 1}, {"N", 16}, {"potential", "quantile"}}},
         {"params",
          {{"t", 0.2}, {"samples", 150}, {"z_cap", 5.0}, {"trajectory", true}}}});
    auto manifest = run(cfg);
    CHECK(fs::exists(out / "dbm_agreement.json"));
    CHECK(fs::exists(out / "trajectory.csv"));
    auto rep = nlohmann::json::parse(slurp(out / "dbm_agreement.json"));
    CHECK(rep["stats"].size() == 3);
    CHECK(manifest.all_pass());
    fs::remove_all(out);
}

TEST_CASE("gaps experiment compares arms and records distances") {
    auto out = temp_dir("gaps");
    auto cfg = ExperimentConfig::from_json(
        {{"schema", 1},
         {"kind", "gaps"},
         {"seed", 6},
         {"out", out.string()},
         {"measure", {{"kind", "two_point"}, {"a", 0.5}}},
         {"ensemble", {{"beta", 1}, {"N", 200}, {"potential", "quantile"}}},
         {"params", {{"samples", 30}, {"ks_max", 0.08}}}});
    auto manifest = run(cfg);
    auto cmp = nlohmann::json::parse(slurp(out / "comparison.json"));
    CHECK(cmp["ks"].get<double>() >= 0.0);
    CHECK(cmp["n_A"].get<int>() > 1000);
    CHECK(manifest.checks.count("ks_within_threshold") == 1);
    fs::remove_all(out);
}

TEST_CASE("quick suite is green and idempotent") {
    auto report = suite("quick", 2);
    CHECK(report["pass"].get<bool>());
    auto again = suite("quick", 2);
    CHECK(report["checks"] == again["checks"]);
    fs::remove_all("runs/quick");
}
