// rmt-lab: command-line front end for the deformed Wigner matrix laboratory.
//
//   rmt-lab <kind> --config path [--seed u64] [--out dir] [--samples n] [--threads n]
//   rmt-lab suite quick|full [--threads n] [--out dir]
//
// Exit codes: 0 pass, 1 threshold fail, 2 config error, 3 runtime error.

#include "rmtlab/acceptance.hpp"
#include "rmtlab/io.hpp"
#include "rmtlab/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace rmtlab;

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for deformed Wigner matrices"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int samples = 0, threads = 0;
    bool have_seed = false, have_samples = false;

    std::vector<CLI::App*> kind_cmds;
    for (const char* kind : {"law", "locallaw", "rigidity", "dbm", "beta",
                             "gaps", "paircorr", "moments"}) {
        auto* cmd = app.add_subcommand(kind, std::string("run a '") + kind +
                                                 "' experiment from a config");
        cmd->add_option("--config", config_path, "config file (JSON)")
            ->required();
        cmd->add_option("--seed", seed, "master seed override")
            ->each([&](const std::string&) { have_seed = true; });
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--samples", samples, "sample count override")
            ->each([&](const std::string&) { have_samples = true; });
        cmd->add_option("--threads", threads, "worker threads (default: all)");
        kind_cmds.push_back(cmd);
    }

    auto* suite_cmd = app.add_subcommand("suite", "run a canned experiment battery");
    std::string suite_name;
    suite_cmd->add_option("name", suite_name, "quick or full")->required();
    suite_cmd->add_option("--threads", threads, "worker threads");
    suite_cmd->add_option("--out", out_dir, "where to write the aggregate report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (suite_cmd->parsed()) {
            auto report = suite(suite_name, threads);
            std::cout << report.dump(2) << std::endl;
            if (!out_dir.empty())
                io::write_json(std::filesystem::path(out_dir) /
                                   ("suite_" + suite_name + ".json"),
                               report);
            return report["pass"].get<bool>() ? 0 : 1;
        }
        auto cfg = ExperimentConfig::load(config_path);
        for (std::size_t i = 0; i < kind_cmds.size(); ++i) {
            if (kind_cmds[i]->parsed()) {
                std::string want = kind_cmds[i]->get_name();
                if (cfg.kind() != want)
                    throw ConfigInvalid("config kind '" + cfg.kind() +
                                        "' does not match subcommand '" + want + "'");
            }
        }
        if (have_seed) cfg.override_field("seed", seed);
        if (!out_dir.empty()) cfg.override_field("out", out_dir);
        if (threads > 0) cfg.override_field("threads", threads);
        if (have_samples) {
            auto params = cfg.doc.value("params", nlohmann::json::object());
            params["samples"] = samples;
            cfg.override_field("params", params);
        }
        auto manifest = run(cfg);
        std::cout << manifest.to_json().dump(2) << std::endl;
        return manifest.all_pass() ? 0 : 1;
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << std::endl;
        return 3;
    }
}
