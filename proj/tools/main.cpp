#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "blockwave/driver.hpp"
#include "blockwave/errors.hpp"

using namespace blockwave;

int main(int argc, char** argv) {
    CLI::App app{"blockwave: distributed block-wavefunction engine for lattice models"};
    app.require_subcommand(1);

    std::string config_path;
    std::string schedule_name = "serial";
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config file")->required();
        cmd->add_option("--schedule", schedule_name,
                        "simulated rank scheduling: serial or threads (results are identical)")
            ->check(CLI::IsMember({"serial", "threads"}));
    };
    auto* solve = app.add_subcommand("solve", "ground state plus entanglement reports");
    auto* oracle = app.add_subcommand("oracle", "dense-oracle equivalence check");
    auto* sweep = app.add_subcommand("sweep", "scaling / fragmentation sweeps");
    auto* analyze = app.add_subcommand("analyze", "re-run analysis on a saved state");
    for (auto* c : {solve, oracle, sweep, analyze}) add_common(c);

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = parse_config_file(config_path);
        apply_env_overrides(cfg);
        const Schedule sched = schedule_name == "threads" ? Schedule::threads : Schedule::serial;
        if (solve->parsed()) return cmd_solve(cfg, sched);
        if (oracle->parsed()) return cmd_oracle(cfg, sched);
        if (sweep->parsed()) return cmd_sweep(cfg, sched);
        return cmd_analyze(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
