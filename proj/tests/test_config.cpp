#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "blockwave/config.hpp"
#include "blockwave/driver.hpp"
#include "blockwave/errors.hpp"

using namespace blockwave;

namespace {

const char* kMinimal = R"(
[model]
kind = heisenberg
sites = 4

[target]
two_sz = 0
)";

} // namespace

TEST_CASE("minimal config parses with defaults") {
    auto cfg = parse_config_text(kMinimal);
    CHECK(cfg.model.kind == ModelKind::heisenberg);
    CHECK(cfg.model.sites == 4);
    CHECK(cfg.cut_position == 2); // default: central cut
    CHECK(cfg.ranks == std::vector<int>{1});
    CHECK(cfg.tolerance == 1e-12);
    CHECK(cfg.target() == QuantumNumber({0}));
}

TEST_CASE("unknown keys and sections are named in the diagnostic") {
    CHECK_THROWS_WITH_AS(parse_config_text("[model]\nkind = heisenberg\nsites = 4\nbogus = 1\n"
                                           "[target]\ntwo_sz = 0\n"),
                         doctest::Contains("model.bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("[nosuch]\nx = 1\n"), doctest::Contains("nosuch"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("[model]\nkind = ising\n"), doctest::Contains("model.kind"),
                         ConfigError);
}

TEST_CASE("target validation names the field") {
    CHECK_THROWS_WITH_AS(parse_config_text("[model]\nkind = heisenberg\nsites = 4\n"),
                         doctest::Contains("two_sz"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text("[model]\nkind = hubbard\nsites = 4\n[target]\ntwo_sz = 0\n"),
        doctest::Contains("two_sz"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text("[model]\nkind = heisenberg\nsites = 4\n[target]\ntwo_sz = 1\n"),
        doctest::Contains("parity"), ConfigError);
}

TEST_CASE("resolved text round-trips and hashes deterministically") {
    auto cfg = parse_config_text(kMinimal);
    auto text = cfg.resolved_text();
    auto cfg2 = parse_config_text(text);
    CHECK(cfg2.resolved_text() == text);
    CHECK(cfg2.hash() == cfg.hash());
    // output_dir is an I/O detail: not part of the experiment identity
    cfg2.output_dir = "/elsewhere";
    CHECK(cfg2.hash() == cfg.hash());
    cfg2.seed = 99;
    CHECK(cfg2.hash() != cfg.hash());
}

TEST_CASE("driver: solve writes the expected artifacts") {
    auto cfg = parse_config_text(R"(
[model]
kind = heisenberg
sites = 2

[target]
two_sz = 0

[run]
output_dir = test_drv_out
)");
    REQUIRE(cmd_solve(cfg, Schedule::serial) == 0);
    std::ifstream energy("test_drv_out/energy.json");
    REQUIRE(energy.good());
    std::string all((std::istreambuf_iterator<char>(energy)), std::istreambuf_iterator<char>());
    CHECK(all.find("-0.75") != std::string::npos);
    for (const char* f : {"state.bwf", "convergence.csv", "counters.json", "plan.json",
                          "entanglement_spectrum.csv", "sector_weights.csv", "fits.json",
                          "resolved_config.ini"}) {
        std::ifstream probe(std::string("test_drv_out/") + f);
        CHECK_MESSAGE(probe.good(), f);
    }
    std::remove("test_drv_out/state.bwf");
}

TEST_CASE("driver: oracle passes clean and fails with a corrupted boundary block") {
    auto cfg = parse_config_text(R"(
[model]
kind = hubbard
sites = 4
U = 2

[target]
n_up = 2
n_dn = 2

[run]
ranks = 1,2
output_dir = test_drv_oracle
)");
    CHECK(cmd_oracle(cfg, Schedule::serial) == 0);
    cfg.corrupt_boundary = true;
    CHECK(cmd_oracle(cfg, Schedule::serial) == 1);
    // the report names the worst pair
    std::ifstream f("test_drv_oracle/oracle.json");
    std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(all.find("worst_pair") != std::string::npos);
    CHECK(all.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("driver: analyze re-runs the analysis from the saved state") {
    auto cfg = parse_config_text(R"(
[model]
kind = heisenberg
sites = 6

[target]
two_sz = 0

[run]
output_dir = test_drv_an
)");
    REQUIRE(cmd_solve(cfg, Schedule::serial) == 0);
    std::remove("test_drv_an/fits.json");
    CHECK(cmd_analyze(cfg) == 0);
    std::ifstream probe("test_drv_an/fits.json");
    CHECK(probe.good());
    // a different model refuses the state file
    auto other = parse_config_text(R"(
[model]
kind = heisenberg
sites = 6
J = 2.0

[target]
two_sz = 0

[run]
output_dir = test_drv_an
)");
    CHECK(cmd_analyze(other) == 1);
}

TEST_CASE("driver: single-point sweep records the skip notice") {
    auto cfg = parse_config_text(R"(
[model]
kind = heisenberg
sites = 6

[target]
two_sz = 0

[run]
output_dir = test_drv_sw

[sweep]
axis = ranks
values = 2
)");
    REQUIRE(cmd_sweep(cfg, Schedule::serial) == 0);
    std::ifstream f("test_drv_sw/sweep_fits.json");
    std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(all.find("skipped") != std::string::npos);
}

TEST_CASE("driver: modeled speedup is non-decreasing over the rank sweep") {
    auto cfg = parse_config_text(R"(
[model]
kind = heisenberg
sites = 12

[target]
two_sz = 0

[run]
output_dir = test_drv_swp

[sweep]
axis = ranks
values = 1,2,4,8,16
)");
    REQUIRE(cmd_sweep(cfg, Schedule::serial) == 0);
    std::ifstream f("test_drv_swp/sweep.csv");
    std::string line;
    std::getline(f, line); // hash
    std::getline(f, line); // header
    double prev = 0.0;
    int rows = 0;
    while (std::getline(f, line)) {
        // speedup is the 7th column
        std::size_t pos = 0;
        for (int c = 0; c < 6; ++c) pos = line.find(',', pos) + 1;
        const double speedup = std::stod(line.substr(pos));
        CHECK(speedup >= prev - 1e-12);
        prev = speedup;
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("cli: exit codes distinguish config errors from compute failures") {
    const std::string cli = BLOCKWAVE_CLI_PATH;
    auto run = [&](const std::string& args) {
        const int rc = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    std::ofstream bad("test_cli_bad.ini");
    bad << "[model]\nkind = ising\nsites = 4\n";
    bad.close();
    CHECK(run("solve test_cli_bad.ini") == 2);
    CHECK(run("solve test_cli_missing.ini") == 2);
    std::ofstream good("test_cli_good.ini");
    good << "[model]\nkind = heisenberg\nsites = 4\n[target]\ntwo_sz = 0\n"
         << "[run]\noutput_dir = test_cli_out\n";
    good.close();
    CHECK(run("solve test_cli_good.ini --schedule threads") == 0);
    CHECK(run("analyze test_cli_good.ini") == 0);
    // environment override of the output directory
    const int rc_env = std::system(("BLOCKWAVE_OUTPUT_DIR=test_cli_env " + cli +
                                    " solve test_cli_good.ini >/dev/null 2>&1")
                                       .c_str());
    CHECK(WEXITSTATUS(rc_env) == 0);
    CHECK(std::ifstream("test_cli_env/energy.json").good());
    // corrupted boundary block: oracle fails with exit 1
    std::ofstream corrupt("test_cli_corrupt.ini");
    corrupt << "[model]\nkind = hubbard\nsites = 4\nU = 2\n[target]\nn_up = 2\nn_dn = 2\n"
            << "[run]\noutput_dir = test_cli_out2\n[debug]\ncorrupt_boundary = true\n";
    corrupt.close();
    CHECK(run("oracle test_cli_corrupt.ini") == 1);
}

TEST_CASE("driver: U sweep continues after a failing point") {
    auto cfg = parse_config_text(R"(
[model]
kind = hubbard
sites = 4

[target]
n_up = 2
n_dn = 2

[run]
output_dir = test_drv_swu

[sweep]
axis = U
values = 2
)");
    cfg.sweep_axis = SweepAxis::U;
    cfg.sweep_values = {2.0, 4.0};
    REQUIRE(cmd_sweep(cfg, Schedule::serial) == 0);
    std::ifstream f("test_drv_swu/sweep.csv");
    std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(all.find("alpha") != std::string::npos);
}
