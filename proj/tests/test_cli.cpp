#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "cli_lib.hpp"

using namespace triq;
using namespace triq::cli;

namespace {

// TRIQ_CLI_PATH is injected by the build as the path to the built executable.
std::string cli_path() { return TRIQ_CLI_PATH; }

struct CommandResult {
    int status = -1;
    std::string stdout_text;
};

CommandResult run_command(const std::string& cmd) {
    CommandResult res;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (const size_t n = fread(buf, 1, sizeof buf, pipe)) res.stdout_text.append(buf, n);
    const int raw = pclose(pipe);
    res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return res;
}

}  // namespace

TEST_CASE("configuration survives a serialization round trip") {
    ExperimentConfig cfg;
    cfg.protocol = "qkd";
    cfg.trials = 1234;
    cfg.seed = 99;
    cfg.subspace_policy = SubspacePolicy::Random;
    cfg.fixed_pair = {1, 2};
    cfg.eve = EveStrategy{};
    cfg.eve->target_party = 0;
    cfg.optics = OpticalSetupConfig{};
    cfg.optics->coupler = CouplerUnitary::identity();
    cfg.backend = MeasurementBackend::Optics;
    cfg.format = "csv";
    cfg.output = "/tmp/out.csv";

    const json once = to_json(cfg);
    const json twice = to_json(config_from_json(once));
    CHECK(once == twice);

    // defaults also round-trip
    const ExperimentConfig def;
    CHECK(to_json(def) == to_json(config_from_json(to_json(def))));
}

TEST_CASE("flag value parsers accept the documented grammar") {
    std::array<int, 2> pair{0, 1};
    CHECK(parse_subspace_policy("random", pair) == SubspacePolicy::Random);
    CHECK(parse_subspace_policy("fixed:1,2", pair) == SubspacePolicy::Fixed);
    CHECK(pair == std::array<int, 2>{1, 2});
    CHECK_THROWS_AS(parse_subspace_policy("fixed:1", pair), std::invalid_argument);
    CHECK_THROWS_AS(parse_subspace_policy("sometimes", pair), std::invalid_argument);

    CHECK_FALSE(parse_eve("off").has_value());
    const auto eve = parse_eve("intercept:alice:comp3d");
    REQUIRE(eve.has_value());
    CHECK(eve->target_party == 0);
    REQUIRE(eve->basis_set.size() == 1);
    CHECK(eve->basis_set[0] == EveStrategy::BasisId::FullComputational);
    CHECK_THROWS_AS(parse_eve("intercept:charlie:random2d"), std::invalid_argument);
    CHECK_THROWS_AS(parse_eve("intercept:bob:psychic"), std::invalid_argument);
}

TEST_CASE("validation rejects unknown protocols, formats, and pairs") {
    ExperimentConfig cfg;
    cfg.protocol = "teleportation";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.protocol = "qkd";
    cfg.format = "xml";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.format = "json";
    cfg.fixed_pair = {0, 0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("report formats carry the declared schema") {
    ExperimentConfig cfg;
    cfg.protocol = "qkd";
    cfg.trials = 500;
    cfg.seed = 4;
    const ReportBundle rep = run_experiment(cfg);
    CHECK(rep.all_pass());

    const json j = json::parse(emit_json(rep));
    CHECK(j.contains("config"));
    CHECK(j.contains("stats"));
    CHECK(j.contains("checks"));
    CHECK(j.contains("constants"));
    CHECK(j["stats"]["error_rate"].get<double>() == 0.0);

    std::istringstream csv(emit_csv(rep));
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "trial,basis_alice,basis_bob,basis_charlie,pair_alice,pair_bob,click_alice,click_bob,"
          "click_charlie,outcome_alice,outcome_bob,outcome_charlie,key_alice,key_bob,sifted,reason");
    long rows = 0;
    std::string line;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == cfg.trials);

    const std::string text = emit_text(rep);
    CHECK(text.find("[PASS]") != std::string::npos);
    CHECK(text.find("[FAIL]") == std::string::npos);
    CHECK_THROWS_AS(emit(rep, "xml"), std::invalid_argument);
}

TEST_CASE("the statistical window scales with the sample size") {
    CHECK(within_four_sigma(0.25, 0.25, 100));
    CHECK(within_four_sigma(0.26, 0.25, 1000));
    CHECK_FALSE(within_four_sigma(0.30, 0.25, 100000));
}

TEST_CASE("executable: identical seeds give byte-identical reports") {
    const std::string cmd = cli_path() + " run --protocol qkd --trials 2000 --seed 42 --format csv";
    const CommandResult a = run_command(cmd);
    const CommandResult b = run_command(cmd);
    CHECK(a.status == 0);
    CHECK(a.stdout_text == b.stdout_text);
    CHECK(a.stdout_text.size() > 1000);

    const CommandResult c = run_command(cli_path() + " run --protocol qkd --trials 2000 --seed 43 --format csv");
    CHECK(c.stdout_text != a.stdout_text);
}

TEST_CASE("executable: exit status discipline") {
    CHECK(run_command(cli_path() + " run --protocol verify-paper").status == 0);
    CHECK(run_command(cli_path() + " run --protocol time-travel").status == 2);
    CHECK(run_command(cli_path() + " run --no-such-flag").status == 2);
    CHECK(run_command(cli_path() + " run --protocol qkd --trials 100 --output /nonexistent-dir/x.json")
              .status == 3);
    CHECK(run_command(cli_path() + " run --protocol qkd --config /nonexistent-dir/cfg.json").status == 3);
}

TEST_CASE("executable: config file is honored and flags win over it") {
    const std::string path = "/tmp/triq_test_cfg.json";
    {
        ExperimentConfig cfg;
        cfg.protocol = "secret-sharing";
        cfg.trials = 300;
        cfg.seed = 9;
        std::ofstream(path) << to_json(cfg).dump(2);
    }
    const CommandResult base = run_command(cli_path() + " run --config " + path);
    CHECK(base.status == 0);
    const json j = json::parse(base.stdout_text);
    CHECK(j["config"]["protocol"] == "secret-sharing");
    CHECK(j["config"]["trials"] == 300);

    const CommandResult overridden =
        run_command(cli_path() + " run --config " + path + " --trials 150");
    CHECK(overridden.status == 0);
    CHECK(json::parse(overridden.stdout_text)["config"]["trials"] == 150);
    std::remove(path.c_str());
}

TEST_CASE("executable: oracle subcommand emits the derived constants") {
    const CommandResult res = run_command(cli_path() + " oracle");
    CHECK(res.status == 0);
    const json j = json::parse(res.stdout_text);
    REQUIRE(j.is_array());
    bool found = false;
    for (const auto& c : j)
        if (c["name"] == "eve_qber_2d") {
            found = true;
            CHECK(c["value"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
        }
    CHECK(found);
}
