// Command line front end: run seeded protocol experiments from flags or a
// declarative config file, emit machine- and human-readable reports, and dump
// the derived oracle constants.
//
// Exit status: 0 success, 1 declared-invariant failure, 2 usage or config
// error, 3 I/O error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cli_lib.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int write_output(const std::string& content, const std::string& path) {
    if (path.empty()) {
        std::cout << content;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output path: " << path << "\n";
        return kExitIo;
    }
    out << content;
    return out.good() ? kExitOk : kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tripartite three-level protocol simulator"};
    app.require_subcommand(1);

    // --- run ---
    auto* run = app.add_subcommand("run", "run a protocol experiment");
    std::string protocol, config_path, output, format, subspace_policy_str, eve_str, basis_set_str,
        backend_str;
    long trials = -1;
    std::int64_t seed = -1;
    run->add_option("--protocol", protocol,
                    "secret-sharing | qkd | herald | sorter-check | verify-paper");
    run->add_option("--trials", trials, "number of rounds");
    run->add_option("--seed", seed, "64-bit RNG seed");
    run->add_option("--basis-set", basis_set_str, "comma list: computational,fourier");
    run->add_option("--subspace-policy", subspace_policy_str, "fixed:<i>,<j> | random");
    run->add_option("--eve", eve_str, "off | intercept:<alice|bob>:<random2d|comp2d|sup2d|comp3d>");
    run->add_option("--backend", backend_str, "abstract | optics");
    run->add_option("--config", config_path, "declarative config file (JSON); flags win");
    run->add_option("--output", output, "output path (default stdout)");
    run->add_option("--format", format, "json | csv | text");

    // --- oracle ---
    auto* oracle = app.add_subcommand("oracle", "emit the derived oracle constants");
    std::string oracle_output;
    oracle->add_option("--output", oracle_output, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (oracle->parsed()) {
        const triq::OracleConstants oc = triq::compute_oracle_constants();
        triq::cli::json j = triq::cli::json::array();
        for (const auto& c : oc.labeled())
            j.push_back({{"name", c.name}, {"value", c.value}, {"provenance", c.provenance}});
        return write_output(j.dump(2) + "\n", oracle_output);
    }

    triq::cli::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot read config file: " << config_path << "\n";
                return kExitIo;
            }
            triq::cli::json j;
            in >> j;
            cfg = triq::cli::config_from_json(j);
        }
        if (!protocol.empty()) cfg.protocol = protocol;
        if (trials >= 0) cfg.trials = trials;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!basis_set_str.empty()) {
            cfg.basis_set.clear();
            std::stringstream ss(basis_set_str);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok == "computational" || tok == "comp")
                    cfg.basis_set.push_back(triq::PartyBasis::Computational);
                else if (tok == "fourier")
                    cfg.basis_set.push_back(triq::PartyBasis::Fourier);
                else
                    throw std::invalid_argument("unknown basis: " + tok);
            }
        }
        if (!subspace_policy_str.empty())
            cfg.subspace_policy =
                triq::cli::parse_subspace_policy(subspace_policy_str, cfg.fixed_pair);
        if (!eve_str.empty()) cfg.eve = triq::cli::parse_eve(eve_str);
        if (!backend_str.empty()) {
            if (backend_str == "optics") cfg.backend = triq::MeasurementBackend::Optics;
            else if (backend_str == "abstract") cfg.backend = triq::MeasurementBackend::Abstract;
            else throw std::invalid_argument("unknown backend: " + backend_str);
        }
        if (!format.empty()) cfg.format = format;
        if (!output.empty()) cfg.output = output;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const triq::cli::ReportBundle report = triq::cli::run_experiment(cfg);
        const int io = write_output(triq::cli::emit(report, cfg.format), cfg.output);
        if (io != kExitOk) return io;
        if (!report.all_pass()) {
            std::cerr << "one or more declared checks failed\n";
            return kExitInvariantFailure;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariantFailure;
    }
}
