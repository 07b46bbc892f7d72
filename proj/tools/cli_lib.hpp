// Configuration records, report bundles, and serialization for the command
// line front end. Kept as a library so the formats are testable in-process.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triq/optics.hpp"
#include "triq/oracle.hpp"
#include "triq/protocol_engine.hpp"

namespace triq::cli {

using json = nlohmann::ordered_json;

struct OpticalSetupConfig {
    CouplerUnitary coupler = CouplerUnitary::dft();
    DetectorAssignment assignment;
    std::vector<SorterStage> stages = standard_three_level_cascade();
};

struct ExperimentConfig {
    std::string protocol = "secret-sharing";  // secret-sharing|qkd|herald|sorter-check|verify-paper
    long trials = 10000;
    std::uint64_t seed = 0;
    std::vector<PartyBasis> basis_set = {PartyBasis::Computational, PartyBasis::Fourier};
    SubspacePolicy subspace_policy = SubspacePolicy::Fixed;
    std::array<int, 2> fixed_pair{0, 1};
    std::optional<EveStrategy> eve;
    std::optional<OpticalSetupConfig> optics;
    MeasurementBackend backend = MeasurementBackend::Abstract;
    std::string format = "json";  // json|csv|text
    std::string output;           // empty = stdout

    void validate() const;  // throws std::invalid_argument on bad combinations
};

json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const json& j);

// "fixed:<i>,<j>" | "random"
SubspacePolicy parse_subspace_policy(const std::string& s, std::array<int, 2>& pair);
// "off" | "intercept:<alice|bob>:<random2d|comp2d|sup2d|comp3d>"
std::optional<EveStrategy> parse_eve(const std::string& s);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ReportBundle {
    ExperimentConfig config;
    json stats;
    std::vector<Check> checks;
    std::vector<OracleConstant> constants;
    std::optional<Transcript> transcript;

    bool all_pass() const;
};

ReportBundle run_experiment(const ExperimentConfig& cfg);

std::string emit_json(const ReportBundle& report);
std::string emit_csv(const ReportBundle& report);
std::string emit_text(const ReportBundle& report);
std::string emit(const ReportBundle& report, const std::string& format);

// Statistical acceptance window: |observed - expected| <= 4 sqrt(p(1-p)/n).
bool within_four_sigma(double observed, double expected, long n);

}  // namespace triq::cli
