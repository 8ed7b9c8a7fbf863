#pragma once

#include "coxsim/limits.hpp"
#include "coxsim/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coxsim::cli {

enum ExitCode : int {
    kSuccess = 0,
    kVerdictFailure = 1,
    kUsageError = 2,
    kNumericalFailure = 3,
};

// Bad flags, config keys or parameter values.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentInfo {
    std::string name;
    std::string description;
    // Every accepted parameter with its default; the default's JSON type is
    // the schema for overrides.
    nlohmann::ordered_json defaults;
    bool negative_control = false;
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& find_experiment(const std::string& name);

// Config file layout:
//   {
//     "seed": 42, "workers": 1, "block_size": 8192, "output_dir": "out",
//     "experiment": {"name": "lemma3", "preset": "...", ...parameters}
//   }
struct RunConfig {
    std::uint64_t seed = 42;
    unsigned workers = 1;
    std::size_t block_size = 8192;
    std::string output_dir = ".";
    std::string experiment;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();

    /// Validates against the schema; throws UsageError naming the bad key.
    static RunConfig from_json(const nlohmann::json& j);
    RunContext context() const;
};

/// Defaults of the experiment with `overrides` applied; throws UsageError for
/// unknown keys or mistyped values.
nlohmann::ordered_json resolve_params(const std::string& name, const nlohmann::json& overrides);

/// Runs a resolved configuration. Reports never depend on the worker count.
Report run_experiment(const RunConfig& cfg);

/// Writes <name>.json, <name>.csv and <name>.meta.json into cfg.output_dir.
void write_report_files(const RunConfig& cfg, const Report& report);

/// Entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace coxsim::cli
