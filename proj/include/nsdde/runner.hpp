#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsdde/config.hpp"

namespace nsdde {

struct RunManifest {
    nlohmann::json config;
    std::string version;
    std::uint64_t seed = 0;
    std::map<std::string, double> wall_seconds;         // per experiment
    std::map<std::string, std::string> output_hashes;   // file name -> git blob hash
    std::vector<std::string> gate_failures;

    int exit_code() const { return gate_failures.empty() ? 0 : 1; }
    nlohmann::json to_json() const;
};

/// Runs the configured studies and writes into `out_dir`:
///   strong_error_p<p>.csv, displacement_p<p>.csv, moments_p<p>.csv,
///   summary.json, summary.txt and manifest.json.
/// On an exception (including ExplosionBudgetExceeded) every file written so
/// far is removed before rethrowing. Gate failures are reported in the
/// manifest and through exit_code().
RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Human-readable listing of the registered models and their parameters.
std::string registry_listing();

}  // namespace nsdde
