#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nsdde/registry.hpp"

namespace nsdde {

struct SlopeGate {
    int p = 2;
    double min = 0.0;
    double max = 0.0;
    std::optional<double> min_r2;
};

struct Gates {
    std::vector<SlopeGate> strong;
    std::vector<SlopeGate> displacement;
    std::optional<double> max_err;           // every strong-error entry must be <= this
    std::optional<double> moment_ratio_max;  // max/min of E sup|Y|^p across the ladder

    bool empty() const {
        return strong.empty() && displacement.empty() && !max_err && !moment_ratio_max;
    }
};

enum class ReferenceKind { FineEm, Oracle };

/// Fully resolved experiment description. Every default is filled in by
/// parse_config, so two equal configs always run identically.
struct ExperimentConfig {
    // model
    std::string model_id;
    ParamMap params;  // resolved against the registry defaults
    SegmentSpec segment;

    // grid
    double tau = 1.0;
    double T = 1.0;
    std::vector<int> ladder;
    int base = 2;
    int refine = 4;
    int m_ref = 0;

    // monte_carlo
    std::size_t n_paths = 1000;
    std::uint64_t seed = 0;
    int workers = 0;
    double explosion_budget = 0.0;

    // experiments
    bool strong_error = true;
    bool displacement = false;
    std::vector<int> p = {2};
    std::vector<double> theta;
    ReferenceKind reference = ReferenceKind::FineEm;

    Gates gates;
    std::string out_dir;

    /// Canonical JSON form (all defaults explicit), used for the manifest echo.
    nlohmann::json to_json() const;
};

/// Parses a JSON document with sections "model", "grid", "monte_carlo",
/// "experiments", "gates" and "output". `overrides` are "dotted.key=value"
/// strings applied before validation; values are read as JSON, falling back
/// to a plain string.
///
/// Unknown keys and type mismatches raise SchemaError naming the key path; a
/// ladder that does not nest raises NestingError.
ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides = {});

}  // namespace nsdde
