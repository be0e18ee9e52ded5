#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsdde/model.hpp"

namespace nsdde {

struct AssumptionCheck {
    std::string id;  // "A1" .. "A4"
    int n_probes = 0;
    double max_ratio = 0.0;
    bool pass = false;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checked;

    bool all_pass() const;
    const AssumptionCheck* find(const std::string& id) const;
};

/// Samples random probe pairs and reports, for each applicable growth
/// condition, the largest observed ratio lhs / rhs under the model's declared
/// constants. A pass means no sampled violation beyond `slack`; it never
/// certifies the global inequality.
///
/// States are drawn uniformly from [-box, box]^n, delays theta from [-tau, 0],
/// marks from the model's mark sampler.
AssumptionReport validate_assumptions(const NeutralModel& model, const InitialSegment& seg,
                                      int probes, double slack, std::uint64_t seed,
                                      double box = 1.0);

}  // namespace nsdde
