#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nsdde/model.hpp"

namespace nsdde {

using ParamMap = std::map<std::string, double>;

/// A named model family. `defaults` lists every accepted parameter; a
/// parameter map passed to `make` may only override those keys.
struct ModelEntry {
    std::string id;
    std::string summary;
    ParamMap defaults;
    std::function<NeutralModel(const ParamMap&)> make;
    /// Initial value used when the config does not set a segment scale.
    std::function<double(const ParamMap&)> default_scale;
};

const std::vector<ModelEntry>& model_registry();
const ModelEntry& find_model(const std::string& id);

/// Merges `overrides` into the entry's defaults. Unknown keys are rejected.
ParamMap resolve_params(const ModelEntry& entry, const ParamMap& overrides);

NeutralModel make_model(const std::string& id, const ParamMap& overrides = {});

/// Segment kinds understood by the harness: "constant", "linear" and the
/// registered "cosine" (scale * cos(pi * theta / tau)).
struct SegmentSpec {
    std::string kind = "constant";
    double scale = 0.1;
    double slope = 0.0;
};

InitialSegment make_segment(const SegmentSpec& spec, int dim_state, double tau);

std::vector<std::string> segment_kinds();

}  // namespace nsdde
