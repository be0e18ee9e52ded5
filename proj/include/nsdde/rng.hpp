#pragma once

#include <cstdint>

#include "nsdde/model.hpp"

namespace nsdde {

/// Purpose tags keep the streams of one path independent of each other.
enum class StreamPurpose : std::uint64_t {
    Brownian = 1,
    Jumps = 2,
    Probes = 3,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-style seed plan: every (path, purpose) pair maps to its own
/// generator through a pure hash of the master seed, so path i draws the same
/// numbers whatever order or thread it runs on.
struct SeedPlan {
    std::uint64_t master_seed = 0;

    std::uint64_t substream_key(std::uint64_t path, StreamPurpose purpose) const;
    Rng substream(std::uint64_t path, StreamPurpose purpose) const;
};

}  // namespace nsdde
