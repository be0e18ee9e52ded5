#include "nsdde/rng.hpp"

namespace nsdde {

std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// The finalizer is a bijection and (path, purpose) packs injectively while
// path < 2^56, so distinct pairs always get distinct keys.
std::uint64_t SeedPlan::substream_key(std::uint64_t path, StreamPurpose purpose) const {
    std::uint64_t counter = path ^ (static_cast<std::uint64_t>(purpose) << 56);
    return splitmix64(master_seed ^ splitmix64(counter));
}

Rng SeedPlan::substream(std::uint64_t path, StreamPurpose purpose) const {
    return Rng(substream_key(path, purpose));
}

}  // namespace nsdde
