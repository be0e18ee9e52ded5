#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nsdde {

/// Paths are grouped in fixed-size blocks; each block sums its accumulator in
/// path order and blocks are merged in block order. The result therefore
/// depends only on the path count, never on the thread count.
inline constexpr std::size_t kBlockPaths = 32;

struct PathLayout {
    std::size_t samples_per_path = 0;  // per-path scalars kept individually
    std::size_t accum_width = 0;       // per-node sums reduced across paths
};

/// Simulates one path. `samples` is this path's row; `accum` is the block's
/// running sum, to be added into (not overwritten).
using PathFn =
    std::function<void(std::uint64_t path, std::span<double> samples, std::span<double> accum)>;

struct PathResults {
    std::size_t n_paths = 0;
    PathLayout layout;
    std::vector<double> samples;  // n_paths x samples_per_path, row-major
    std::vector<double> accum;

    std::span<const double> row(std::size_t path) const {
        return {samples.data() + path * layout.samples_per_path, layout.samples_per_path};
    }
};

/// Reference implementation: one thread, blocks in order.
PathResults run_paths_serial(std::size_t n_paths, PathLayout layout, const PathFn& fn);

/// OpenMP implementation. `workers` <= 0 uses the OpenMP default. Bitwise
/// identical to run_paths_serial for any worker count.
PathResults run_paths_parallel(std::size_t n_paths, PathLayout layout, const PathFn& fn,
                               int workers);

/// Dispatches to the serial kernel when `workers == 1`.
PathResults run_paths(std::size_t n_paths, PathLayout layout, const PathFn& fn, int workers);

/// Worker count from NSDDE_WORKERS, or 0 (OpenMP default) when unset.
int default_workers();

}  // namespace nsdde
