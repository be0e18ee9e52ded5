#include <algorithm>
#include <cstdlib>
#include <string>

#include "nsdde/path_kernels.hpp"

namespace nsdde {

PathResults run_paths_serial(std::size_t n_paths, PathLayout layout, const PathFn& fn) {
    PathResults out;
    out.n_paths = n_paths;
    out.layout = layout;
    out.samples.assign(n_paths * layout.samples_per_path, 0.0);
    out.accum.assign(layout.accum_width, 0.0);

    std::vector<double> block(layout.accum_width);
    for (std::size_t start = 0; start < n_paths; start += kBlockPaths) {
        std::fill(block.begin(), block.end(), 0.0);
        const std::size_t end = std::min(n_paths, start + kBlockPaths);
        for (std::size_t path = start; path < end; ++path) {
            fn(path,
               std::span<double>(out.samples.data() + path * layout.samples_per_path,
                                 layout.samples_per_path),
               block);
        }
        for (std::size_t i = 0; i < block.size(); ++i) out.accum[i] += block[i];
    }
    return out;
}

PathResults run_paths(std::size_t n_paths, PathLayout layout, const PathFn& fn, int workers) {
    if (workers == 1) return run_paths_serial(n_paths, layout, fn);
    return run_paths_parallel(n_paths, layout, fn, workers);
}

int default_workers() {
    if (const char* env = std::getenv("NSDDE_WORKERS")) {
        try {
            return std::max(0, std::stoi(env));
        } catch (...) {
            return 0;
        }
    }
    return 0;
}

}  // namespace nsdde
