#include <algorithm>
#include <exception>
#include <mutex>

#include <omp.h>

#include "nsdde/path_kernels.hpp"

namespace nsdde {

PathResults run_paths_parallel(std::size_t n_paths, PathLayout layout, const PathFn& fn,
                               int workers) {
    PathResults out;
    out.n_paths = n_paths;
    out.layout = layout;
    out.samples.assign(n_paths * layout.samples_per_path, 0.0);
    out.accum.assign(layout.accum_width, 0.0);

    const auto n_blocks = static_cast<long>((n_paths + kBlockPaths - 1) / kBlockPaths);
    // one accumulator per block, merged in block order afterwards
    std::vector<double> blocks(static_cast<std::size_t>(n_blocks) * layout.accum_width, 0.0);
    const int threads = workers > 0 ? workers : omp_get_max_threads();

    std::exception_ptr failure;
    std::mutex failure_lock;

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long b = 0; b < n_blocks; ++b) {
        try {
            std::span<double> acc(blocks.data() + b * layout.accum_width, layout.accum_width);
            const std::size_t start = static_cast<std::size_t>(b) * kBlockPaths;
            const std::size_t end = std::min(n_paths, start + kBlockPaths);
            for (std::size_t path = start; path < end; ++path) {
                fn(path,
                   std::span<double>(out.samples.data() + path * layout.samples_per_path,
                                     layout.samples_per_path),
                   acc);
            }
        } catch (...) {
            std::lock_guard lock(failure_lock);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (long b = 0; b < n_blocks; ++b) {
        const double* acc = blocks.data() + b * layout.accum_width;
        for (std::size_t i = 0; i < layout.accum_width; ++i) out.accum[i] += acc[i];
    }
    return out;
}

}  // namespace nsdde
