#pragma once

#include <cstdint>
#include <vector>

#include "nsdde/grid.hpp"
#include "nsdde/model.hpp"
#include "nsdde/rng.hpp"
#include "nsdde/types.hpp"

namespace nsdde {

/// Brownian increments on a uniform grid: column i holds B((i+1)dt) - B(i dt).
struct BrownianIncrements {
    double step = 0.0;
    Mat increments;  // dim_noise x n_steps

    int n_steps() const { return static_cast<int>(increments.cols()); }
    int dim() const { return static_cast<int>(increments.rows()); }
};

/// Jump times in (0, T], strictly increasing, with their marks.
struct JumpStream {
    std::vector<double> times;
    std::vector<double> marks;
    double total_intensity = 0.0;

    std::size_t size() const { return times.size(); }
};

/// Increments are rounded to multiples of 2^-kIncrementBits. Sums of such
/// values are exact while |sum| < 2^(53 - kIncrementBits), so coarsening is
/// associative bit-for-bit and every resolution sees the same Brownian path.
inline constexpr int kIncrementBits = 40;

/// Draws N(0, fine_step) increments for every fine step of the grid. The
/// normal variates come from std::normal_distribution on a per-path
/// std::mt19937_64 substream, so results are reproducible per (build, seed).
BrownianIncrements sample_brownian(const TimeGrid& grid, int dim_noise, const SeedPlan& plan,
                                   std::uint64_t path);

/// Sums consecutive blocks of `factor` increments.
BrownianIncrements coarsen(const BrownianIncrements& inc, int factor);

/// Poisson(lambda * T) jump count, times as sorted uniforms on (0, T], marks
/// from the model's mark sampler.
JumpStream sample_jumps(const TimeGrid& grid, const NeutralModel& model, const SeedPlan& plan,
                        std::uint64_t path);

}  // namespace nsdde
