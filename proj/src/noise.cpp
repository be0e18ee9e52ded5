#include "nsdde/noise.hpp"

#include <algorithm>
#include <cmath>

#include "nsdde/error.hpp"

namespace nsdde {

BrownianIncrements sample_brownian(const TimeGrid& grid, int dim_noise, const SeedPlan& plan,
                                   std::uint64_t path) {
    BrownianIncrements out;
    out.step = grid.fine_step();
    out.increments.resize(dim_noise, grid.fine_steps());
    Rng rng = plan.substream(path, StreamPurpose::Brownian);
    std::normal_distribution<double> normal(0.0, std::sqrt(out.step));
    double* data = out.increments.data();
    for (Eigen::Index i = 0; i < out.increments.size(); ++i) {
        data[i] = std::ldexp(std::nearbyint(std::ldexp(normal(rng), kIncrementBits)),
                             -kIncrementBits);
    }
    return out;
}

BrownianIncrements coarsen(const BrownianIncrements& inc, int factor) {
    if (factor < 1 || inc.n_steps() % factor != 0) {
        throw Error(ErrorCode::IndivisibleFactor, "factor " + std::to_string(factor) +
                                                      " does not divide " +
                                                      std::to_string(inc.n_steps()) + " steps");
    }
    BrownianIncrements out;
    out.step = inc.step * factor;
    const int n = inc.n_steps() / factor;
    out.increments.resize(inc.dim(), n);
    for (int k = 0; k < n; ++k) {
        auto col = out.increments.col(k);
        col = inc.increments.col(k * factor);
        for (int j = 1; j < factor; ++j) col += inc.increments.col(k * factor + j);
    }
    return out;
}

JumpStream sample_jumps(const TimeGrid& grid, const NeutralModel& model, const SeedPlan& plan,
                        std::uint64_t path) {
    if (!model.jump) throw Error(ErrorCode::NoJumpPart, model.name + " has no jump part");
    const auto& jp = *model.jump;
    JumpStream out;
    out.total_intensity = jp.total_intensity;
    const double mean = jp.total_intensity * grid.T;
    if (mean <= 0.0) return out;

    Rng rng = plan.substream(path, StreamPurpose::Jumps);
    const auto count = std::poisson_distribution<long>(mean)(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    out.times.resize(count);
    for (auto& t : out.times) t = grid.T * (1.0 - unit(rng));  // (0, T]
    std::sort(out.times.begin(), out.times.end());
    for (std::size_t i = 1; i < out.times.size(); ++i) {
        if (out.times[i] <= out.times[i - 1]) {
            out.times[i] = std::nextafter(out.times[i - 1], grid.T + 1.0);
        }
    }
    out.marks.resize(count);
    for (auto& u : out.marks) u = jp.mark_sampler(rng);
    return out;
}

}  // namespace nsdde
