#include "nsdde/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nsdde/error.hpp"

namespace nsdde {
namespace {

EmPath make_path(const TimeGrid& grid, NodeSet nodes, int dim) {
    EmPath p;
    p.grid = grid;
    p.nodes = nodes;
    const int stride = nodes == NodeSet::CoarseDiscrete ? 1 : grid.refine;
    p.first_node = -grid.m * stride;
    p.last_node = grid.M * stride;
    p.values.resize(dim, p.last_node - p.first_node + 1);
    return p;
}

/// History nodes take xi at their time, clamped into [-tau, 0] so that
/// -m*h rounding never leaves the segment's domain.
void fill_history(EmPath& p, const InitialSegment& seg) {
    for (int k = p.first_node; k <= 0; ++k) {
        double t = std::clamp(p.time(k), -seg.tau, 0.0);
        p.at(k) = seg.xi(t);
    }
}

/// Flags the path from its first non-finite column on t >= 0 and blanks the rest.
void mark_explosion(EmPath& p) {
    for (int k = 0; k <= p.last_node; ++k) {
        if (!p.at(k).allFinite()) {
            p.exploded = true;
            for (int j = k; j <= p.last_node; ++j) {
                p.at(j).setConstant(std::numeric_limits<double>::quiet_NaN());
            }
            return;
        }
    }
}

void require_jump(const NeutralModel& model) {
    if (!model.jump) throw Error(ErrorCode::NoJumpPart, model.name + " has no jump part");
}

void require_dims(const NeutralModel& model, const InitialSegment& seg, const TimeGrid& grid) {
    if (std::abs(seg.tau - grid.tau) > 1e-12 * grid.tau) {
        throw Error(ErrorCode::InvalidArgument, "segment and grid disagree on tau");
    }
    if (seg.xi(0.0).size() != model.dim_state) {
        throw Error(ErrorCode::InvalidArgument, "segment dimension differs from dim_state");
    }
}

void require_increments(const NeutralModel& model, const BrownianIncrements& inc, int n_steps) {
    if (inc.n_steps() != n_steps) {
        throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(n_steps) +
                                                    " increments, got " +
                                                    std::to_string(inc.n_steps()));
    }
    if (model.diffusion && inc.dim() != model.dim_noise) {
        throw Error(ErrorCode::InvalidArgument, "increment dimension differs from dim_noise");
    }
}

/// Jumps grouped by the coarse step (kh, (k+1)h] they fall in; offsets[k] is
/// the index of the first jump of step k.
std::vector<std::size_t> bin_jumps(const JumpStream& jumps, const TimeGrid& grid) {
    std::vector<int> step;
    step.reserve(jumps.size());
    for (double t : jumps.times) {
        if (t > grid.T) break;
        step.push_back(grid.step_containing(t));
    }
    std::vector<std::size_t> offsets(grid.M + 1);
    for (int k = 0; k <= grid.M; ++k) {
        offsets[k] = static_cast<std::size_t>(std::lower_bound(step.begin(), step.end(), k) -
                                              step.begin());
    }
    return offsets;
}

}  // namespace

EmPath em_discrete_brownian(const NeutralModel& model, const InitialSegment& seg,
                            const TimeGrid& grid, const BrownianIncrements& inc) {
    require_dims(model, seg, grid);
    require_increments(model, inc, grid.M);
    EmPath p = make_path(grid, NodeSet::CoarseDiscrete, model.dim_state);
    fill_history(p, seg);

    const int m = grid.m;
    Vec g_lag = model.neutral(p.at(-m));  // G(Y(k-m))
    for (int k = 0; k < grid.M; ++k) {
        const Vec yk = p.at(k);
        const Vec ykm = p.at(k - m);
        Vec g_next = model.neutral(p.at(k + 1 - m));
        Vec next = g_next + (yk - g_lag) + model.drift(yk, ykm) * grid.h;
        if (model.diffusion) next += (*model.diffusion)(yk, ykm) * inc.increments.col(k);
        p.at(k + 1) = next;
        if (!next.allFinite()) break;
        g_lag = std::move(g_next);
    }
    mark_explosion(p);
    return p;
}

EmPath em_continuous_brownian(const NeutralModel& model, const InitialSegment& seg,
                              const TimeGrid& grid, const BrownianIncrements& fine_inc) {
    require_dims(model, seg, grid);
    require_increments(model, fine_inc, grid.fine_steps());
    const EmPath disc = em_discrete_brownian(model, seg, grid, coarsen(fine_inc, grid.refine));

    EmPath p = make_path(grid, NodeSet::FineContinuous, model.dim_state);
    fill_history(p, seg);

    const int m = grid.m, R = grid.refine;
    const double dt = grid.fine_step();
    const Vec offset = disc.at(0) - model.neutral(disc.at(-m));  // xi(0) - G(xi(-tau))
    Vec integral = Vec::Zero(model.dim_state);
    Vec w(fine_inc.dim());
    for (int k = 0; k < grid.M; ++k) {
        const Vec yk = disc.at(k);
        const Vec ykm = disc.at(k - m);
        const Vec base = model.neutral(ykm) + offset + integral;
        const Vec bk = model.drift(yk, ykm);
        w.setZero();
        if (model.diffusion) {
            const Mat sk = (*model.diffusion)(yk, ykm);
            for (int j = 0; j < R; ++j) {
                p.at(k * R + j) = base + bk * (j * dt) + sk * w;
                w += fine_inc.increments.col(k * R + j);
            }
            integral += bk * grid.h + sk * w;
        } else {
            for (int j = 0; j < R; ++j) p.at(k * R + j) = base + bk * (j * dt);
            integral += bk * grid.h;
        }
    }
    p.at(grid.M * R) = model.neutral(disc.at(grid.M - m)) + offset + integral;
    mark_explosion(p);
    return p;
}

EmPath em_discrete_jump(const NeutralModel& model, const InitialSegment& seg, const TimeGrid& grid,
                        const JumpStream& jumps) {
    require_jump(model);
    require_dims(model, seg, grid);
    const auto& jp = *model.jump;
    const auto offsets = bin_jumps(jumps, grid);

    EmPath p = make_path(grid, NodeSet::CoarseDiscrete, model.dim_state);
    fill_history(p, seg);

    const int m = grid.m;
    Vec g_lag = model.neutral(p.at(-m));
    for (int k = 0; k < grid.M; ++k) {
        const Vec yk = p.at(k);
        const Vec ykm = p.at(k - m);
        Vec noise = -grid.h * jp.compensator(yk, ykm);
        for (std::size_t i = offsets[k]; i < offsets[k + 1]; ++i) {
            noise += jp.g(yk, ykm, jumps.marks[i]);
        }
        Vec g_next = model.neutral(p.at(k + 1 - m));
        Vec next = g_next + (yk - g_lag) + model.drift(yk, ykm) * grid.h + noise;
        p.at(k + 1) = next;
        if (!next.allFinite()) break;
        g_lag = std::move(g_next);
    }
    mark_explosion(p);
    return p;
}

EmPath em_continuous_jump(const NeutralModel& model, const InitialSegment& seg,
                          const TimeGrid& grid, const JumpStream& jumps) {
    require_jump(model);
    require_dims(model, seg, grid);
    const auto& jp = *model.jump;
    const EmPath disc = em_discrete_jump(model, seg, grid, jumps);

    // fine step index of every jump inside (0, T]; a jump in fine step f is
    // first seen at fine node f + 1
    std::vector<int> fine_index;
    fine_index.reserve(jumps.size());
    for (double t : jumps.times) {
        if (t > grid.T) break;
        fine_index.push_back(grid.fine_step_containing(t));
    }

    EmPath p = make_path(grid, NodeSet::FineContinuous, model.dim_state);
    fill_history(p, seg);

    const int m = grid.m, R = grid.refine;
    const double dt = grid.fine_step();
    const Vec offset = disc.at(0) - model.neutral(disc.at(-m));
    Vec integral = Vec::Zero(model.dim_state);
    Vec jumped(model.dim_state);
    std::size_t next_jump = 0;
    for (int k = 0; k < grid.M; ++k) {
        const Vec yk = disc.at(k);
        const Vec ykm = disc.at(k - m);
        const Vec base = model.neutral(ykm) + offset + integral;
        const Vec bk = model.drift(yk, ykm);
        const Vec ck = jp.compensator(yk, ykm);
        jumped.setZero();
        for (int j = 0; j < R; ++j) {
            const int node = k * R + j;
            while (next_jump < fine_index.size() && fine_index[next_jump] < node) {
                jumped += jp.g(yk, ykm, jumps.marks[next_jump]);
                ++next_jump;
            }
            const double s = j * dt;
            p.at(node) = base + bk * s + jumped - ck * s;
        }
        while (next_jump < fine_index.size() && fine_index[next_jump] < (k + 1) * R) {
            jumped += jp.g(yk, ykm, jumps.marks[next_jump]);
            ++next_jump;
        }
        integral += bk * grid.h + jumped - ck * grid.h;
    }
    p.at(grid.M * R) = model.neutral(disc.at(grid.M - m)) + offset + integral;
    mark_explosion(p);
    return p;
}

EmPath neutral_recursion_oracle(const NeutralModel& model, const InitialSegment& seg,
                                const TimeGrid& grid) {
    require_dims(model, seg, grid);
    // spot-check that only the neutral term is active
    const int n = model.dim_state;
    Rng rng(0x5EEDULL);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int i = 0; i < 16; ++i) {
        Vec x(n), y(n);
        for (int c = 0; c < n; ++c) {
            x[c] = coord(rng);
            y[c] = coord(rng);
        }
        bool active = model.drift(x, y).norm() != 0.0;
        if (model.diffusion) active = active || (*model.diffusion)(x, y).norm() != 0.0;
        if (model.jump) {
            active = active || model.jump->compensator(x, y).norm() != 0.0 ||
                     (model.jump->total_intensity > 0.0 &&
                      model.jump->g(x, y, model.jump->mark_sampler(rng)).norm() != 0.0);
        }
        if (active) {
            throw Error(ErrorCode::NotDeterministic,
                        model.name + ": drift, diffusion and jumps must vanish");
        }
    }

    EmPath p = make_path(grid, NodeSet::FineContinuous, n);
    fill_history(p, seg);
    const int lag = grid.m * grid.refine;
    const Vec offset = p.at(0) - model.neutral(p.at(-lag));
    for (int j = 1; j <= p.last_node; ++j) p.at(j) = offset + model.neutral(p.at(j - lag));
    mark_explosion(p);
    return p;
}

EmPath gbm_exact(double mu, double sig, double x0, const TimeGrid& grid,
                 const BrownianIncrements& fine_inc) {
    if (fine_inc.n_steps() != grid.fine_steps()) {
        throw Error(ErrorCode::InvalidArgument, "increments do not match the fine grid");
    }
    EmPath p = make_path(grid, NodeSet::FineContinuous, 1);
    for (int j = p.first_node; j <= 0; ++j) p.at(j)[0] = x0;
    const double drift = mu - 0.5 * sig * sig;
    double b = 0.0;
    for (int j = 1; j <= p.last_node; ++j) {
        b += fine_inc.increments(0, j - 1);
        p.at(j)[0] = x0 * std::exp(drift * grid.fine_node(j) + sig * b);
    }
    mark_explosion(p);
    return p;
}

EmPath piecewise_constant(const EmPath& discrete) {
    const TimeGrid& grid = discrete.grid;
    EmPath p = make_path(grid, NodeSet::FineContinuous, static_cast<int>(discrete.values.rows()));
    const int R = grid.refine;
    for (int j = p.first_node; j <= p.last_node; ++j) {
        int k = j >= 0 ? j / R : -((-j + R - 1) / R);
        p.at(j) = discrete.at(k);
    }
    p.exploded = discrete.exploded;
    return p;
}

}  // namespace nsdde
