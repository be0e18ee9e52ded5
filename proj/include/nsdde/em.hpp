#pragma once

#include "nsdde/grid.hpp"
#include "nsdde/model.hpp"
#include "nsdde/noise.hpp"
#include "nsdde/types.hpp"

namespace nsdde {

enum class NodeSet { CoarseDiscrete, FineContinuous };

/// State trajectory on a grid, history included. Column `node - first_node`
/// holds the state at node index `node`; node times are grid.node(k) for the
/// coarse set and grid.fine_node(j) for the fine set.
///
/// Once a non-finite value shows up the path is flagged exploded and every
/// later column is NaN.
struct EmPath {
    TimeGrid grid;
    NodeSet nodes = NodeSet::CoarseDiscrete;
    int first_node = 0;  // -m or -m*refine
    int last_node = 0;   // M or M*refine
    Mat values;          // dim_state x (last_node - first_node + 1)
    bool exploded = false;

    auto at(int node) const { return values.col(node - first_node); }
    auto at(int node) { return values.col(node - first_node); }
    double time(int node) const {
        return nodes == NodeSet::CoarseDiscrete ? grid.node(node) : grid.fine_node(node);
    }
    /// Nodes per coarse step: 1 for the discrete set, refine for the fine set.
    int stride() const { return nodes == NodeSet::CoarseDiscrete ? 1 : grid.refine; }
};

/// Explicit neutral EM recursion on the coarse nodes:
///   Y(k+1) = G(Y(k+1-m)) + Y(k) - G(Y(k-m)) + b(Y(k), Y(k-m)) h + sigma(Y(k), Y(k-m)) dB(k).
/// `inc` must hold one increment per coarse step. A model without a diffusion
/// coefficient is integrated with sigma = 0.
EmPath em_discrete_brownian(const NeutralModel& model, const InitialSegment& seg,
                            const TimeGrid& grid, const BrownianIncrements& inc);

/// Continuous-time interpolant on the fine nodes:
///   Y(t) = G(Ybar(t - tau)) + xi(0) - G(xi(-tau)) + int_0^t b(Ybar) ds + int_0^t sigma(Ybar) dB
/// with Ybar the piecewise-constant discrete path. `fine_inc` holds one
/// increment per fine step; the discrete path is driven by their coarse sums.
EmPath em_continuous_brownian(const NeutralModel& model, const InitialSegment& seg,
                              const TimeGrid& grid, const BrownianIncrements& fine_inc);

/// Jump analogue of the discrete recursion. The noise term of step k is
///   sum over jumps t_i in (kh, (k+1)h] of g(Y(k), Y(k-m), u_i) - h * compensator(Y(k), Y(k-m)).
EmPath em_discrete_jump(const NeutralModel& model, const InitialSegment& seg, const TimeGrid& grid,
                        const JumpStream& jumps);

/// Jump analogue of the interpolant. A jump at t contributes to every fine node
/// t_j >= t, evaluated at the left limit of Ybar.
EmPath em_continuous_jump(const NeutralModel& model, const InitialSegment& seg,
                          const TimeGrid& grid, const JumpStream& jumps);

/// Exact solution of the noise-free, drift-free neutral equation
///   X(t) = xi(0) - G(xi(-tau)) + G(X(t - tau)),
/// unrolled one delay interval at a time on the fine nodes.
EmPath neutral_recursion_oracle(const NeutralModel& model, const InitialSegment& seg,
                                const TimeGrid& grid);

/// Geometric Brownian motion x0 * exp((mu - sig^2 / 2) t + sig B(t)) on the
/// fine nodes, with B the running sum of `fine_inc` (first row).
EmPath gbm_exact(double mu, double sig, double x0, const TimeGrid& grid,
                 const BrownianIncrements& fine_inc);

/// Ybar at every fine node: the discrete value of the coarse step the node
/// starts in. Returns a fine-continuous path.
EmPath piecewise_constant(const EmPath& discrete);

}  // namespace nsdde
