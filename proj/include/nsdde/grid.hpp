#pragma once

#include <cstdint>

namespace nsdde {

/// Uniform grid on [-tau, T] with step h = tau / m and a nested fine grid of
/// step h / refine. Node times are always index * step, never accumulated.
struct TimeGrid {
    double tau = 0.0;
    double T = 0.0;
    int m = 0;       // steps per delay
    int M = 0;       // steps on [0, T]
    int refine = 1;  // fine steps per coarse step
    double h = 0.0;

    double fine_step() const { return h / refine; }
    int fine_steps() const { return M * refine; }
    int fine_history() const { return m * refine; }

    /// Coarse node time k*h, k in [-m, M].
    double node(int k) const { return k * h; }

    /// Fine node time; the coarse part is k*h so that node(k) == fine_node(k*refine)
    /// holds bit-for-bit.
    double fine_node(int j) const;

    /// Index k of the coarse step (kh, (k+1)h] containing t > 0.
    int step_containing(double t) const;

    /// Index j of the fine step (j*dt, (j+1)*dt] containing t > 0.
    int fine_step_containing(double t) const;
};

TimeGrid build_grid(double tau, double T, int m, int refine = 1);

}  // namespace nsdde
