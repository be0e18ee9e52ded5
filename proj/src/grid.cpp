#include "nsdde/grid.hpp"

#include <cmath>
#include <sstream>

#include "nsdde/error.hpp"

namespace nsdde {

double TimeGrid::fine_node(int j) const {
    // floor division so negative (history) indices split the same way
    int k = j >= 0 ? j / refine : -((-j + refine - 1) / refine);
    int r = j - k * refine;
    return r == 0 ? k * h : k * h + r * fine_step();
}

int TimeGrid::step_containing(double t) const {
    int k = static_cast<int>(std::ceil(t / h)) - 1;
    while (k > 0 && t <= node(k)) --k;
    while (t > node(k + 1)) ++k;
    return k;
}

int TimeGrid::fine_step_containing(double t) const {
    int j = static_cast<int>(std::ceil(t / fine_step())) - 1;
    while (j > 0 && t <= fine_node(j)) --j;
    while (t > fine_node(j + 1)) ++j;
    return j;
}

TimeGrid build_grid(double tau, double T, int m, int refine) {
    if (!(tau > 0.0) || !(T > 0.0) || m < 1 || refine < 1) {
        std::ostringstream os;
        os << "need tau > 0, T > 0, m >= 1, refine >= 1 (got tau=" << tau << ", T=" << T
           << ", m=" << m << ", refine=" << refine << ")";
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
    TimeGrid g;
    g.tau = tau;
    g.T = T;
    g.m = m;
    g.refine = refine;
    g.h = tau / m;
    if (g.h >= 1.0) {
        throw Error(ErrorCode::StepTooLarge, "h = tau/m must lie in (0, 1)");
    }
    double steps = T / g.h;
    double rounded = std::round(steps);
    if (rounded < 1.0 || std::abs(steps - rounded) > 1e-9 * steps) {
        std::ostringstream os;
        os << "T=" << T << " is not an integer multiple of h=" << g.h;
        throw Error(ErrorCode::NonCommensurate, os.str());
    }
    g.M = static_cast<int>(rounded);
    return g;
}

}  // namespace nsdde
