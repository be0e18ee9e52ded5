#include "nsdde/model.hpp"

#include <cmath>
#include <sstream>

#include "nsdde/error.hpp"

namespace nsdde {

void NeutralModel::check() const {
    if (dim_state < 1) throw Error(ErrorCode::InvalidArgument, name + ": dim_state must be >= 1");
    if (!neutral || !drift) {
        throw Error(ErrorCode::InvalidArgument, name + ": neutral and drift terms are required");
    }
    if (diffusion && jump) {
        throw Error(ErrorCode::InvalidArgument,
                    name + ": a model is driven by Brownian motion or by jumps, not both");
    }
    if (diffusion && dim_noise < 1) {
        throw Error(ErrorCode::InvalidArgument, name + ": dim_noise must be >= 1");
    }
    if (jump) {
        if (!jump->g || !jump->compensator || !jump->mark_sampler) {
            throw Error(ErrorCode::InvalidArgument, name + ": incomplete jump part");
        }
        if (!(jump->total_intensity >= 0.0) || !std::isfinite(jump->total_intensity)) {
            throw Error(ErrorCode::InvalidArgument,
                        name + ": total jump intensity must be finite and >= 0");
        }
    }
    if (growth.q < 1.0 || growth.L < 0.0 || growth.L0 < 0.0 || !(growth.r > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, name + ": growth constants out of range");
    }
}

Vec eval_segment(const InitialSegment& seg, double theta) {
    if (!(theta >= -seg.tau && theta <= 0.0)) {
        std::ostringstream os;
        os << "theta=" << theta << " outside [-" << seg.tau << ", 0]";
        throw Error(ErrorCode::OutOfDomain, os.str());
    }
    return seg.xi(theta);
}

InitialSegment constant_segment(const Vec& value, double tau) {
    return {[value](double) { return value; }, 0.0, tau};
}

InitialSegment linear_segment(const Vec& value, const Vec& slope, double tau) {
    return {[value, slope](double theta) -> Vec { return value + slope * theta; },
            slope.norm(), tau};
}

}  // namespace nsdde
