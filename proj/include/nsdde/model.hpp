#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>

#include "nsdde/types.hpp"

namespace nsdde {

using Rng = std::mt19937_64;

/// Growth constants of the polynomial Lipschitz conditions. They are declared
/// by the model author; validate_assumptions only spot-checks them.
struct GrowthConstants {
    double L = 0.0;   // neutral term and drift/diffusion constant
    double q = 1.0;   // polynomial exponent on the delayed argument, q >= 1
    double L0 = 0.0;  // jump coefficient constant
    double r = 1.0;   // mark exponent in the jump bound, r > 0
};

/// Finite-activity compensated Poisson driver.
struct JumpPart {
    std::function<Vec(const Vec& x, const Vec& y, double mark)> g;
    /// Must equal the integral of g(x, y, u) against the intensity measure.
    std::function<Vec(const Vec& x, const Vec& y)> compensator;
    double total_intensity = 0.0;
    std::function<double(Rng&)> mark_sampler;
};

/// d[X(t) - G(X(t - tau))] = b(X(t), X(t - tau)) dt + sigma(...) dB(t)
/// or, for jump models, + int_U g(X(t-), X((t - tau)-), u) N~(du, dt).
/// At most one of `diffusion` and `jump` is set; neither means a
/// deterministic neutral equation.
struct NeutralModel {
    std::string name;
    int dim_state = 1;
    int dim_noise = 1;
    std::function<Vec(const Vec& y)> neutral;
    std::function<Vec(const Vec& x, const Vec& y)> drift;
    std::optional<std::function<Mat(const Vec& x, const Vec& y)>> diffusion;
    std::optional<JumpPart> jump;
    GrowthConstants growth;

    bool has_diffusion() const { return diffusion.has_value(); }
    bool has_jump() const { return jump.has_value(); }

    /// Throws InvalidArgument on missing coefficients or when both drivers are set.
    void check() const;
};

/// Initial data xi on [-tau, 0].
struct InitialSegment {
    std::function<Vec(double theta)> xi;
    double lipschitz_L = 0.0;
    double tau = 1.0;
};

Vec eval_segment(const InitialSegment& seg, double theta);

InitialSegment constant_segment(const Vec& value, double tau);
/// xi(theta) = value + slope * theta, componentwise.
InitialSegment linear_segment(const Vec& value, const Vec& slope, double tau);

}  // namespace nsdde
