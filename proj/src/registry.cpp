#include "nsdde/registry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsdde/error.hpp"

namespace nsdde {
namespace {

Vec scalar(double v) { return Vec::Constant(1, v); }

Mat scalar_matrix(double v) { return Mat::Constant(1, 1, v); }

/// y^q for real q, keeping the sign of y when q is not an integer.
double signed_pow(double y, double q) {
    if (q == std::floor(q)) return std::pow(y, q);
    return std::copysign(std::pow(std::abs(y), q), y);
}

NeutralModel paper_eq_1_1(const ParamMap& p) {
    double a = p.at("a"), b = p.at("b"), c = p.at("c");
    NeutralModel model;
    model.name = "paper-eq-1.1";
    model.neutral = [](const Vec& y) { return scalar(y[0] * y[0]); };
    model.drift = [a, b](const Vec& x, const Vec& y) {
        return scalar(a * x[0] + b * y[0] * y[0] * y[0]);
    };
    model.diffusion = [c](const Vec&, const Vec& y) { return scalar_matrix(c * y[0] * y[0]); };
    // |y^3 - ybar^3| <= 1.5 (y^2 + ybar^2) |y - ybar|
    model.growth = {std::max({1.0, std::abs(a), 1.5 * std::abs(b) + std::abs(c)}), 2.0, 0.0, 1.0};
    return model;
}

NeutralModel remark_1_1(const ParamMap& p) {
    double a = p.at("a");
    NeutralModel model;
    model.name = "remark-1.1";
    model.neutral = [](const Vec& y) { return scalar(y[0] * y[0]); };
    model.drift = [a](const Vec& x, const Vec& y) { return scalar(a * x[0] + y[0] * y[0] * y[0]); };
    model.diffusion = [a](const Vec& x, const Vec& y) {
        return scalar_matrix(a * x[0] + y[0] * y[0] * y[0]);
    };
    model.growth = {std::max({1.0, 2.0 * std::abs(a), 3.0}), 2.0, 0.0, 1.0};
    return model;
}

NeutralModel jump_remark_1_2(const ParamMap& p) {
    double a = p.at("a"), b = p.at("b"), g2 = p.at("g2"), q = p.at("q");
    double lambda = p.at("lambda"), center = p.at("mark_center"), width = p.at("mark_half_width");
    if (q < 1.0) throw Error(ErrorCode::InvalidArgument, "jump-remark-1.2: q must be >= 1");
    if (!(width >= 0.0) || !(lambda >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "jump-remark-1.2: lambda and mark_half_width must be >= 0");
    }
    NeutralModel model;
    model.name = "jump-remark-1.2";
    model.neutral = [g2](const Vec& y) { return scalar(g2 * y[0] * y[0]); };
    model.drift = [a, b](const Vec& x, const Vec& y) {
        return scalar(a * x[0] + b * y[0] * y[0] * y[0]);
    };
    JumpPart jp;
    jp.g = [q](const Vec& x, const Vec& y, double u) {
        return scalar((x[0] + signed_pow(y[0], q)) * u);
    };
    // int (x + y^q) u lambda(du) = (x + y^q) * lambda * E[u]
    jp.compensator = [q, lambda, center](const Vec& x, const Vec& y) {
        return scalar((x[0] + signed_pow(y[0], q)) * lambda * center);
    };
    jp.total_intensity = lambda;
    jp.mark_sampler = [lo = center - width, hi = center + width](Rng& rng) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    };
    model.jump = std::move(jp);
    double q_model = std::max(2.0, q);
    model.growth = {std::max({std::abs(g2), std::abs(a), 3.0 * std::abs(b)}), q_model,
                    std::max(1.0, q), 1.0};
    return model;
}

NeutralModel gbm(const ParamMap& p) {
    double mu = p.at("mu"), sigma = p.at("sigma");
    NeutralModel model;
    model.name = "gbm";
    model.neutral = [](const Vec&) { return scalar(0.0); };
    model.drift = [mu](const Vec& x, const Vec&) { return scalar(mu * x[0]); };
    model.diffusion = [sigma](const Vec& x, const Vec&) { return scalar_matrix(sigma * x[0]); };
    model.growth = {std::max(std::abs(mu) + std::abs(sigma), 1e-12), 1.0, 0.0, 1.0};
    return model;
}

NeutralModel additive(const ParamMap& p) {
    double beta = p.at("beta"), sigma = p.at("sigma");
    NeutralModel model;
    model.name = "additive";
    model.neutral = [](const Vec&) { return scalar(0.0); };
    model.drift = [beta](const Vec&, const Vec&) { return scalar(beta); };
    model.diffusion = [sigma](const Vec&, const Vec&) { return scalar_matrix(sigma); };
    model.growth = {1.0, 1.0, 0.0, 1.0};
    return model;
}

NeutralModel neutral_deterministic(const ParamMap& p) {
    double k = p.at("gcoef");
    NeutralModel model;
    model.name = "neutral-deterministic";
    model.neutral = [k](const Vec& y) { return scalar(k * y[0] * y[0]); };
    model.drift = [](const Vec&, const Vec&) { return scalar(0.0); };
    model.growth = {std::max(std::abs(k), 1e-12), 2.0, 0.0, 1.0};
    return model;
}

double fixed_scale(const ParamMap&) { return 0.1; }
double x0_scale(const ParamMap& p) { return p.at("x0"); }

}  // namespace

const std::vector<ModelEntry>& model_registry() {
    static const std::vector<ModelEntry> entries = {
        {"paper-eq-1.1",
         "d[X(t) - X(t-tau)^2] = (a X(t) + b X(t-tau)^3) dt + c X(t-tau)^2 dB(t)",
         {{"a", -0.5}, {"b", 0.1}, {"c", 2.0}}, paper_eq_1_1, [](const ParamMap&) { return 0.5; }},
        {"remark-1.1", "G(y) = y^2, b(x,y) = sigma(x,y) = a x + y^3", {{"a", -1.0}},
         remark_1_1, fixed_scale},
        {"jump-remark-1.2",
         "G(y) = g2 y^2, b(x,y) = a x + b y^3, jumps g(x,y,u) = (x + y^q) u, "
         "marks uniform on [mark_center -/+ mark_half_width] at rate lambda",
         {{"a", -2.0},
          {"b", 0.1},
          {"g2", 0.1},
          {"q", 2.0},
          {"lambda", 2.0},
          {"mark_center", 0.0},
          {"mark_half_width", 1.0}},
         jump_remark_1_2, fixed_scale},
        {"gbm", "dX = mu X dt + sigma X dB (no delay, G = 0)",
         {{"mu", -1.0}, {"sigma", 0.5}, {"x0", 1.0}}, gbm, x0_scale},
        {"additive", "dX = beta dt + sigma dB (G = 0); EM is exact",
         {{"beta", 1.0}, {"sigma", 0.5}, {"x0", 0.1}}, additive, x0_scale},
        {"neutral-deterministic", "d[X(t) - gcoef X(t-tau)^2] = 0",
         {{"gcoef", 1.0}, {"x0", 0.1}}, neutral_deterministic, x0_scale},
    };
    return entries;
}

const ModelEntry& find_model(const std::string& id) {
    for (const auto& e : model_registry()) {
        if (e.id == id) return e;
    }
    throw Error(ErrorCode::UnknownModel, "no model registered as '" + id + "'");
}

ParamMap resolve_params(const ModelEntry& entry, const ParamMap& overrides) {
    ParamMap out = entry.defaults;
    for (const auto& [key, value] : overrides) {
        auto it = out.find(key);
        if (it == out.end()) {
            throw Error(ErrorCode::SchemaError,
                        "model." + entry.id + ": unknown parameter '" + key + "'");
        }
        it->second = value;
    }
    return out;
}

NeutralModel make_model(const std::string& id, const ParamMap& overrides) {
    const auto& entry = find_model(id);
    NeutralModel model = entry.make(resolve_params(entry, overrides));
    model.check();
    return model;
}

InitialSegment make_segment(const SegmentSpec& spec, int dim_state, double tau) {
    Vec value = Vec::Constant(dim_state, spec.scale);
    if (spec.kind == "constant") return constant_segment(value, tau);
    if (spec.kind == "linear") return linear_segment(value, Vec::Constant(dim_state, spec.slope), tau);
    if (spec.kind == "cosine") {
        double w = std::numbers::pi / tau;
        return {[value, w](double theta) -> Vec { return value * std::cos(w * theta); },
                value.norm() * w, tau};
    }
    throw Error(ErrorCode::SchemaError, "model.segment.kind: unknown kind '" + spec.kind + "'");
}

std::vector<std::string> segment_kinds() { return {"constant", "linear", "cosine"}; }

}  // namespace nsdde
