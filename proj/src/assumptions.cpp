#include "nsdde/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsdde/rng.hpp"

namespace nsdde {
namespace {

double ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double poly_weight(const Vec& y, const Vec& ybar, double q) {
    return 1.0 + std::pow(y.norm(), q) + std::pow(ybar.norm(), q);
}

AssumptionCheck finish(std::string id, int probes, double max_ratio, double slack) {
    return {std::move(id), probes, max_ratio, max_ratio <= 1.0 + slack};
}

}  // namespace

bool AssumptionReport::all_pass() const {
    return std::all_of(checked.begin(), checked.end(), [](const auto& c) { return c.pass; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& id) const {
    for (const auto& c : checked) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

AssumptionReport validate_assumptions(const NeutralModel& model, const InitialSegment& seg,
                                      int probes, double slack, std::uint64_t seed, double box) {
    probes = std::max(probes, 1);
    const int n = model.dim_state;
    const auto& c = model.growth;

    SeedPlan plan{seed};
    Rng rng = plan.substream(0, StreamPurpose::Probes);
    std::uniform_real_distribution<double> coord(-box, box);
    std::uniform_real_distribution<double> delay(-seg.tau, 0.0);
    auto draw = [&] {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = coord(rng);
        return v;
    };

    AssumptionReport report;

    double a1 = 0.0;
    for (int i = 0; i < probes; ++i) {
        Vec y = draw(), ybar = draw();
        double lhs = (model.neutral(y) - model.neutral(ybar)).norm();
        double rhs = c.L * poly_weight(y, ybar, c.q) * (y - ybar).norm();
        a1 = std::max(a1, ratio(lhs, rhs));
    }
    report.checked.push_back(finish("A1", probes, a1, slack));

    double a2 = 0.0;
    for (int i = 0; i < probes; ++i) {
        Vec x = draw(), xbar = draw(), y = draw(), ybar = draw();
        double lhs = (model.drift(x, y) - model.drift(xbar, ybar)).norm();
        if (model.diffusion) {
            lhs += ((*model.diffusion)(x, y) - (*model.diffusion)(xbar, ybar)).norm();
        }
        double rhs = c.L * (x - xbar).norm() + c.L * poly_weight(y, ybar, c.q) * (y - ybar).norm();
        a2 = std::max(a2, ratio(lhs, rhs));
    }
    report.checked.push_back(finish("A2", probes, a2, slack));

    double a3 = 0.0;
    for (int i = 0; i < probes; ++i) {
        double s = delay(rng), t = delay(rng);
        double lhs = (seg.xi(s) - seg.xi(t)).norm();
        a3 = std::max(a3, ratio(lhs, seg.lipschitz_L * std::abs(s - t)));
    }
    report.checked.push_back(finish("A3", probes, a3, slack));

    if (model.jump) {
        const auto& jp = *model.jump;
        const Vec zero = Vec::Zero(n);
        double a4 = 0.0;
        for (int i = 0; i < probes; ++i) {
            Vec x = draw(), xbar = draw(), y = draw(), ybar = draw();
            double u = jp.mark_sampler(rng);
            double mark_weight = std::pow(std::abs(u), c.r);
            double lhs = (jp.g(x, y, u) - jp.g(xbar, ybar, u)).norm();
            double rhs = c.L0 *
                         ((x - xbar).norm() + poly_weight(y, ybar, c.q) * (y - ybar).norm()) *
                         mark_weight;
            a4 = std::max(a4, ratio(lhs, rhs));
            a4 = std::max(a4, ratio(jp.g(zero, zero, u).norm(), mark_weight));
        }
        report.checked.push_back(finish("A4", probes, a4, slack));
    }
    return report;
}

}  // namespace nsdde
