#include <cmath>
#include <set>

#include "helpers.hpp"
#include "nsdde/grid.hpp"
#include "nsdde/noise.hpp"
#include "nsdde/registry.hpp"
#include "nsdde/rng.hpp"

using namespace nsdde;

TEST_CASE("substream keys are distinct") {
    SeedPlan plan{20241019};
    std::set<std::uint64_t> keys;
    for (std::uint64_t path = 0; path < 2000; ++path) {
        for (auto pur : {StreamPurpose::Brownian, StreamPurpose::Jumps, StreamPurpose::Probes}) {
            keys.insert(plan.substream_key(path, pur));
        }
    }
    CHECK(keys.size() == 6000);
    CHECK(SeedPlan{1}.substream_key(0, StreamPurpose::Brownian) !=
          SeedPlan{2}.substream_key(0, StreamPurpose::Brownian));
}

TEST_CASE("brownian increments: shape and determinism") {
    auto g = build_grid(1.0, 2.0, 4, 3);
    SeedPlan plan{99};
    auto a = sample_brownian(g, 2, plan, 5);
    auto b = sample_brownian(g, 2, plan, 5);
    auto c = sample_brownian(g, 2, plan, 6);
    CHECK(a.dim() == 2);
    CHECK(a.n_steps() == 24);
    CHECK(a.step == g.fine_step());
    CHECK(a.increments == b.increments);
    CHECK(a.increments != c.increments);
}

TEST_CASE("brownian increments: variance and shape of the law") {
    auto g = build_grid(1.0, 1.0, 8, 4);
    SeedPlan plan{1234};
    const int n = 10000;
    double s1 = 0, s2 = 0;
    double z1 = 0, z2 = 0, z3 = 0, z4 = 0;
    long nz = 0;
    const double sd = std::sqrt(g.fine_step());
    for (int path = 0; path < n; ++path) {
        auto inc = sample_brownian(g, 1, plan, path);
        double total = inc.increments.sum();
        s1 += total;
        s2 += total * total;
        for (int i = 0; i < inc.n_steps(); ++i) {
            double z = inc.increments(0, i) / sd;
            z1 += z;
            z2 += z * z;
            z3 += z * z * z;
            z4 += z * z * z * z;
            ++nz;
        }
    }
    double mean = s1 / n;
    double var = s2 / n - mean * mean;
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));

    double mz = z1 / nz, vz = z2 / nz - mz * mz;
    double skew = (z3 / nz - 3 * mz * vz - mz * mz * mz) / std::pow(vz, 1.5);
    double kurt = z4 / nz / (vz * vz) - 3.0;
    CHECK(std::abs(skew) < 5 * std::sqrt(6.0 / nz));
    CHECK(std::abs(kurt) < 5 * std::sqrt(24.0 / nz));
}

TEST_CASE("coarsen") {
    BrownianIncrements x;
    x.step = 0.25;
    x.increments.resize(1, 4);
    x.increments << 1.0, 2.0, 3.0, 4.0;
    auto c = coarsen(x, 2);
    CHECK(c.step == 0.5);
    REQUIRE(c.n_steps() == 2);
    CHECK(c.increments(0, 0) == 3.0);
    CHECK(c.increments(0, 1) == 7.0);
    CHECK(coarsen(x, 1).increments == x.increments);
    CHECK_THROWS_CODE(coarsen(x, 3), ErrorCode::IndivisibleFactor);
    CHECK_THROWS_CODE(coarsen(x, 0), ErrorCode::IndivisibleFactor);
}

TEST_CASE("coarsening composes exactly") {
    auto g = build_grid(1.0, 2.0, 6, 12);
    SeedPlan plan{5};
    for (std::uint64_t path = 0; path < 50; ++path) {
        auto inc = sample_brownian(g, 2, plan, path);
        for (auto [a, b] : {std::pair{2, 3}, std::pair{3, 4}, std::pair{4, 3}, std::pair{6, 2}}) {
            REQUIRE(coarsen(coarsen(inc, a), b).increments == coarsen(inc, a * b).increments);
        }
    }
}

TEST_CASE("jump streams") {
    auto g = build_grid(1.0, 1.0, 4);
    SeedPlan plan{77};

    CHECK_THROWS_CODE(sample_jumps(g, make_model("gbm"), plan, 0), ErrorCode::NoJumpPart);

    auto none = make_model("jump-remark-1.2", {{"lambda", 0.0}});
    for (std::uint64_t p = 0; p < 20; ++p) CHECK(sample_jumps(g, none, plan, p).size() == 0);

    auto model = make_model("jump-remark-1.2");  // lambda = 2, T = 1
    auto a = sample_jumps(g, model, plan, 3);
    auto b = sample_jumps(g, model, plan, 3);
    CHECK(a.times == b.times);
    CHECK(a.marks == b.marks);

    const int n = 10000;
    double s = 0, s2 = 0, early = 0;
    for (int p = 0; p < n; ++p) {
        auto js = sample_jumps(g, model, plan, p);
        double k = static_cast<double>(js.size());
        s += k;
        s2 += k * k;
        for (std::size_t i = 0; i < js.size(); ++i) {
            REQUIRE(js.times[i] > 0.0);
            REQUIRE(js.times[i] <= 1.0);
            if (i > 0) REQUIRE(js.times[i] > js.times[i - 1]);
            REQUIRE(std::abs(js.marks[i]) <= 1.0);
            if (js.times[i] <= 0.5) early += 1;
        }
    }
    double mean = s / n;
    double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 2.0) < 3 * se);
    // Poisson(1) count on (0, 0.5].
    CHECK(std::abs(early / n - 1.0) < 3 * std::sqrt(1.0 / n));
}
