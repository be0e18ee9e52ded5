#include "nsdde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <tuple>

#include "nsdde/error.hpp"
#include "nsdde/path_kernels.hpp"

namespace nsdde {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_ladder(const StudyOptions& opts, std::span<const int> ps) {
    if (opts.ladder.empty()) throw Error(ErrorCode::InvalidArgument, "empty step ladder");
    for (std::size_t i = 0; i < opts.ladder.size(); ++i) {
        if (opts.ladder[i] < 1 || (i > 0 && opts.ladder[i] <= opts.ladder[i - 1])) {
            throw Error(ErrorCode::NonNestedSteps, "ladder must be strictly increasing and >= 1");
        }
    }
    if (ps.empty()) throw Error(ErrorCode::InvalidArgument, "no moment order given");
    for (int p : ps) {
        if (p < 2) throw Error(ErrorCode::OutOfRange, "moment order p must be >= 2");
    }
    if (opts.n_paths == 0) throw Error(ErrorCode::InvalidArgument, "n_paths must be positive");
    if (opts.refine < 1) throw Error(ErrorCode::InvalidArgument, "refine must be >= 1");
}

void check_nested(std::span<const int> ladder, int m_eval) {
    for (int m : ladder) {
        if (m_eval % m != 0) {
            throw Error(ErrorCode::NonNestedSteps, "step tau/" + std::to_string(m) +
                                                       " does not nest into tau/" +
                                                       std::to_string(m_eval));
        }
    }
}

/// Grids for every ladder step, all sharing the fine grid of `eval`.
std::vector<TimeGrid> rung_grids(const StudyOptions& opts, const TimeGrid& eval) {
    std::vector<TimeGrid> grids;
    for (int m : opts.ladder) {
        grids.push_back(build_grid(opts.tau, opts.T, m, eval.refine * (eval.m / m)));
    }
    return grids;
}

/// Per-path noise: Brownian increments or a jump stream on the evaluation grid.
struct PathNoise {
    BrownianIncrements brownian;
    JumpStream jumps;
};

PathNoise draw_noise(const NeutralModel& model, const TimeGrid& eval, const SeedPlan& plan,
                     std::uint64_t path) {
    PathNoise noise;
    if (model.jump) {
        noise.jumps = sample_jumps(eval, model, plan, path);
    } else {
        noise.brownian = sample_brownian(eval, model.diffusion ? model.dim_noise : 1, plan, path);
    }
    return noise;
}

EmPath continuous_path(const NeutralModel& model, const InitialSegment& seg, const TimeGrid& grid,
                       const PathNoise& noise) {
    if (model.jump) return em_continuous_jump(model, seg, grid, noise.jumps);
    return em_continuous_brownian(model, seg, grid, noise.brownian);
}

void enforce_budget(double exploded_frac, double budget, double h) {
    if (exploded_frac > budget) {
        std::ostringstream os;
        os << "exploded fraction " << exploded_frac << " at h=" << h << " exceeds budget "
           << budget;
        throw Error(ErrorCode::ExplosionBudgetExceeded, os.str());
    }
}

/// Collects column `col` of the sample matrix over non-exploded paths.
std::vector<double> valid_column(const PathResults& res, std::size_t flag_col, std::size_t col) {
    std::vector<double> out;
    out.reserve(res.n_paths);
    for (std::size_t i = 0; i < res.n_paths; ++i) {
        auto row = res.row(i);
        if (row[flag_col] == 0.0) out.push_back(row[col]);
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::pair<double, double> mean_and_stderr(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n == 0) return {kNaN, kNaN};
    double sum = 0.0;
    for (double x : samples) sum += x;
    const double mean = sum / static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

std::vector<std::pair<double, double>> ErrorTable::points() const {
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rows) out.emplace_back(r.h, r.err);
    return out;
}

std::string ErrorTable::to_csv() const {
    std::string out = "h,p,n_paths,err,stderr,exploded_frac\n";
    for (const auto& r : rows) {
        out += format_double(r.h) + ',' + std::to_string(r.p) + ',' + std::to_string(r.n_paths) +
               ',' + format_double(r.err) + ',' + format_double(r.std_error) + ',' +
               format_double(r.exploded_frac) + '\n';
    }
    return out;
}

ErrorTable ErrorTable::from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "h,p,n_paths,err,stderr,exploded_frac") {
        throw Error(ErrorCode::SchemaError, "unexpected error table header");
    }
    ErrorTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw Error(ErrorCode::SchemaError, "bad error table row: " + line);
        ErrorRow r;
        r.h = std::stod(cells[0]);
        r.p = std::stoi(cells[1]);
        r.n_paths = std::stoul(cells[2]);
        r.err = std::stod(cells[3]);
        r.std_error = std::stod(cells[4]);
        r.exploded_frac = std::stod(cells[5]);
        table.rows.push_back(r);
    }
    return table;
}

OrderFit fit_order(std::span<const std::pair<double, double>> points) {
    if (points.size() < 4) {
        throw Error(ErrorCode::DegenerateInput, "order fit needs at least 4 points");
    }
    std::vector<double> x, y;
    for (const auto& [h, err] : points) {
        if (!(h > 0.0) || !(err > 0.0) || !std::isfinite(h) || !std::isfinite(err)) {
            throw Error(ErrorCode::DegenerateInput, "order fit needs positive finite h and err");
        }
        x.push_back(std::log2(h));
        y.push_back(std::log2(err));
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw Error(ErrorCode::DegenerateInput, "all step sizes are equal");

    OrderFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n_points = static_cast<int>(x.size());
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double e = y[i] - (fit.intercept + fit.slope * x[i]);
            ss_res += e * e;
        }
        fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return fit;
}

double theory_rate_jump(int p, double theta, double T, double tau) {
    if (p < 2) throw Error(ErrorCode::OutOfRange, "p must be >= 2");
    if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::OutOfRange, "theta must lie in (0, 1)");
    if (!(T > 0.0) || !(tau > 0.0)) throw Error(ErrorCode::OutOfRange, "T and tau must be positive");
    const double delays = std::floor(T / tau + 1e-9);
    return 1.0 / std::pow(1.0 + theta, delays);
}

std::vector<ErrorTable> coupled_strong_error(const NeutralModel& model, const InitialSegment& seg,
                                             const StudyOptions& opts, const Reference& reference,
                                             std::span<const int> ps) {
    check_ladder(opts, ps);
    const int m_max = opts.ladder.back();
    int m_eval = m_max;
    if (const auto* fine = std::get_if<FineEmReference>(&reference)) {
        m_eval = fine->m_ref;
        if (m_eval < 4 * m_max) {
            throw Error(ErrorCode::NonNestedSteps, "reference step must be at most a quarter of "
                                                   "the smallest ladder step");
        }
    }
    check_nested(opts.ladder, m_eval);
    if (std::holds_alternative<GbmReference>(reference) &&
        (model.jump || model.dim_state != 1)) {
        throw Error(ErrorCode::InvalidArgument, "the GBM oracle needs a scalar Brownian model");
    }

    const TimeGrid eval = build_grid(opts.tau, opts.T, m_eval, opts.refine);
    const auto grids = rung_grids(opts, eval);
    const std::size_t L = grids.size(), P = ps.size();
    const int n_nodes = eval.fine_steps();

    std::optional<EmPath> oracle;
    if (std::holds_alternative<NeutralOracleReference>(reference)) {
        oracle = neutral_recursion_oracle(model, seg, eval);
    }

    PathLayout layout{L * (P + 1), 0};
    PathFn fn = [&](std::uint64_t path, std::span<double> samples, std::span<double>) {
        const PathNoise noise = draw_noise(model, eval, opts.plan, path);
        EmPath ref;
        if (oracle) {
            ref = *oracle;
        } else if (const auto* gbm = std::get_if<GbmReference>(&reference)) {
            ref = gbm_exact(gbm->mu, gbm->sigma, gbm->x0, eval, noise.brownian);
        } else {
            ref = continuous_path(model, seg, eval, noise);
        }
        for (std::size_t r = 0; r < L; ++r) {
            const EmPath y = continuous_path(model, seg, grids[r], noise);
            double sup = 0.0;
            if (!ref.exploded && !y.exploded) {
                for (int j = 0; j <= n_nodes; ++j) sup = std::max(sup, (ref.at(j) - y.at(j)).norm());
            }
            bool bad = ref.exploded || y.exploded || !std::isfinite(sup);
            for (std::size_t k = 0; k < P; ++k) {
                double v = std::pow(sup, ps[k]);
                bad = bad || !std::isfinite(v);
                samples[r * (P + 1) + 1 + k] = v;
            }
            samples[r * (P + 1)] = bad ? 1.0 : 0.0;
        }
    };
    const PathResults res = run_paths(opts.n_paths, layout, fn, opts.workers);

    std::vector<ErrorTable> tables(P);
    for (std::size_t r = 0; r < L; ++r) {
        for (std::size_t k = 0; k < P; ++k) {
            const auto vals = valid_column(res, r * (P + 1), r * (P + 1) + 1 + k);
            const auto [mean, se] = mean_and_stderr(vals);
            ErrorRow row;
            row.h = grids[r].h;
            row.p = ps[k];
            row.n_paths = vals.size();
            row.err = mean;
            row.std_error = se;
            row.exploded_frac =
                static_cast<double>(opts.n_paths - vals.size()) / static_cast<double>(opts.n_paths);
            enforce_budget(row.exploded_frac, opts.explosion_budget, row.h);
            tables[k].rows.push_back(row);
        }
    }
    return tables;
}

ErrorTable coupled_strong_error(const NeutralModel& model, const InitialSegment& seg,
                                const StudyOptions& opts, const Reference& reference, int p) {
    const int ps[] = {p};
    return coupled_strong_error(model, seg, opts, reference, ps).front();
}

ErrorTable MomentReport::displacement_table() const {
    ErrorTable t;
    for (const auto& r : rows) {
        t.rows.push_back({r.h, p, r.n_paths, r.displacement, r.displacement_stderr, r.exploded_frac});
    }
    return t;
}

ErrorTable MomentReport::moment_table() const {
    ErrorTable t;
    for (const auto& r : rows) {
        t.rows.push_back({r.h, p, r.n_paths, r.moment, r.moment_stderr, r.exploded_frac});
    }
    return t;
}

std::vector<MomentReport> displacement_moment(const NeutralModel& model, const InitialSegment& seg,
                                              const StudyOptions& opts, std::span<const int> ps) {
    check_ladder(opts, ps);
    const int m_max = opts.ladder.back();
    check_nested(opts.ladder, m_max);

    const TimeGrid eval = build_grid(opts.tau, opts.T, m_max, opts.refine);
    const auto grids = rung_grids(opts, eval);
    const std::size_t L = grids.size(), P = ps.size();
    const std::size_t n_nodes = static_cast<std::size_t>(eval.fine_steps()) + 1;
    const std::size_t stride = 1 + 2 * P;

    // accum: per (rung, p) the node-wise sums of |Gamma|^p, then one valid-path
    // count per rung
    PathLayout layout{L * stride, L * P * n_nodes + L};
    PathFn fn = [&](std::uint64_t path, std::span<double> samples, std::span<double> accum) {
        const PathNoise noise = draw_noise(model, eval, opts.plan, path);
        std::vector<double> gamma(n_nodes);
        for (std::size_t r = 0; r < L; ++r) {
            const EmPath y = continuous_path(model, seg, grids[r], noise);
            const int R = grids[r].refine;
            double sup_gamma = 0.0, sup_y = 0.0;
            if (!y.exploded) {
                for (std::size_t j = 0; j < n_nodes; ++j) {
                    const int node = static_cast<int>(j);
                    // Ybar(t) = Y(kh): the interpolant coincides with the
                    // discrete scheme at coarse nodes
                    gamma[j] = (y.at(node) - y.at(node - node % R)).norm();
                    sup_gamma = std::max(sup_gamma, gamma[j]);
                    sup_y = std::max(sup_y, y.at(node).norm());
                }
            }
            bool bad = y.exploded;
            for (std::size_t k = 0; k < P; ++k) {
                double d = std::pow(sup_gamma, ps[k]);
                double mo = std::pow(sup_y, ps[k]);
                bad = bad || !std::isfinite(d) || !std::isfinite(mo);
                samples[r * stride + 1 + 2 * k] = d;
                samples[r * stride + 2 + 2 * k] = mo;
            }
            samples[r * stride] = bad ? 1.0 : 0.0;
            if (bad) continue;
            for (std::size_t k = 0; k < P; ++k) {
                double* acc = accum.data() + (r * P + k) * n_nodes;
                for (std::size_t j = 0; j < n_nodes; ++j) acc[j] += std::pow(gamma[j], ps[k]);
            }
            accum[L * P * n_nodes + r] += 1.0;
        }
    };
    const PathResults res = run_paths(opts.n_paths, layout, fn, opts.workers);

    std::vector<MomentReport> reports(P);
    for (std::size_t k = 0; k < P; ++k) {
        auto& rep = reports[k];
        rep.p = ps[k];
        for (std::size_t r = 0; r < L; ++r) {
            const auto disp = valid_column(res, r * stride, r * stride + 1 + 2 * k);
            const auto mom = valid_column(res, r * stride, r * stride + 2 + 2 * k);
            MomentRow row;
            row.h = grids[r].h;
            row.n_paths = disp.size();
            std::tie(row.displacement, row.displacement_stderr) = mean_and_stderr(disp);
            std::tie(row.moment, row.moment_stderr) = mean_and_stderr(mom);
            row.exploded_frac =
                static_cast<double>(opts.n_paths - disp.size()) / static_cast<double>(opts.n_paths);
            enforce_budget(row.exploded_frac, opts.explosion_budget, row.h);
            const double count = res.accum[L * P * n_nodes + r];
            const double* acc = res.accum.data() + (r * P + k) * n_nodes;
            row.pointwise_displacement =
                count > 0.0 ? *std::max_element(acc, acc + n_nodes) / count : kNaN;
            rep.rows.push_back(row);
        }
        try {
            const auto pts = rep.displacement_table().points();
            rep.displacement_fit = fit_order(pts);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateInput) throw;
            rep.displacement_fit = OrderFit{};
        }
    }
    return reports;
}

MomentReport displacement_moment(const NeutralModel& model, const InitialSegment& seg,
                                 const StudyOptions& opts, int p) {
    const int ps[] = {p};
    return displacement_moment(model, seg, opts, ps).front();
}

MonteCarloEstimate sup_moment(const NeutralModel& model, const InitialSegment& seg, double tau,
                              double T, int m, int refine, int p, std::size_t n_paths,
                              const SeedPlan& plan, int workers) {
    if (p < 2) throw Error(ErrorCode::OutOfRange, "moment order p must be >= 2");
    if (n_paths == 0) throw Error(ErrorCode::InvalidArgument, "n_paths must be positive");
    const TimeGrid grid = build_grid(tau, T, m, refine);
    PathFn fn = [&](std::uint64_t path, std::span<double> samples, std::span<double>) {
        const PathNoise noise = draw_noise(model, grid, plan, path);
        const EmPath y = continuous_path(model, seg, grid, noise);
        double sup = 0.0;
        if (!y.exploded) {
            for (int j = 0; j <= y.last_node; ++j) sup = std::max(sup, y.at(j).norm());
        }
        const double v = std::pow(sup, p);
        samples[0] = y.exploded || !std::isfinite(v) ? 1.0 : 0.0;
        samples[1] = v;
    };
    const PathResults res = run_paths(n_paths, PathLayout{2, 0}, fn, workers);
    const auto vals = valid_column(res, 0, 1);
    MonteCarloEstimate est;
    std::tie(est.mean, est.std_error) = mean_and_stderr(vals);
    est.n_valid = vals.size();
    est.exploded_frac = static_cast<double>(n_paths - vals.size()) / static_cast<double>(n_paths);
    return est;
}

double max_coarse_node_deviation(const EmPath& continuous, const EmPath& discrete) {
    const int R = continuous.grid.refine;
    const int M = discrete.grid.M;
    double scale = 0.0;
    for (int k = 0; k <= M; ++k) {
        if (discrete.at(k).allFinite()) scale = std::max(scale, discrete.at(k).norm());
    }
    if (scale == 0.0) scale = 1.0;
    double dev = 0.0;
    for (int k = 0; k <= M; ++k) {
        const auto a = continuous.at(k * R);
        const auto b = discrete.at(k);
        const bool fa = a.allFinite(), fb = b.allFinite();
        if (fa != fb) return std::numeric_limits<double>::infinity();
        if (fa) dev = std::max(dev, (a - b).norm() / scale);
    }
    return dev;
}

}  // namespace nsdde
