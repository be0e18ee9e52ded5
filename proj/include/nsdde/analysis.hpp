#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nsdde/em.hpp"
#include "nsdde/model.hpp"
#include "nsdde/rng.hpp"

namespace nsdde {

struct ErrorRow {
    double h = 0.0;
    int p = 2;
    std::size_t n_paths = 0;  // valid (non-exploded) paths behind `err`
    double err = 0.0;
    double std_error = 0.0;
    double exploded_frac = 0.0;
};

/// Rows sorted by h descending. CSV columns: h,p,n_paths,err,stderr,exploded_frac.
struct ErrorTable {
    std::vector<ErrorRow> rows;

    std::vector<std::pair<double, double>> points() const;
    std::string to_csv() const;
    static ErrorTable from_csv(std::string_view text);
};

struct OrderFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

/// Least squares on (log2 h, log2 err). Needs at least 4 points, all positive.
OrderFit fit_order(std::span<const std::pair<double, double>> points);

/// 1 / (1 + theta)^floor(T / tau): the exponent of h bounding E sup|X - Y|^p
/// for jump-driven models.
double theory_rate_jump(int p, double theta, double T, double tau);

/// Reference solutions for the coupled strong error.
struct FineEmReference {
    int m_ref = 512;  // h_ref = tau / m_ref
};
struct GbmReference {
    double mu = 0.0;
    double sigma = 0.0;
    double x0 = 1.0;
};
struct NeutralOracleReference {};
using Reference = std::variant<FineEmReference, GbmReference, NeutralOracleReference>;

/// Monte Carlo setup shared by all studies. Ladder entries are steps per delay
/// (h = tau / m) in increasing order.
struct StudyOptions {
    double tau = 1.0;
    double T = 1.0;
    std::vector<int> ladder;
    int refine = 4;
    std::size_t n_paths = 1000;
    SeedPlan plan;
    int workers = 0;
    double explosion_budget = 0.0;
};

/// One noise realisation per path on the common fine grid, shared by the
/// reference and every ladder step; returns one table per entry of `ps`.
std::vector<ErrorTable> coupled_strong_error(const NeutralModel& model, const InitialSegment& seg,
                                             const StudyOptions& opts, const Reference& reference,
                                             std::span<const int> ps);

ErrorTable coupled_strong_error(const NeutralModel& model, const InitialSegment& seg,
                                const StudyOptions& opts, const Reference& reference, int p);

struct MomentRow {
    double h = 0.0;
    std::size_t n_paths = 0;
    double displacement = 0.0;  // E sup_t |Y(t) - Ybar(t)|^p
    double displacement_stderr = 0.0;
    double pointwise_displacement = 0.0;  // sup_t E|Y(t) - Ybar(t)|^p
    double moment = 0.0;                  // E sup_t |Y(t)|^p
    double moment_stderr = 0.0;
    double exploded_frac = 0.0;
};

struct MomentReport {
    int p = 2;
    std::vector<MomentRow> rows;  // h descending
    /// Slope of displacement vs h; n_points == 0 when the fit was degenerate.
    OrderFit displacement_fit;

    ErrorTable displacement_table() const;
    ErrorTable moment_table() const;
};

/// Displacement and sup-moment study on the fine grid of the finest ladder step.
std::vector<MomentReport> displacement_moment(const NeutralModel& model, const InitialSegment& seg,
                                              const StudyOptions& opts, std::span<const int> ps);

MomentReport displacement_moment(const NeutralModel& model, const InitialSegment& seg,
                                 const StudyOptions& opts, int p);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_valid = 0;
    double exploded_frac = 0.0;
};

/// E sup_{0<=t<=T} |Y(t)|^p for the continuous EM path at h = tau / m, taken
/// over its fine nodes.
MonteCarloEstimate sup_moment(const NeutralModel& model, const InitialSegment& seg, double tau,
                              double T, int m, int refine, int p, std::size_t n_paths,
                              const SeedPlan& plan, int workers = 0);

/// Largest |a - b| / scale over the coarse nodes t >= 0, comparing the fine
/// path sampled at coarse nodes against the discrete path; `scale` is the
/// largest state magnitude on the discrete path (1 if that is zero).
double max_coarse_node_deviation(const EmPath& continuous, const EmPath& discrete);

/// Sample mean and standard error (sd / sqrt(n)), summed in index order.
std::pair<double, double> mean_and_stderr(std::span<const double> samples);

}  // namespace nsdde
