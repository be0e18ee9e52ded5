#include "nsdde/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nsdde/analysis.hpp"
#include "nsdde/error.hpp"
#include "nsdde/hash.hpp"
#include "nsdde/path_kernels.hpp"
#include "nsdde/version.hpp"

namespace nsdde {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Tracks written files so a failed run leaves nothing behind.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
        out << content;
        written_.push_back(path);
        hashes_[name] = git_blob_hash(content);
    }

    void discard() noexcept {
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
        written_.clear();
    }

    const std::map<std::string, std::string>& hashes() const { return hashes_; }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
    std::map<std::string, std::string> hashes_;
};

std::string fmt(double v, int digits = 5) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

json fit_json(const std::optional<OrderFit>& fit, const std::string& status) {
    json j = {{"status", status}};
    if (fit) {
        j["slope"] = fit->slope;
        j["intercept"] = fit->intercept;
        j["r2"] = fit->r_squared;
        j["n_points"] = fit->n_points;
    } else {
        j["slope"] = nullptr;
        j["intercept"] = nullptr;
        j["r2"] = nullptr;
        j["n_points"] = 0;
    }
    return j;
}

/// Fit with the zero-error case called out instead of failing.
std::pair<std::optional<OrderFit>, std::string> fit_table(const ErrorTable& table) {
    try {
        const auto pts = table.points();
        return {fit_order(pts), "ok"};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput) throw;
        const bool exact = std::all_of(table.rows.begin(), table.rows.end(),
                                       [](const ErrorRow& r) { return r.err <= 1e-20; });
        return {std::nullopt, exact ? "exact scheme" : "degenerate"};
    }
}

void check_slope_gates(const std::vector<SlopeGate>& gates, const std::string& what,
                       const std::map<int, std::optional<OrderFit>>& fits,
                       std::vector<std::string>& failures) {
    for (const auto& g : gates) {
        const std::string tag = what + " p=" + std::to_string(g.p);
        auto it = fits.find(g.p);
        if (it == fits.end()) {
            failures.push_back(tag + ": no such experiment was run");
            continue;
        }
        if (!it->second) {
            failures.push_back(tag + ": slope could not be fitted");
            continue;
        }
        const OrderFit& f = *it->second;
        if (f.slope < g.min || f.slope > g.max) {
            failures.push_back(tag + ": slope " + fmt(f.slope) + " outside [" + fmt(g.min) + ", " +
                               fmt(g.max) + "]");
        }
        if (g.min_r2 && f.r_squared < *g.min_r2) {
            failures.push_back(tag + ": r2 " + fmt(f.r_squared) + " below " + fmt(*g.min_r2));
        }
    }
}

}  // namespace

json RunManifest::to_json() const {
    return {{"config", config},
            {"version", version},
            {"seed", seed},
            {"wall_seconds", wall_seconds},
            {"output_hashes", output_hashes},
            {"gate_failures", gate_failures},
            {"exit_code", exit_code()}};
}

RunManifest run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    OutputSet outputs(out_dir);
    RunManifest manifest;
    manifest.config = cfg.to_json();
    manifest.version = kVersion;
    manifest.seed = cfg.seed;

    try {
        const NeutralModel model = make_model(cfg.model_id, cfg.params);
        const InitialSegment seg = make_segment(cfg.segment, model.dim_state, cfg.tau);

        StudyOptions opts;
        opts.tau = cfg.tau;
        opts.T = cfg.T;
        opts.ladder = cfg.ladder;
        opts.refine = cfg.refine;
        opts.n_paths = cfg.n_paths;
        opts.plan = SeedPlan{cfg.seed};
        opts.workers = cfg.workers > 0 ? cfg.workers : default_workers();
        opts.explosion_budget = cfg.explosion_budget;

        json summary = {{"model", cfg.model_id},
                        {"tau", cfg.tau},
                        {"T", cfg.T},
                        {"n_paths", cfg.n_paths},
                        {"seed", cfg.seed},
                        {"version", kVersion}};
        std::ostringstream text;
        text << "model " << cfg.model_id << "  tau=" << cfg.tau << "  T=" << cfg.T
             << "  paths=" << cfg.n_paths << "  seed=" << cfg.seed << "\n";

        std::map<int, std::optional<OrderFit>> strong_fits, disp_fits;
        std::vector<std::string> failures;

        if (cfg.strong_error) {
            Reference reference = FineEmReference{cfg.m_ref};
            if (cfg.reference == ReferenceKind::Oracle) {
                if (cfg.model_id == "gbm") {
                    reference = GbmReference{cfg.params.at("mu"), cfg.params.at("sigma"),
                                             seg.xi(0.0)[0]};
                } else {
                    reference = NeutralOracleReference{};
                }
            }
            const auto start = std::chrono::steady_clock::now();
            const auto tables = coupled_strong_error(model, seg, opts, reference, cfg.p);
            manifest.wall_seconds["strong_error"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

            json entries = json::array();
            text << "strong error E sup|X - Y|^p ("
                 << (cfg.reference == ReferenceKind::Oracle ? "closed-form reference"
                                                            : "reference h = tau/" +
                                                                  std::to_string(cfg.m_ref))
                 << ")\n";
            for (std::size_t k = 0; k < cfg.p.size(); ++k) {
                const int p = cfg.p[k];
                const std::string file = "strong_error_p" + std::to_string(p) + ".csv";
                outputs.write(file, tables[k].to_csv());
                const auto [fit, status] = fit_table(tables[k]);
                strong_fits[p] = fit;
                json e = fit_json(fit, status);
                e["p"] = p;
                e["table"] = file;
                if (model.jump && !cfg.theta.empty()) {
                    json theory = json::array();
                    for (double th : cfg.theta) {
                        theory.push_back(
                            {{"theta", th}, {"exponent", theory_rate_jump(p, th, cfg.T, cfg.tau)}});
                    }
                    e["theory_exponent"] = theory;
                } else if (!model.jump) {
                    e["theory_exponent"] = static_cast<double>(p) / 2.0;
                }
                entries.push_back(e);

                text << "  p=" << p << ": ";
                if (fit) {
                    text << "slope " << fmt(fit->slope) << "  r2 " << fmt(fit->r_squared);
                } else {
                    text << status;
                }
                if (e.contains("theory_exponent")) {
                    if (e["theory_exponent"].is_array()) {
                        text << "  theory";
                        for (const auto& t : e["theory_exponent"]) {
                            text << "  theta=" << fmt(t["theta"].get<double>()) << ":"
                                 << fmt(t["exponent"].get<double>());
                        }
                    } else {
                        text << "  theory " << fmt(e["theory_exponent"].get<double>());
                    }
                }
                text << "\n";
                for (const auto& r : tables[k].rows) {
                    text << "    h=" << fmt(r.h) << "  err=" << fmt(r.err) << "  stderr="
                         << fmt(r.std_error) << "  exploded=" << fmt(r.exploded_frac) << "\n";
                }
                if (cfg.gates.max_err) {
                    for (const auto& r : tables[k].rows) {
                        if (!(r.err <= *cfg.gates.max_err)) {
                            failures.push_back("strong p=" + std::to_string(p) + ": err " +
                                               fmt(r.err) + " at h=" + fmt(r.h) + " exceeds " +
                                               fmt(*cfg.gates.max_err));
                        }
                    }
                }
            }
            summary["strong_error"] = entries;
        }

        if (cfg.displacement) {
            const auto start = std::chrono::steady_clock::now();
            const auto reports = displacement_moment(model, seg, opts, cfg.p);
            manifest.wall_seconds["displacement"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

            json entries = json::array();
            text << "displacement E sup|Y - Ybar|^p and moment E sup|Y|^p\n";
            for (const auto& rep : reports) {
                const std::string dfile = "displacement_p" + std::to_string(rep.p) + ".csv";
                const std::string mfile = "moments_p" + std::to_string(rep.p) + ".csv";
                outputs.write(dfile, rep.displacement_table().to_csv());
                outputs.write(mfile, rep.moment_table().to_csv());
                std::optional<OrderFit> fit;
                if (rep.displacement_fit.n_points > 0) fit = rep.displacement_fit;
                disp_fits[rep.p] = fit;
                json e = fit_json(fit, fit ? "ok" : "degenerate");
                e["p"] = rep.p;
                e["table"] = dfile;
                e["moment_table"] = mfile;
                e["theory_exponent"] = model.jump ? 1.0 : static_cast<double>(rep.p) / 2.0;
                double mo_min = std::numeric_limits<double>::infinity(), mo_max = 0.0;
                json pointwise = json::array();
                for (const auto& r : rep.rows) {
                    mo_min = std::min(mo_min, r.moment);
                    mo_max = std::max(mo_max, r.moment);
                    pointwise.push_back(r.pointwise_displacement);
                }
                const double ratio = mo_max / mo_min;
                e["moment_ratio"] = ratio;
                e["pointwise_displacement"] = pointwise;
                try {
                    std::vector<std::pair<double, double>> pts;
                    for (const auto& r : rep.rows) pts.emplace_back(r.h, r.pointwise_displacement);
                    e["pointwise_slope"] = fit_order(pts).slope;
                } catch (const Error&) {
                    e["pointwise_slope"] = nullptr;
                }
                entries.push_back(e);

                text << "  p=" << rep.p << ": displacement slope "
                     << (fit ? fmt(fit->slope) : std::string("n/a")) << "  theory "
                     << fmt(e["theory_exponent"].get<double>()) << "  moment max/min "
                     << fmt(ratio) << "\n";
                for (const auto& r : rep.rows) {
                    text << "    h=" << fmt(r.h) << "  disp=" << fmt(r.displacement)
                         << "  pointwise=" << fmt(r.pointwise_displacement)
                         << "  moment=" << fmt(r.moment) << "  exploded=" << fmt(r.exploded_frac)
                         << "\n";
                }
                if (cfg.gates.moment_ratio_max && !(ratio <= *cfg.gates.moment_ratio_max)) {
                    failures.push_back("moment p=" + std::to_string(rep.p) + ": max/min ratio " +
                                       fmt(ratio) + " exceeds " +
                                       fmt(*cfg.gates.moment_ratio_max));
                }
            }
            summary["displacement"] = entries;
        }

        check_slope_gates(cfg.gates.strong, "strong", strong_fits, failures);
        check_slope_gates(cfg.gates.displacement, "displacement", disp_fits, failures);
        summary["gate_failures"] = failures;
        text << (failures.empty() ? "gates: pass\n" : "gates: FAIL\n");
        for (const auto& f : failures) text << "  " << f << "\n";

        outputs.write("summary.json", summary.dump(2) + "\n");
        outputs.write("summary.txt", text.str());
        manifest.gate_failures = failures;
        manifest.output_hashes = outputs.hashes();
        outputs.write("manifest.json", manifest.to_json().dump(2) + "\n");
    } catch (...) {
        outputs.discard();
        throw;
    }
    return manifest;
}

std::string registry_listing() {
    std::ostringstream os;
    for (const auto& e : model_registry()) {
        os << e.id << "\n    " << e.summary << "\n    params:";
        for (const auto& [k, v] : e.defaults) os << " " << k << "=" << fmt(v, 6);
        os << "\n";
    }
    return os.str();
}

}  // namespace nsdde
