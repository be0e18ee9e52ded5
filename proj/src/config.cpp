#include "nsdde/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include "nsdde/error.hpp"
#include "nsdde/grid.hpp"

namespace nsdde {
namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::SchemaError, path + ": " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

/// Typed access to one JSON object that remembers its key path.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) schema_error(path_.empty() ? "<root>" : path_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [key, _] : node_.items()) {
            if (!ok.count(key)) schema_error(join(path_, key), "unknown key");
        }
    }

    bool has(const char* key) const { return node_.contains(key); }

    Section sub(const char* key) const {
        static const json empty = json::object();
        return has(key) ? Section(node_.at(key), join(path_, key)) : Section(empty, join(path_, key));
    }

    const json& raw(const char* key) const {
        if (!has(key)) schema_error(join(path_, key), "required key missing");
        return node_.at(key);
    }

    double number(const char* key) const {
        const json& v = raw(key);
        if (!v.is_number()) schema_error(join(path_, key), "expected a number");
        return v.get<double>();
    }
    double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

    long long integer(const char* key) const {
        const json& v = raw(key);
        if (v.is_number_integer()) return v.get<long long>();
        if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>())) {
            return static_cast<long long>(v.get<double>());
        }
        schema_error(join(path_, key), "expected an integer");
    }
    long long integer(const char* key, long long fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) schema_error(join(path_, key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) schema_error(join(path_, key), "expected a string");
        return v.get<std::string>();
    }

    template <typename T>
    std::vector<T> list(const char* key, std::vector<T> fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        const std::string path = join(path_, key);
        if (!v.is_array()) schema_error(path, "expected a list");
        std::vector<T> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const json& e = v[i];
            const std::string ep = path + "[" + std::to_string(i) + "]";
            if constexpr (std::is_integral_v<T>) {
                if (!e.is_number_integer()) schema_error(ep, "expected an integer");
            } else {
                if (!e.is_number()) schema_error(ep, "expected a number");
            }
            out.push_back(e.get<T>());
        }
        return out;
    }

    const json& node() const { return node_; }
    const std::string& path() const { return path_; }

private:
    const json& node_;
    std::string path_;
};

void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) schema_error(spec, "override must look like key=value");
    const std::string key = spec.substr(0, eq);
    const std::string text = spec.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
        if (part.empty()) schema_error(key, "empty key component");
        if (!node->is_object()) schema_error(key, "cannot descend into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

std::vector<SlopeGate> parse_slope_gates(const Section& gates, const char* key) {
    std::vector<SlopeGate> out;
    if (!gates.has(key)) return out;
    const json& list = gates.raw(key);
    const std::string path = join(gates.path(), key);
    if (!list.is_array()) schema_error(path, "expected a list of gates");
    for (std::size_t i = 0; i < list.size(); ++i) {
        Section g(list[i], path + "[" + std::to_string(i) + "]");
        g.allow({"p", "min", "max", "min_r2"});
        SlopeGate gate;
        gate.p = static_cast<int>(g.integer("p", 2));
        gate.min = g.number("min");
        gate.max = g.number("max");
        if (g.has("min_r2")) gate.min_r2 = g.number("min_r2");
        if (gate.min > gate.max) schema_error(g.path(), "min exceeds max");
        out.push_back(gate);
    }
    return out;
}

json gates_to_json(const std::vector<SlopeGate>& gates) {
    json out = json::array();
    for (const auto& g : gates) {
        json e = {{"p", g.p}, {"min", g.min}, {"max", g.max}};
        if (g.min_r2) e["min_r2"] = *g.min_r2;
        out.push_back(e);
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        schema_error("<document>", e.what());
    }
    if (!doc.is_object()) schema_error("<root>", "expected an object");
    if (doc.contains("model") && doc["model"].is_string()) {
        doc["model"] = json{{"id", doc["model"]}};
    }
    for (const auto& o : overrides) apply_override(doc, o);

    Section root(doc, "");
    root.allow({"model", "grid", "monte_carlo", "experiments", "gates", "output"});
    ExperimentConfig cfg;

    // model
    Section model = root.sub("model");
    model.allow({"id", "params", "segment"});
    if (!model.has("id")) schema_error("model.id", "required key missing");
    cfg.model_id = model.string("id", "");
    const ModelEntry* entry = nullptr;
    try {
        entry = &find_model(cfg.model_id);
    } catch (const Error&) {
        schema_error("model.id", "unknown model '" + cfg.model_id + "'");
    }
    ParamMap overrides_map;
    Section params = model.sub("params");
    for (const auto& [key, value] : params.node().items()) {
        if (!entry->defaults.count(key)) schema_error(join(params.path(), key), "unknown parameter");
        if (!value.is_number()) schema_error(join(params.path(), key), "expected a number");
        overrides_map[key] = value.get<double>();
    }
    cfg.params = resolve_params(*entry, overrides_map);

    Section seg = model.sub("segment");
    seg.allow({"kind", "scale", "slope"});
    cfg.segment.kind = seg.string("kind", "constant");
    const auto kinds = segment_kinds();
    if (std::find(kinds.begin(), kinds.end(), cfg.segment.kind) == kinds.end()) {
        schema_error("model.segment.kind", "unknown segment kind '" + cfg.segment.kind + "'");
    }
    cfg.segment.scale = seg.number("scale", entry->default_scale(cfg.params));
    cfg.segment.slope = seg.number("slope", 0.0);

    // grid
    Section grid = root.sub("grid");
    grid.allow({"tau", "T", "m", "base", "refine", "m_ref"});
    cfg.tau = grid.number("tau");
    cfg.T = grid.number("T");
    if (!(cfg.tau > 0.0)) schema_error("grid.tau", "must be positive");
    if (!(cfg.T > 0.0)) schema_error("grid.T", "must be positive");
    if (!grid.has("m")) schema_error("grid.m", "required key missing");
    cfg.ladder = grid.list<int>("m", {});
    if (cfg.ladder.empty()) schema_error("grid.m", "ladder must not be empty");
    cfg.base = static_cast<int>(grid.integer("base", 2));
    cfg.refine = static_cast<int>(grid.integer("refine", 4));
    if (cfg.base < 2) schema_error("grid.base", "must be >= 2");
    if (cfg.refine < 1) schema_error("grid.refine", "must be >= 1");
    for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
        if (cfg.ladder[i] < 1) schema_error("grid.m", "entries must be >= 1");
        if (i > 0 && cfg.ladder[i] != cfg.ladder[i - 1] * cfg.base) {
            throw Error(ErrorCode::NestingError,
                        "grid.m: " + std::to_string(cfg.ladder[i]) + " is not " +
                            std::to_string(cfg.base) + " x " + std::to_string(cfg.ladder[i - 1]));
        }
        build_grid(cfg.tau, cfg.T, cfg.ladder[i], cfg.refine);
    }
    const int m_max = cfg.ladder.back();
    cfg.m_ref = static_cast<int>(grid.integer("m_ref", 8LL * m_max));

    // monte_carlo
    Section mc = root.sub("monte_carlo");
    mc.allow({"n_paths", "seed", "workers", "explosion_budget"});
    const long long n_paths = mc.integer("n_paths");
    if (n_paths < 100) schema_error("monte_carlo.n_paths", "must be >= 100");
    cfg.n_paths = static_cast<std::size_t>(n_paths);
    const json& seed = mc.raw("seed");
    if (!seed.is_number_integer()) schema_error("monte_carlo.seed", "expected an integer");
    cfg.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>()
                                         : static_cast<std::uint64_t>(seed.get<long long>());
    cfg.workers = static_cast<int>(mc.integer("workers", 0));
    if (cfg.workers < 0) schema_error("monte_carlo.workers", "must be >= 0");
    cfg.explosion_budget = mc.number("explosion_budget", 0.0);
    if (!(cfg.explosion_budget >= 0.0 && cfg.explosion_budget <= 1.0)) {
        schema_error("monte_carlo.explosion_budget", "must lie in [0, 1]");
    }

    // experiments
    Section ex = root.sub("experiments");
    ex.allow({"strong_error", "displacement", "p", "theta", "reference"});
    cfg.strong_error = ex.boolean("strong_error", true);
    cfg.displacement = ex.boolean("displacement", false);
    cfg.p = ex.list<int>("p", {2});
    if (cfg.p.empty()) schema_error("experiments.p", "must not be empty");
    for (int p : cfg.p) {
        if (p < 2) schema_error("experiments.p", "moment orders must be >= 2");
    }
    cfg.theta = ex.list<double>("theta", {});
    for (double t : cfg.theta) {
        if (!(t > 0.0 && t < 1.0)) schema_error("experiments.theta", "values must lie in (0, 1)");
    }
    const std::string ref = ex.string("reference", "fine-em");
    if (ref == "fine-em") {
        cfg.reference = ReferenceKind::FineEm;
    } else if (ref == "oracle") {
        cfg.reference = ReferenceKind::Oracle;
        if (cfg.model_id != "gbm" && cfg.model_id != "neutral-deterministic") {
            schema_error("experiments.reference", "no closed-form oracle for " + cfg.model_id);
        }
    } else {
        schema_error("experiments.reference", "expected 'fine-em' or 'oracle'");
    }
    if (cfg.strong_error && cfg.reference == ReferenceKind::FineEm) {
        if (cfg.m_ref < 4 * m_max || cfg.m_ref % m_max != 0) {
            throw Error(ErrorCode::NestingError,
                        "grid.m_ref: must be a multiple of " + std::to_string(m_max) +
                            " and at least 4x it");
        }
        for (int m : cfg.ladder) {
            if (cfg.m_ref % m != 0) {
                throw Error(ErrorCode::NestingError, "grid.m_ref: not divisible by " +
                                                         std::to_string(m));
            }
        }
    }

    // gates
    Section gates = root.sub("gates");
    gates.allow({"strong", "displacement", "max_err", "moment_ratio_max"});
    cfg.gates.strong = parse_slope_gates(gates, "strong");
    cfg.gates.displacement = parse_slope_gates(gates, "displacement");
    if (gates.has("max_err")) cfg.gates.max_err = gates.number("max_err");
    if (gates.has("moment_ratio_max")) cfg.gates.moment_ratio_max = gates.number("moment_ratio_max");

    Section out = root.sub("output");
    out.allow({"dir"});
    cfg.out_dir = out.string("dir", "");
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    json params_json = json::object();
    for (const auto& [k, v] : params) params_json[k] = v;
    json gates_json = {{"strong", gates_to_json(gates.strong)},
                       {"displacement", gates_to_json(gates.displacement)}};
    if (gates.max_err) gates_json["max_err"] = *gates.max_err;
    if (gates.moment_ratio_max) gates_json["moment_ratio_max"] = *gates.moment_ratio_max;
    return {
        {"model",
         {{"id", model_id},
          {"params", params_json},
          {"segment", {{"kind", segment.kind}, {"scale", segment.scale}, {"slope", segment.slope}}}}},
        {"grid",
         {{"tau", tau}, {"T", T}, {"m", ladder}, {"base", base}, {"refine", refine}, {"m_ref", m_ref}}},
        {"monte_carlo",
         {{"n_paths", n_paths},
          {"seed", seed},
          {"workers", workers},
          {"explosion_budget", explosion_budget}}},
        {"experiments",
         {{"strong_error", strong_error},
          {"displacement", displacement},
          {"p", p},
          {"theta", theta},
          {"reference", reference == ReferenceKind::FineEm ? "fine-em" : "oracle"}}},
        {"gates", gates_json},
        {"output", {{"dir", out_dir}}},
    };
}

}  // namespace nsdde
