#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "nsdde/analysis.hpp"
#include "nsdde/config.hpp"
#include "nsdde/hash.hpp"
#include "nsdde/registry.hpp"
#include "nsdde/runner.hpp"

using namespace nsdde;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "model": "gbm",
  "grid": {"tau": 1.0, "T": 1.0, "m": [8, 16, 32, 64]},
  "monte_carlo": {"n_paths": 200, "seed": 5}
})";

std::string schema_message(std::string_view text, std::vector<std::string> overrides = {}) {
    try {
        parse_config(text, overrides);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaError) return e.what();
        return std::string("other error: ") + e.what();
    }
    return "no error";
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("nsdde_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
    auto cfg = parse_config(kMinimal);
    CHECK(cfg.model_id == "gbm");
    CHECK(cfg.refine == 4);
    CHECK(cfg.base == 2);
    CHECK(cfg.p == std::vector<int>{2});
    CHECK(cfg.theta.empty());
    CHECK(cfg.m_ref == 8 * 64);
    CHECK(cfg.strong_error);
    CHECK_FALSE(cfg.displacement);
    CHECK(cfg.reference == ReferenceKind::FineEm);
    CHECK(cfg.params.at("mu") == -1.0);
    CHECK(cfg.segment.kind == "constant");
    CHECK(cfg.segment.scale == 1.0);
    CHECK(cfg.gates.empty());
}

TEST_CASE("config errors name the key") {
    CHECK_THROWS_CODE(parse_config(R"({"model": "gbm", "grid": {"tau": 1, "T": 1, "m": [8, 12]},
                                       "monte_carlo": {"n_paths": 200, "seed": 1}})"),
                      ErrorCode::NestingError);
    CHECK(schema_message(R"({"model": "gbm", "fooo": 1, "grid": {"tau": 1, "T": 1, "m": [8]},
                             "monte_carlo": {"n_paths": 200, "seed": 1}})")
              .find("fooo") != std::string::npos);
    CHECK(schema_message(kMinimal, {"grid.refine=\"four\""}).find("grid.refine") !=
          std::string::npos);
    CHECK(schema_message(kMinimal, {"model.params.zzz=1"}).find("model.params.zzz") !=
          std::string::npos);
    CHECK(schema_message(kMinimal, {"monte_carlo.n_paths=50"}).find("n_paths") !=
          std::string::npos);
    CHECK(schema_message("{not json").find("SchemaError") != std::string::npos);
    CHECK(schema_message(kMinimal, {"model.id=nope"}).find("model.id") != std::string::npos);
    CHECK_THROWS_CODE(parse_config(kMinimal, std::vector<std::string>{"grid.m_ref=100"}),
                      ErrorCode::NestingError);
    CHECK(schema_message(kMinimal, {"model.id=\"paper-eq-1.1\"", "experiments.reference=\"oracle\""})
              .find("reference") != std::string::npos);
}

TEST_CASE("overrides") {
    std::vector<std::string> ov = {"monte_carlo.seed=77", "model.params.sigma=0.25",
                                   "experiments.p=[2,4]", "grid.T=2"};
    auto cfg = parse_config(kMinimal, ov);
    CHECK(cfg.seed == 77);
    CHECK(cfg.params.at("sigma") == 0.25);
    CHECK(cfg.p == std::vector<int>{2, 4});
    CHECK(cfg.T == 2.0);
    // canonical form parses back to the same run
    auto again = parse_config(cfg.to_json().dump());
    CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("registry listing") {
    CHECK(model_registry().size() >= 6);
    CHECK_THROWS_CODE(find_model("nope"), ErrorCode::UnknownModel);
    CHECK(find_model("jump-remark-1.2").defaults.count("q") == 1);
    auto text = registry_listing();
    CHECK(text.find("paper-eq-1.1") != std::string::npos);
    CHECK(text.find("jump-remark-1.2") != std::string::npos);
    CHECK_THROWS_CODE(resolve_params(find_model("gbm"), {{"q", 1.0}}), ErrorCode::SchemaError);
}

TEST_CASE("zero-noise additive run reports an exact scheme") {
    auto cfg = parse_config(R"({
      "model": {"id": "additive", "params": {"sigma": 0.0}},
      "grid": {"tau": 1.0, "T": 2.0, "m": [8, 16, 32, 64]},
      "monte_carlo": {"n_paths": 100, "seed": 1},
      "gates": {"max_err": 1e-20}
    })");
    auto dir = scratch("additive");
    auto manifest = run_experiment(cfg, dir);
    CHECK(manifest.exit_code() == 0);
    auto table = ErrorTable::from_csv(slurp(dir / "strong_error_p2.csv"));
    REQUIRE(table.rows.size() == 4);
    for (const auto& r : table.rows) CHECK(r.err <= 1e-20);
    auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["strong_error"][0]["status"] == "exact scheme");
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "summary.txt"));
    fs::remove_all(dir);
}

TEST_CASE("outputs do not depend on the worker count") {
    std::map<std::string, std::string> first;
    for (int workers : {1, 4, 8}) {
        auto cfg = parse_config(R"({
          "model": "jump-remark-1.2",
          "grid": {"tau": 1.0, "T": 2.0, "m": [8, 16, 32, 64]},
          "monte_carlo": {"n_paths": 150, "seed": 3},
          "experiments": {"displacement": true, "p": [2, 4], "theta": [0.1]}
        })",
                                std::vector<std::string>{"monte_carlo.workers=" +
                                                         std::to_string(workers)});
        auto dir = scratch("workers" + std::to_string(workers));
        auto manifest = run_experiment(cfg, dir);
        CHECK(manifest.output_hashes.size() == 8);
        if (first.empty()) {
            first = manifest.output_hashes;
        } else {
            CHECK(manifest.output_hashes == first);
        }
        fs::remove_all(dir);
    }
}

TEST_CASE("gate failures set the exit code") {
    auto cfg = parse_config(kMinimal, std::vector<std::string>{
                                          R"(gates.strong=[{"p": 2, "min": 5, "max": 6}])"});
    auto dir = scratch("gates");
    auto manifest = run_experiment(cfg, dir);
    CHECK(manifest.exit_code() == 1);
    REQUIRE(manifest.gate_failures.size() == 1);
    CHECK(fs::exists(dir / "summary.json"));
    fs::remove_all(dir);
}

TEST_CASE("a blown explosion budget leaves no outputs") {
    auto cfg = parse_config(R"({
      "model": {"id": "remark-1.1", "segment": {"scale": 1e100}},
      "grid": {"tau": 1.0, "T": 2.0, "m": [8, 16, 32, 64]},
      "monte_carlo": {"n_paths": 100, "seed": 1}
    })");
    auto dir = scratch("explode");
    CHECK_THROWS_CODE(run_experiment(cfg, dir), ErrorCode::ExplosionBudgetExceeded);
    bool empty = !fs::exists(dir) || fs::is_empty(dir);
    CHECK(empty);
    fs::remove_all(dir);
}

TEST_CASE("git blob hash") {
    // values from `git hash-object`
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    auto cfg = parse_config(kMinimal);
    auto dir = scratch("hash");
    auto manifest = run_experiment(cfg, dir);
    CHECK(manifest.output_hashes.at("strong_error_p2.csv").size() == 40);
    fs::remove_all(dir);
}
