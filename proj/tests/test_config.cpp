#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pruitt/config.hpp"
#include "pruitt/parallel.hpp"
#include "pruitt/runner.hpp"

using namespace pruitt;

namespace {

const char* kScalarConfig = R"(
# scalar +/-1 walk
suite = functionals
seed = 42
space.d = 1
space.p = 2.0
dist.variant = discrete_radial
dist.radii = [1.0]
dist.probs = [1.0]
dist.axis = fixed
r_grid.min = 0.5
r_grid.max = 8.0
r_grid.points = 6
paths = 500
mc.samples = 10000
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("pruitt_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("kv text parses into a validated config") {
    const auto cfg = ExperimentConfig::from_kv_text(kScalarConfig);
    CHECK(cfg.suite == "functionals");
    CHECK(cfg.seed == 42);
    CHECK(cfg.space.d == 1);
    CHECK(cfg.space.p == 2.0);
    REQUIRE(cfg.dist.has_value());
    CHECK(cfg.dist->variant_name() == "discrete_radial");
    CHECK(cfg.r_grid.values().size() == 6);
    CHECK(cfg.r_grid.values().front() == 0.5);
    CHECK(cfg.r_grid.values().back() == 8.0);
}

TEST_CASE("json is accepted as an alternate encoding") {
    const auto j = nlohmann::json::parse(R"({
        "suite": "exit", "seed": 7,
        "space": {"d": 2, "p": 4.0},
        "dist": {"variant": "random_subset_rademacher", "k": 1, "alpha": 1.0},
        "cap": {"mode": "fixed", "value": 1000}
    })");
    const auto cfg = ExperimentConfig::from_json(j);
    CHECK(cfg.suite == "exit");
    CHECK(cfg.cap.fixed == 1000);
    REQUIRE(cfg.dist.has_value());
    CHECK(cfg.dist->space().p == 4.0);
}

TEST_CASE("unknown keys are rejected with their dotted path") {
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_kv_text("seed = 1\nbogus = 2\n"),
                         doctest::Contains("bogus"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_kv_text("seed = 1\ncap.weird = 2\n"),
                         doctest::Contains("cap.weird"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        ExperimentConfig::from_kv_text(
            "seed = 1\ndist.variant = gaussian_steps\ndist.weights = [1]\n"),
        doctest::Contains("dist.weights"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        ExperimentConfig::from_kv_text("seed = 1\ndist.variant = levy_flight\n"),
        doctest::Contains("levy_flight"), std::invalid_argument);
}

TEST_CASE("the seed is mandatory") {
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_kv_text("suite = exit\n"),
                         doctest::Contains("seed"), std::invalid_argument);
}

TEST_CASE("round trip: parse -> serialize -> parse is the identity") {
    const auto cfg = ExperimentConfig::from_kv_text(kScalarConfig);
    const std::string canon = cfg.to_kv();
    const auto again = ExperimentConfig::from_kv_text(canon);
    CHECK(cfg.to_json() == again.to_json());
    CHECK(cfg.hash() == again.hash());
    CHECK(again.to_kv() == canon);

    // JSON round trip hits the same tree.
    const auto via_json = ExperimentConfig::from_json(cfg.to_json());
    CHECK(via_json.to_kv() == canon);
}

TEST_CASE("config hashes separate distinct configs") {
    const auto a = ExperimentConfig::from_kv_text(kScalarConfig);
    auto b = a;
    b.seed = 43;
    CHECK(a.hash() != b.hash());
    CHECK(a.hash_hex().size() == 16);
}

TEST_CASE("describe prints variant, parameters and analytic availability") {
    const auto j = nlohmann::json::parse(R"({
        "space": {"d": 16, "p": 4.0},
        "dist": {"variant": "random_subset_rademacher", "k": 1, "alpha": 1.0}
    })");
    const auto text = describe_spec(j);
    CHECK(text.find("random_subset_rademacher") != std::string::npos);
    CHECK(text.find("analytic norm law: yes") != std::string::npos);

    const auto tw = nlohmann::json::parse(R"({
        "space": {"d": 2, "p": 2.0},
        "dist": {"variant": "type_witness", "vectors": [[1,0],[0,1]]}
    })");
    CHECK(describe_spec(tw).find("N=2") != std::string::npos);

    const auto bad = nlohmann::json::parse(R"({"dist": {"variant": "unknown_thing"}})");
    CHECK_THROWS_WITH_AS(describe_spec(bad), doctest::Contains("unknown_thing"),
                         std::invalid_argument);
}

TEST_CASE("run_config writes the functionals table that matches the analytic law") {
    const auto dir = temp_dir("functionals");
    auto cfg = ExperimentConfig::from_kv_text(kScalarConfig);
    const auto result = run_config(cfg, dir.string());
    CHECK(result.pass);
    REQUIRE(!result.files.empty());

    const std::string csv = slurp((dir / "functionals.csv").string());
    CHECK(csv.find("# pruitt-lab") != std::string::npos);
    CHECK(csv.find("# config_hash=" + cfg.hash_hex()) != std::string::npos);
    CHECK(csv.find("# seed=42") != std::string::npos);
    CHECK(csv.find("r,G,K,M_norm,h,source,ci_G,ci_K,ci_M") != std::string::npos);
    // r = 0.5 row: all mass above r, so G = h = 1.
    CHECK(csv.find("0.5,1,0,0,1,analytic,0,0,0") != std::string::npos);
    // r = 8 row: K = 1/64.
    CHECK(csv.find("8,0,0.015625,0,0.015625,analytic,0,0,0") != std::string::npos);

    const std::string summary = slurp((dir / "summary.json").string());
    CHECK(summary.find("\"schema_version\": 1") != std::string::npos);
    CHECK(summary.find("\"config_hash\": \"" + cfg.hash_hex() + "\"") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("reruns and worker counts do not change a single byte") {
    auto cfg = ExperimentConfig::from_kv_text(kScalarConfig);
    cfg.suite = "pruitt";
    cfg.paths = 2000;
    cfg.r_grid.min = 4.0;
    cfg.r_grid.max = 8.0;
    cfg.r_grid.points = 3;

    const auto dir_a = temp_dir("det_a");
    const auto dir_b = temp_dir("det_b");
    const unsigned before = worker_count();
    set_worker_count(1);
    const auto res_a = run_config(cfg, dir_a.string());
    set_worker_count(8);
    const auto res_b = run_config(cfg, dir_b.string());
    set_worker_count(before);

    REQUIRE(res_a.files.size() == res_b.files.size());
    for (std::size_t i = 0; i < res_a.files.size(); ++i) {
        const auto name_a = std::filesystem::path(res_a.files[i]).filename();
        const auto name_b = std::filesystem::path(res_b.files[i]).filename();
        REQUIRE(name_a == name_b);
        CHECK(slurp(res_a.files[i]) == slurp(res_b.files[i]));
    }
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("suite 'all' skips inapplicable suites instead of failing") {
    auto cfg = ExperimentConfig::from_kv_text(kScalarConfig);
    cfg.suite = "all";
    cfg.paths = 300;
    cfg.r_grid.min = 4.0;
    cfg.r_grid.max = 8.0;
    cfg.r_grid.points = 2;
    cfg.mc_samples = 5000;
    cfg.scaling_d_list = {2, 4, 8};
    const auto dir = temp_dir("all");
    const auto result = run_config(cfg, dir.string());
    bool witness_skipped = false;
    for (const auto& s : result.suites) {
        if (s.name == "witness") witness_skipped = s.status == SuiteStatus::Skipped;
    }
    CHECK(witness_skipped);  // dist is not a type_witness
    std::filesystem::remove_all(dir);
}

TEST_CASE("rgrid specs validate") {
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_kv_text("seed = 1\nr_grid.min = -1\n"),
                         doctest::Contains("r_grid"), std::invalid_argument);
    const auto cfg = ExperimentConfig::from_kv_text("seed = 1\nr_grid.min = 2\nr_grid.points = 5\n");
    const auto grid = cfg.r_grid.values();
    REQUIRE(grid.size() == 5);
    CHECK(grid[4] == doctest::Approx(4.0).epsilon(1e-12));  // default ratio 2^(1/4)
}
