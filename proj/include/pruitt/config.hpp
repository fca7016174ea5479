#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pruitt/distributions.hpp"
#include "pruitt/harness.hpp"

namespace pruitt {

// Geometric r grid specification. When max is present the ratio is derived;
// otherwise `ratio` (default 2^(1/4)) extends from min.
struct RGridSpec {
    double min = 1.0;
    std::optional<double> max;
    int points = 8;
    double ratio = 1.189207115002721;  // 2^(1/4)

    std::vector<double> values() const;
};

// A full experiment description. Parsed from either the key/value text format
// (dotted keys, one per line) or JSON; unknown keys are rejected with their
// dotted path; the seed is mandatory.
struct ExperimentConfig {
    std::string suite = "all";
    std::uint64_t seed = 0;
    std::uint64_t paths = 10000;
    double budget = 4.0;  // constant budget for the two-sided "approx" claims
    std::string output_dir = "out";
    SpaceSpec space{1, 2.0};
    std::optional<StepDistribution> dist;
    RGridSpec r_grid;
    std::vector<std::uint64_t> n_grid = {1, 4, 16, 64, 256};
    std::uint64_t mc_samples = 1000000;
    CapRule cap;
    std::vector<int> scaling_d_list = {4, 16, 64};
    int scaling_k = 1;
    double witness_tol = 0.1;
    int functionals_pairs = 40;
    double pruitt_band = 10.0;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_kv_text(const std::string& text);

    nlohmann::ordered_json to_json() const;
    std::string to_kv() const;    // canonical, diff-able serialization
    std::uint64_t hash() const;   // FNV-1a 64 over to_kv()
    std::string hash_hex() const;
};

// Distribution (de)serialization against a space; shared by config parsing
// and `describe`.
StepDistribution dist_from_json(const nlohmann::json& j, SpaceSpec space);
nlohmann::ordered_json dist_to_json(const StepDistribution& dist);

// Parses the dotted key/value text into a JSON tree (values are JSON scalars
// or arrays; bare words become strings).
nlohmann::json kv_to_json(const std::string& text);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace pruitt
