#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pruitt/config.hpp"

namespace pruitt {

enum class SuiteStatus { Pass, Fail, Skipped };

struct SuiteOutcome {
    std::string name;
    SuiteStatus status = SuiteStatus::Pass;
    std::string note;
    nlohmann::ordered_json details;
};

struct RunResult {
    bool pass = true;
    std::vector<SuiteOutcome> suites;
    std::vector<std::string> files;  // everything written, summary.json last
};

// Runs the configured suite(s), writes CSV/plot/summary artifacts into
// output_dir, and reports per-suite outcomes. Deterministic for a fixed
// config: reruns produce byte-identical files regardless of worker count.
RunResult run_config(const ExperimentConfig& cfg, const std::string& output_dir);

// Human-readable description of a {space, dist} spec (or a full config).
std::string describe_spec(const nlohmann::json& j);

}  // namespace pruitt
