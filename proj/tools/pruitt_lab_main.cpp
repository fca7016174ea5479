#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pruitt/config.hpp"
#include "pruitt/parallel.hpp"
#include "pruitt/runner.hpp"
#include "pruitt/version.hpp"

namespace {

nlohmann::json load_spec_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        return nlohmann::json::parse(text);
    }
    return pruitt::kv_to_json(text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(pruitt::kToolName) + " " + pruitt::kToolVersion +
                 " -- exit-time and Pruitt-functional experiments for random walks in l^p"};
    app.require_subcommand(1);
    app.fallthrough();

    unsigned threads = 0;  // 0 -> PRUITT_THREADS or hardware default
    app.add_option("--threads", threads, "worker threads (default: PRUITT_THREADS or hardware)");

    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed_override;
    std::optional<double> budget_override;
    auto* run = app.add_subcommand("run", "run the experiment suites from a config file");
    run->add_option("config", config_path, "config file (key/value text or JSON)")->required();
    run->add_option("--output-dir", output_dir, "output directory (overrides config)");
    run->add_option("--seed", seed_override, "seed override");
    run->add_option("--budget", budget_override, "constant-budget override");

    std::string spec_path;
    auto* describe = app.add_subcommand("describe", "describe a distribution spec");
    describe->add_option("spec", spec_path, "spec file with space/dist sections")->required();

    CLI11_PARSE(app, argc, argv);

    if (threads > 0) pruitt::set_worker_count(threads);

    try {
        if (*describe) {
            std::cout << pruitt::describe_spec(load_spec_json(spec_path)) << "\n";
            return 0;
        }

        pruitt::ExperimentConfig cfg = pruitt::ExperimentConfig::from_file(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (budget_override) cfg.budget = *budget_override;
        const std::string dir = output_dir.empty() ? cfg.output_dir : output_dir;

        const pruitt::RunResult result = pruitt::run_config(cfg, dir);
        for (const auto& suite : result.suites) {
            const char* tag = suite.status == pruitt::SuiteStatus::Pass     ? "[PASS]"
                              : suite.status == pruitt::SuiteStatus::Skipped ? "[SKIP]"
                                                                             : "[FAIL]";
            std::cout << tag << " " << suite.name;
            if (!suite.note.empty()) std::cout << " (" << suite.note << ")";
            std::cout << "\n";
        }
        std::cout << (result.pass ? "all suites passed" : "suite failures detected") << "; "
                  << result.files.size() << " files in " << dir << "\n";
        return result.pass ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
