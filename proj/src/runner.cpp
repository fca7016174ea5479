#include "pruitt/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "pruitt/report.hpp"
#include "pruitt/version.hpp"

namespace pruitt {
namespace {

using nlohmann::ordered_json;

const char* status_name(SuiteStatus s) {
    switch (s) {
        case SuiteStatus::Pass: return "pass";
        case SuiteStatus::Fail: return "fail";
        case SuiteStatus::Skipped: return "skipped";
    }
    return "unknown";
}

std::string src_name(FunctionalsSource s) {
    return s == FunctionalsSource::Analytic ? "analytic" : "mc";
}

struct Ctx {
    const ExperimentConfig& cfg;
    std::string dir;
    std::string hash;
    RunResult* result;

    std::string path(const std::string& name) const { return dir + "/" + name; }
    void record(const std::string& p) { result->files.push_back(p); }
};

const StepDistribution& require_dist(const ExperimentConfig& cfg, const char* suite) {
    if (!cfg.dist) {
        throw std::invalid_argument(std::string(suite) + ": config has no 'dist' section");
    }
    return *cfg.dist;
}

void write_exit_tables(Ctx& ctx, const std::vector<ExitRow>& rows) {
    CsvWriter exits(ctx.path("exit_times.csv"),
                    {"r", "paths", "mean_T", "ci", "censored", "cap", "seed"}, ctx.hash,
                    ctx.cfg.seed);
    CsvWriter tails(ctx.path("tail.csv"), {"r", "n", "p_gt", "ci_lo", "ci_hi"}, ctx.hash,
                    ctx.cfg.seed);
    for (const auto& row : rows) {
        exits.row({fmt_double(row.r), fmt_u64(row.est.paths), fmt_double(row.est.mean_T),
                   fmt_double(row.est.ci_halfwidth), fmt_u64(row.est.censored),
                   fmt_u64(row.est.cap), fmt_u64(row.est.seed)});
        for (const auto& t : row.est.tail) {
            tails.row({fmt_double(row.r), fmt_u64(t.n), fmt_double(t.p_gt), fmt_double(t.ci_lo),
                       fmt_double(t.ci_hi)});
        }
    }
    exits.save();
    tails.save();
    ctx.record(exits.path());
    ctx.record(tails.path());
}

void write_checks_csv(Ctx& ctx, const std::string& file,
                      const std::vector<BoundCheckResult>& checks) {
    CsvWriter csv(ctx.path(file), {"check_id", "r", "n", "lhs", "rhs", "se", "margin"}, ctx.hash,
                  ctx.cfg.seed);
    for (const auto& c : checks) {
        for (const auto& pt : c.points) {
            csv.row({c.id, fmt_double(pt.r), fmt_u64(pt.n), fmt_double(pt.lhs), fmt_double(pt.rhs),
                     fmt_double(pt.se), fmt_double(pt.margin)});
        }
    }
    csv.save();
    ctx.record(csv.path());
}

ordered_json checks_summary(const std::vector<BoundCheckResult>& checks) {
    ordered_json out = ordered_json::array();
    for (const auto& c : checks) {
        out.push_back({{"id", c.id},
                       {"pass", c.pass},
                       {"points", c.points.size()},
                       {"worst_margin", c.worst_margin}});
    }
    return out;
}

SuiteOutcome suite_functionals(Ctx& ctx) {
    const auto& dist = require_dist(ctx.cfg, "functionals");
    const auto grid = ctx.cfg.r_grid.values();
    const auto rep = run_functionals_suite(dist, grid, ctx.cfg.functionals_pairs,
                                           ctx.cfg.mc_samples, ctx.cfg.seed);

    CsvWriter csv(ctx.path("functionals.csv"),
                  {"r", "G", "K", "M_norm", "h", "source", "ci_G", "ci_K", "ci_M"}, ctx.hash,
                  ctx.cfg.seed);
    for (const auto& f : rep.table) {
        csv.row({fmt_double(f.r), fmt_double(f.G), fmt_double(f.K), fmt_double(f.M_norm),
                 fmt_double(f.h), src_name(f.source), fmt_double(f.ci_G), fmt_double(f.ci_K),
                 fmt_double(f.ci_M)});
    }
    csv.save();
    ctx.record(csv.path());

    std::size_t hd_failures = 0;
    for (const auto& hd : rep.hd) {
        if (!hd.pass) ++hd_failures;
    }
    SuiteOutcome out;
    out.name = "functionals";
    out.status = rep.pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    out.details = {{"worst_q2_residual", rep.worst_q2_residual},
                   {"hd_pairs", rep.hd.size()},
                   {"hd_failures", hd_failures},
                   {"g_monotone", rep.g_monotone},
                   {"r2gk_monotone", rep.rk_monotone},
                   {"h_at_rmin", rep.hmin_lhs},
                   {"h_rmin_floor", rep.hmin_rhs}};
    return out;
}

SuiteOutcome suite_exit(Ctx& ctx) {
    const auto& dist = require_dist(ctx.cfg, "exit");
    const auto grid = ctx.cfg.r_grid.values();
    const auto rows = run_exit_rows(dist, grid, ctx.cfg.paths, ctx.cfg.seed, ctx.cfg.cap,
                                    ctx.cfg.mc_samples);
    write_exit_tables(ctx, rows);

    SuiteOutcome out;
    out.name = "exit";
    out.status = SuiteStatus::Pass;
    ordered_json unreliable = ordered_json::array();
    for (const auto& row : rows) {
        if (row.est.unreliable) {
            out.status = SuiteStatus::Fail;
            unreliable.push_back(row.r);
        }
    }
    out.details = {{"rows", rows.size()}, {"unreliable_r", unreliable}};
    if (out.status == SuiteStatus::Fail) out.note = "censoring above 1% on some radii";
    return out;
}

SuiteOutcome suite_pruitt(Ctx& ctx) {
    const auto& dist = require_dist(ctx.cfg, "pruitt");
    const auto grid = ctx.cfg.r_grid.values();
    const auto rep = run_pruitt_suite(dist, grid, ctx.cfg.paths, ctx.cfg.seed, ctx.cfg.pruitt_band,
                                      ctx.cfg.cap, ctx.cfg.mc_samples);
    write_exit_tables(ctx, rep.rows);

    CsvWriter products(ctx.path("pruitt_products.csv"),
                       {"r", "h", "mean_T", "product", "product_ci"}, ctx.hash, ctx.cfg.seed);
    PlotWriter plot(ctx.path("plot_products.dat"), ctx.hash, ctx.cfg.seed);
    plot.comment("r  h*ET  ci");
    for (const auto& row : rep.rows) {
        products.row({fmt_double(row.r), fmt_double(row.f.h), fmt_double(row.est.mean_T),
                      fmt_double(row.product), fmt_double(row.product_ci)});
        plot.row({row.r, row.product, row.product_ci});
    }
    products.save();
    plot.save();
    ctx.record(products.path());
    ctx.record(plot.path());
    write_checks_csv(ctx, "pruitt_checks.csv", rep.checks);

    SuiteOutcome out;
    out.name = "pruitt";
    out.status = rep.pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    out.note = rep.note;
    out.details = {{"sup_product", rep.sup_product},
                   {"inf_product", rep.inf_product},
                   {"band", rep.band},
                   {"band_budget", rep.budget},
                   {"two_sided", rep.two_sided},
                   {"sup_n_tail_h", rep.sup_tail_upper},
                   {"sup_le_over_nh", rep.sup_tail_lower},
                   {"checks", checks_summary(rep.checks)}};
    return out;
}

SuiteOutcome suite_scaling(Ctx& ctx) {
    const auto grid = ctx.cfg.r_grid.values();
    const auto rep =
        run_scaling_experiment(ctx.cfg.space.p, ctx.cfg.scaling_d_list, ctx.cfg.scaling_k, grid,
                               ctx.cfg.paths, ctx.cfg.seed, ctx.cfg.budget, ctx.cfg.cap);

    CsvWriter csv(ctx.path("scaling.csv"),
                  {"family", "p", "d", "k", "r", "h", "mean_T", "ci_T", "product", "product_ci"},
                  ctx.hash, ctx.cfg.seed);
    PlotWriter plot(ctx.path("plot_scaling.dat"), ctx.hash, ctx.cfg.seed);
    const auto emit_family = [&](const std::string& family, const ScalingFamily& fam) {
        plot.comment(family + " d=" + fmt_u64(static_cast<std::uint64_t>(fam.d)));
        for (const auto& row : fam.rows) {
            csv.row({family, fmt_double(rep.p), fmt_u64(static_cast<std::uint64_t>(fam.d)),
                     fmt_u64(static_cast<std::uint64_t>(rep.k)), fmt_double(row.r),
                     fmt_double(row.h), fmt_double(row.mean_T), fmt_double(row.ci_T),
                     fmt_double(row.product), fmt_double(row.product_ci)});
            plot.row({row.r, row.product, row.product_ci});
        }
        plot.blank();
    };
    for (const auto& fam : rep.families) emit_family("random_subset", fam);
    emit_family("fixed_control", rep.control);
    csv.save();
    plot.save();
    ctx.record(csv.path());
    ctx.record(plot.path());

    PlotWriter fit(ctx.path("scaling_fit.dat"), ctx.hash, ctx.cfg.seed);
    fit.comment("ln_d  ln_plateau  fitted");
    for (const auto& fam : rep.families) {
        const double ln_d = std::log(static_cast<double>(fam.d));
        fit.row({ln_d, std::log(fam.plateau), rep.slope.intercept + rep.slope.slope * ln_d});
    }
    fit.save();
    ctx.record(fit.path());

    ordered_json plateaus = ordered_json::array();
    for (const auto& fam : rep.families) {
        plateaus.push_back(
            {{"d", fam.d}, {"plateau", fam.plateau}, {"spread", fam.plateau_spread}});
    }
    SuiteOutcome out;
    out.name = "scaling";
    out.status = rep.pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    out.details = {{"p", rep.p},
                   {"k", rep.k},
                   {"slope", rep.slope.slope},
                   {"slope_se", rep.slope.slope_se},
                   {"plateaus", plateaus},
                   {"control_plateau", rep.control.plateau},
                   {"control_band", rep.control_band},
                   {"budget", rep.budget}};
    return out;
}

SuiteOutcome suite_gaussian(Ctx& ctx) {
    const auto& dist = require_dist(ctx.cfg, "gaussian");
    const auto grid = ctx.cfg.r_grid.values();
    const auto rep = run_gaussian_bounds(dist, grid, ctx.cfg.paths, ctx.cfg.seed, ctx.cfg.budget,
                                         ctx.cfg.cap, ctx.cfg.mc_samples);

    CsvWriter csv(ctx.path("gaussian_bounds.csv"),
                  {"r", "mean_T", "ci_T", "eg2_trunc", "eg2", "upper_ratio", "lower_ratio",
                   "glt_lp_moment"},
                  ctx.hash, ctx.cfg.seed);
    for (const auto& row : rep.rows) {
        csv.row({fmt_double(row.r), fmt_double(row.mean_T), fmt_double(row.ci_T),
                 fmt_double(row.eg2_trunc), fmt_double(row.eg2), fmt_double(row.upper_ratio),
                 fmt_double(row.lower_ratio), fmt_double(row.glt_lp_moment)});
    }
    csv.save();
    ctx.record(csv.path());

    SuiteOutcome out;
    out.name = "gaussian";
    out.status = rep.pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    out.details = {{"sup_upper_ratio", rep.sup_upper}, {"inf_lower_ratio", rep.inf_lower},
                   {"upper_band", rep.upper_band},     {"lower_band", rep.lower_band},
                   {"glt_monotone", rep.glt_monotone}, {"glt_analytic", rep.glt_analytic},
                   {"budget", rep.budget}};
    return out;
}

SuiteOutcome suite_witness(Ctx& ctx) {
    const auto& dist = require_dist(ctx.cfg, "witness");
    const auto* tw = std::get_if<detail::TypeWitness>(&dist.raw());
    if (tw == nullptr) {
        throw std::invalid_argument("witness: config dist must be a type_witness variant");
    }
    const auto rep = run_type_witness_convergence(tw->vectors, dist.space(), ctx.cfg.n_grid,
                                                  ctx.cfg.paths, ctx.cfg.seed, ctx.cfg.witness_tol);

    CsvWriter csv(ctx.path("witness.csv"), {"n", "ratio", "ci"}, ctx.hash, ctx.cfg.seed);
    for (const auto& row : rep.rows) {
        csv.row({fmt_u64(row.n), fmt_double(row.ratio), fmt_double(row.ci)});
    }
    csv.save();
    ctx.record(csv.path());

    SuiteOutcome out;
    out.name = "witness";
    out.status = rep.pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    out.details = {{"gaussian_limit", rep.gaussian_limit},
                   {"gaussian_ci", rep.gaussian_ci},
                   {"step_sq_norm", rep.step_sq_norm},
                   {"sum_sq_norms", rep.sum_sq_norms},
                   {"final_gap", rep.final_gap},
                   {"tolerance", rep.tol}};
    return out;
}

SuiteOutcome suite_lemmas(Ctx& ctx) {
    const auto& dist = require_dist(ctx.cfg, "lemmas");
    const auto grid = ctx.cfg.r_grid.values();
    const auto rep = run_lemma_implication_checks(dist, grid, ctx.cfg.n_grid, ctx.cfg.paths,
                                                  ctx.cfg.seed, ctx.cfg.cap, ctx.cfg.mc_samples);
    write_checks_csv(ctx, "lemma_checks.csv", rep.checks);

    SuiteOutcome out;
    out.name = "lemmas";
    out.status = rep.pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    out.details = {{"c_low", rep.c_low},
                   {"c_up", rep.c_up},
                   {"c_doubling", rep.c_doubling},
                   {"c_tail", rep.c_tail},
                   {"checks", checks_summary(rep.checks)}};
    return out;
}

}  // namespace

RunResult run_config(const ExperimentConfig& cfg, const std::string& output_dir) {
    std::filesystem::create_directories(output_dir);
    RunResult result;
    Ctx ctx{cfg, output_dir, cfg.hash_hex(), &result};

    using SuiteFn = SuiteOutcome (*)(Ctx&);
    std::vector<std::pair<std::string, SuiteFn>> plan;
    const auto want = [&](const std::string& name) {
        return cfg.suite == name || cfg.suite == "all";
    };
    if (want("functionals")) plan.emplace_back("functionals", &suite_functionals);
    if (want("exit")) plan.emplace_back("exit", &suite_exit);
    if (want("pruitt")) plan.emplace_back("pruitt", &suite_pruitt);
    if (want("scaling")) plan.emplace_back("scaling", &suite_scaling);
    if (want("gaussian")) plan.emplace_back("gaussian", &suite_gaussian);
    if (want("witness")) plan.emplace_back("witness", &suite_witness);
    if (want("lemmas")) plan.emplace_back("lemmas", &suite_lemmas);

    for (const auto& [name, fn] : plan) {
        try {
            result.suites.push_back(fn(ctx));
        } catch (const std::invalid_argument& e) {
            // Preconditions not met by this config; a named suite must fail,
            // but under "all" it is skipped with the reason recorded.
            SuiteOutcome out;
            out.name = name;
            out.status = cfg.suite == "all" ? SuiteStatus::Skipped : SuiteStatus::Fail;
            out.note = e.what();
            result.suites.push_back(std::move(out));
        }
    }

    for (const auto& s : result.suites) {
        if (s.status == SuiteStatus::Fail) result.pass = false;
    }

    ordered_json summary;
    summary["schema_version"] = 1;
    summary["tool"] = kToolName;
    summary["version"] = kToolVersion;
    summary["config_hash"] = ctx.hash;
    summary["seed"] = cfg.seed;
    summary["pass"] = result.pass;
    ordered_json suites = ordered_json::object();
    for (const auto& s : result.suites) {
        ordered_json entry;
        entry["status"] = status_name(s.status);
        if (!s.note.empty()) entry["note"] = s.note;
        entry["details"] = s.details;
        suites[s.name] = entry;
    }
    summary["suites"] = suites;

    const std::string summary_path = output_dir + "/summary.json";
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("run_config: cannot write '" + summary_path + "'");
    out << summary.dump(2) << "\n";
    out.close();
    result.files.push_back(summary_path);
    return result;
}

std::string describe_spec(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dist")) {
        throw std::invalid_argument("describe: spec needs a 'dist' section");
    }
    SpaceSpec space{1, 2.0};
    if (j.contains("space")) {
        const auto& sp = j.at("space");
        const int d = sp.contains("d") ? sp.at("d").get<int>() : 1;
        const double p = sp.contains("p") ? sp.at("p").get<double>() : 2.0;
        space = SpaceSpec(d, p);
    }
    const StepDistribution dist = dist_from_json(j.at("dist"), space);
    return dist.describe();
}

}  // namespace pruitt
