#include "pruitt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pruitt/stats.hpp"

namespace pruitt {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: key '" + path + "': " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) {
            fail(path.empty() ? key : path + "." + key, "unknown config key");
        }
    }
}

double get_double(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !j.is_number_integer()) fail(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < 0) fail(path, "must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> get_double_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(path, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

// scalar broadcast or explicit array
std::vector<double> get_weights(const json& j, const std::string& path, std::size_t n) {
    if (j.is_number()) return std::vector<double>(n, j.get<double>());
    auto v = get_double_array(j, path);
    if (v.size() != n) {
        fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    }
    return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::vector<double> RGridSpec::values() const {
    if (max) return geometric_grid(min, *max, points);
    return geometric_grid_ratio(min, ratio, points);
}

StepDistribution dist_from_json(const json& j, SpaceSpec space) {
    require_object(j, "dist");
    if (!j.contains("variant")) fail("dist.variant", "missing");
    const std::string variant = get_string(j.at("variant"), "dist.variant");
    const auto d = static_cast<std::size_t>(space.d);

    if (variant == "fixed_subset_rademacher") {
        reject_unknown(j, "dist", {"variant", "subset", "alpha"});
        if (!j.contains("subset")) fail("dist.subset", "missing");
        std::vector<int> subset;
        for (const auto& v : j.at("subset")) {
            const int idx = get_int(v, "dist.subset");
            if (idx < 1 || idx > space.d) fail("dist.subset", "indices are 1-based in [1, d]");
            subset.push_back(idx - 1);
        }
        std::vector<double> alpha =
            j.contains("alpha") ? get_weights(j.at("alpha"), "dist.alpha", subset.size())
                                : std::vector<double>(subset.size(), 1.0);
        return StepDistribution::fixed_subset_rademacher(space, std::move(subset),
                                                         std::move(alpha));
    }
    if (variant == "random_subset_rademacher") {
        reject_unknown(j, "dist", {"variant", "k", "alpha"});
        if (!j.contains("k")) fail("dist.k", "missing");
        const int k = get_int(j.at("k"), "dist.k");
        std::vector<double> alpha = j.contains("alpha")
                                        ? get_weights(j.at("alpha"), "dist.alpha", d)
                                        : std::vector<double>(d, 1.0);
        return StepDistribution::random_subset_rademacher(space, k, std::move(alpha));
    }
    if (variant == "gaussian_steps") {
        reject_unknown(j, "dist", {"variant", "sigma"});
        std::vector<double> sigma = j.contains("sigma")
                                        ? get_weights(j.at("sigma"), "dist.sigma", d)
                                        : std::vector<double>(d, 1.0);
        return StepDistribution::gaussian_steps(space, std::move(sigma));
    }
    if (variant == "discrete_radial") {
        reject_unknown(j, "dist", {"variant", "radii", "probs", "axis"});
        if (!j.contains("radii")) fail("dist.radii", "missing");
        auto radii = get_double_array(j.at("radii"), "dist.radii");
        std::vector<double> probs =
            j.contains("probs") ? get_double_array(j.at("probs"), "dist.probs")
                                : std::vector<double>(radii.size(), 1.0 / radii.size());
        AxisMode mode = AxisMode::Fixed;
        if (j.contains("axis")) {
            const std::string axis = get_string(j.at("axis"), "dist.axis");
            if (axis == "fixed") {
                mode = AxisMode::Fixed;
            } else if (axis == "uniform") {
                mode = AxisMode::UniformRandom;
            } else {
                fail("dist.axis", "expected 'fixed' or 'uniform'");
            }
        }
        return StepDistribution::discrete_radial(space, std::move(radii), std::move(probs), mode);
    }
    if (variant == "point_mass") {
        reject_unknown(j, "dist", {"variant", "point"});
        if (!j.contains("point")) fail("dist.point", "missing");
        auto x = get_double_array(j.at("point"), "dist.point");
        if (x.size() != d) fail("dist.point", "expected d entries");
        return StepDistribution::point_mass(space, std::move(x));
    }
    if (variant == "type_witness") {
        reject_unknown(j, "dist", {"variant", "vectors"});
        if (!j.contains("vectors")) fail("dist.vectors", "missing");
        if (!j.at("vectors").is_array()) fail("dist.vectors", "expected an array of vectors");
        std::vector<Vector> vectors;
        for (const auto& v : j.at("vectors")) {
            auto x = get_double_array(v, "dist.vectors");
            if (x.size() != d) fail("dist.vectors", "every vector needs d entries");
            vectors.push_back(std::move(x));
        }
        return StepDistribution::type_witness(space, std::move(vectors));
    }
    if (variant == "shifted") {
        reject_unknown(j, "dist", {"variant", "base", "shift"});
        if (!j.contains("base")) fail("dist.base", "missing");
        if (!j.contains("shift")) fail("dist.shift", "missing");
        auto shift = get_double_array(j.at("shift"), "dist.shift");
        if (shift.size() != d) fail("dist.shift", "expected d entries");
        StepDistribution base = dist_from_json(j.at("base"), space);
        return StepDistribution::shifted(std::move(base), std::move(shift));
    }
    fail("dist.variant", "unknown distribution variant '" + variant + "'");
}

ordered_json dist_to_json(const StepDistribution& dist) {
    ordered_json out;
    out["variant"] = dist.variant_name();
    struct Visitor {
        ordered_json& out;
        void operator()(const detail::FixedSubsetRademacher& fs) const {
            std::vector<int> subset;
            for (int idx : fs.subset) subset.push_back(idx + 1);
            out["subset"] = subset;
            out["alpha"] = fs.alpha;
        }
        void operator()(const detail::RandomSubsetRademacher& rs) const {
            out["k"] = rs.k;
            out["alpha"] = rs.alpha;
        }
        void operator()(const detail::GaussianSteps& gs) const { out["sigma"] = gs.sigma; }
        void operator()(const detail::DiscreteRadial& dr) const {
            out["radii"] = dr.radii;
            out["probs"] = dr.probs;
            out["axis"] = dr.axis_mode == AxisMode::Fixed ? "fixed" : "uniform";
        }
        void operator()(const detail::PointMass& pm) const { out["point"] = pm.x; }
        void operator()(const detail::TypeWitness& tw) const { out["vectors"] = tw.vectors; }
        void operator()(const detail::Shifted& sh) const {
            out["base"] = dist_to_json(*sh.base);
            out["shift"] = sh.shift;
        }
    };
    std::visit(Visitor{out}, dist.raw());
    return out;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    require_object(j, "");
    reject_unknown(j, "",
                   {"suite", "seed", "paths", "budget", "output_dir", "space", "dist", "r_grid",
                    "n_grid", "mc", "cap", "scaling", "witness", "functionals", "pruitt"});

    ExperimentConfig cfg;
    if (!j.contains("seed")) {
        throw std::invalid_argument("config: key 'seed': missing (mandatory, no clock default)");
    }
    cfg.seed = get_u64(j.at("seed"), "seed");

    if (j.contains("suite")) {
        cfg.suite = get_string(j.at("suite"), "suite");
        static const std::set<std::string> kSuites{"functionals", "exit",    "pruitt", "scaling",
                                                   "gaussian",    "witness", "lemmas", "all"};
        if (!kSuites.count(cfg.suite)) fail("suite", "unknown suite '" + cfg.suite + "'");
    }
    if (j.contains("paths")) cfg.paths = get_u64(j.at("paths"), "paths");
    if (j.contains("budget")) {
        cfg.budget = get_double(j.at("budget"), "budget");
        if (!(cfg.budget > 1.0)) fail("budget", "must exceed 1");
    }
    if (j.contains("output_dir")) cfg.output_dir = get_string(j.at("output_dir"), "output_dir");

    if (j.contains("space")) {
        const auto& sp = j.at("space");
        require_object(sp, "space");
        reject_unknown(sp, "space", {"d", "p"});
        const int d = sp.contains("d") ? get_int(sp.at("d"), "space.d") : 1;
        const double p = sp.contains("p") ? get_double(sp.at("p"), "space.p") : 2.0;
        try {
            cfg.space = SpaceSpec(d, p);
        } catch (const std::exception& e) {
            fail("space", e.what());
        }
    }
    if (j.contains("dist")) {
        try {
            cfg.dist = dist_from_json(j.at("dist"), cfg.space);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception& e) {
            fail("dist", e.what());
        }
    }
    if (j.contains("r_grid")) {
        const auto& rg = j.at("r_grid");
        require_object(rg, "r_grid");
        reject_unknown(rg, "r_grid", {"min", "max", "points", "ratio"});
        if (rg.contains("min")) cfg.r_grid.min = get_double(rg.at("min"), "r_grid.min");
        if (rg.contains("max")) cfg.r_grid.max = get_double(rg.at("max"), "r_grid.max");
        if (rg.contains("points")) cfg.r_grid.points = get_int(rg.at("points"), "r_grid.points");
        if (rg.contains("ratio")) cfg.r_grid.ratio = get_double(rg.at("ratio"), "r_grid.ratio");
        try {
            (void)cfg.r_grid.values();
        } catch (const std::exception& e) {
            fail("r_grid", e.what());
        }
    }
    if (j.contains("n_grid")) {
        if (!j.at("n_grid").is_array()) fail("n_grid", "expected an array of integers");
        cfg.n_grid.clear();
        for (const auto& v : j.at("n_grid")) cfg.n_grid.push_back(get_u64(v, "n_grid"));
        if (cfg.n_grid.empty()) fail("n_grid", "must not be empty");
        if (!std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end())) {
            fail("n_grid", "must be sorted ascending");
        }
    }
    if (j.contains("mc")) {
        const auto& mc = j.at("mc");
        require_object(mc, "mc");
        reject_unknown(mc, "mc", {"samples"});
        if (mc.contains("samples")) cfg.mc_samples = get_u64(mc.at("samples"), "mc.samples");
        if (cfg.mc_samples < 1000) fail("mc.samples", "must be >= 1000");
    }
    if (j.contains("cap")) {
        const auto& cap = j.at("cap");
        require_object(cap, "cap");
        reject_unknown(cap, "cap", {"mode", "multiplier", "value"});
        std::string mode = cap.contains("mode") ? get_string(cap.at("mode"), "cap.mode") : "auto";
        if (mode == "auto") {
            cfg.cap.fixed = 0;
            if (cap.contains("multiplier")) {
                cfg.cap.multiplier = get_double(cap.at("multiplier"), "cap.multiplier");
                if (!(cfg.cap.multiplier > 0.0)) fail("cap.multiplier", "must be positive");
            }
            if (cap.contains("value")) fail("cap.value", "only valid with cap.mode = fixed");
        } else if (mode == "fixed") {
            if (!cap.contains("value")) fail("cap.value", "missing for cap.mode = fixed");
            cfg.cap.fixed = get_u64(cap.at("value"), "cap.value");
            if (cfg.cap.fixed < 1) fail("cap.value", "must be >= 1");
        } else {
            fail("cap.mode", "expected 'auto' or 'fixed'");
        }
    }
    if (j.contains("scaling")) {
        const auto& sc = j.at("scaling");
        require_object(sc, "scaling");
        reject_unknown(sc, "scaling", {"d_list", "k"});
        if (sc.contains("d_list")) {
            cfg.scaling_d_list.clear();
            for (const auto& v : sc.at("d_list")) {
                cfg.scaling_d_list.push_back(get_int(v, "scaling.d_list"));
            }
        }
        if (sc.contains("k")) cfg.scaling_k = get_int(sc.at("k"), "scaling.k");
    }
    if (j.contains("witness")) {
        const auto& w = j.at("witness");
        require_object(w, "witness");
        reject_unknown(w, "witness", {"tolerance"});
        if (w.contains("tolerance")) {
            cfg.witness_tol = get_double(w.at("tolerance"), "witness.tolerance");
        }
    }
    if (j.contains("functionals")) {
        const auto& f = j.at("functionals");
        require_object(f, "functionals");
        reject_unknown(f, "functionals", {"pairs"});
        if (f.contains("pairs")) cfg.functionals_pairs = get_int(f.at("pairs"), "functionals.pairs");
    }
    if (j.contains("pruitt")) {
        const auto& p = j.at("pruitt");
        require_object(p, "pruitt");
        reject_unknown(p, "pruitt", {"band"});
        if (p.contains("band")) {
            cfg.pruitt_band = get_double(p.at("band"), "pruitt.band");
            if (!(cfg.pruitt_band > 1.0)) fail("pruitt.band", "must exceed 1");
        }
    }
    return cfg;
}

ordered_json ExperimentConfig::to_json() const {
    ordered_json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["paths"] = paths;
    j["budget"] = budget;
    j["output_dir"] = output_dir;
    j["space"] = {{"d", space.d}, {"p", space.p}};
    if (dist) j["dist"] = dist_to_json(*dist);
    ordered_json rg;
    rg["min"] = r_grid.min;
    if (r_grid.max) rg["max"] = *r_grid.max;
    rg["points"] = r_grid.points;
    rg["ratio"] = r_grid.ratio;
    j["r_grid"] = rg;
    j["n_grid"] = n_grid;
    j["mc"] = {{"samples", mc_samples}};
    if (cap.fixed > 0) {
        j["cap"] = {{"mode", "fixed"}, {"value", cap.fixed}};
    } else {
        j["cap"] = {{"mode", "auto"}, {"multiplier", cap.multiplier}};
    }
    j["scaling"] = {{"d_list", scaling_d_list}, {"k", scaling_k}};
    j["witness"] = {{"tolerance", witness_tol}};
    j["functionals"] = {{"pairs", functionals_pairs}};
    j["pruitt"] = {{"band", pruitt_band}};
    return j;
}

namespace {

void flatten(const ordered_json& j, const std::string& prefix,
             std::map<std::string, std::string>& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
        }
    } else {
        out[prefix] = j.dump();
    }
}

}  // namespace

std::string ExperimentConfig::to_kv() const {
    std::map<std::string, std::string> flat;
    flatten(to_json(), "", flat);
    std::ostringstream os;
    for (const auto& [key, value] : flat) os << key << " = " << value << "\n";
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(to_kv()); }

std::string ExperimentConfig::hash_hex() const {
    char buf[17] = {};
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

json kv_to_json(const std::string& text) {
    json root = json::object();
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        ": empty key or value");
        }
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::parse_error&) {
            parsed = value;  // bare word -> string
        }
        // Insert at the dotted path.
        json* node = &root;
        std::size_t start = 0;
        for (;;) {
            const auto dot = key.find('.', start);
            const std::string part = key.substr(start, dot - start);
            if (part.empty()) {
                throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                            ": malformed key '" + key + "'");
            }
            if (dot == std::string::npos) {
                (*node)[part] = parsed;
                break;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }
    return root;
}

ExperimentConfig ExperimentConfig::from_kv_text(const std::string& text) {
    return from_json(kv_to_json(text));
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        return from_json(json::parse(text));
    }
    return from_kv_text(text);
}

}  // namespace pruitt
