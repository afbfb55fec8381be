#include "varsketch/config.hpp"

#include <fstream>
#include <sstream>

#include "varsketch/errors.hpp"

#include "json.hpp"

namespace varsketch {

using nlohmann::json;

std::string to_string(NoiseMode m) {
    switch (m) {
        case NoiseMode::sources: return "sources";
        case NoiseMode::estimated: return "estimated";
        case NoiseMode::identity: return "identity";
    }
    return "?";
}

std::string to_string(LinPoint p) { return p == LinPoint::measured ? "measured" : "truth"; }

std::string to_string(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::sketch: return "sketch";
        case EstimatorKind::naive: return "naive";
        case EstimatorKind::mc: return "mc";
        case EstimatorKind::brute: return "brute";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError(path + ": " + why);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) fail(path + "." + key, "unknown key");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& path, std::size_t min_value) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
    const std::size_t v = j.get<std::size_t>();
    if (v < min_value) fail(path, "must be >= " + std::to_string(min_value));
    return v;
}

std::uint64_t get_seed(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !j.is_number_integer()) fail(path, "expected an integer seed");
    if (j.is_number_integer() && j.get<long long>() < 0) fail(path, "seed must be nonnegative");
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

template <typename Parse>
auto get_enum(const json& j, const std::string& path, Parse parse) {
    const std::string s = get_string(j, path);
    try {
        return parse(s);
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
}

void parse_phantom(const json& j, const std::string& path, PhantomConfig& out) {
    check_keys(j, path, {"kind", "seed", "point_spacing"});
    if (j.contains("kind")) out.kind = get_enum(j["kind"], path + ".kind", phantom_kind_from_string);
    if (j.contains("seed")) out.seed = get_seed(j["seed"], path + ".seed");
    if (j.contains("point_spacing"))
        out.point_spacing = get_count(j["point_spacing"], path + ".point_spacing", 1);
}

void parse_mask(const json& j, const std::string& path, MaskConfig& out) {
    check_keys(j, path, {"scheme", "acceleration", "seed", "calib_region"});
    if (j.contains("scheme"))
        out.scheme = get_enum(j["scheme"], path + ".scheme", mask_scheme_from_string);
    if (j.contains("acceleration")) {
        out.acceleration = get_number(j["acceleration"], path + ".acceleration");
        if (out.acceleration < 1.0) fail(path + ".acceleration", "must be >= 1");
    }
    if (j.contains("seed")) out.seed = get_seed(j["seed"], path + ".seed");
    if (j.contains("calib_region")) {
        if (!j["calib_region"].is_number_integer()) fail(path + ".calib_region", "expected an integer");
        out.calib_region = j["calib_region"].get<int>();
    }
}

void parse_noise(const json& j, const std::string& path, NoiseConfig& out) {
    check_keys(j, path,
               {"mode", "alpha", "base_sigma", "n_sources", "corner_fraction", "weights_seed"});
    if (j.contains("mode")) {
        const std::string s = get_string(j["mode"], path + ".mode");
        if (s == "sources") out.mode = NoiseMode::sources;
        else if (s == "estimated") out.mode = NoiseMode::estimated;
        else if (s == "identity") out.mode = NoiseMode::identity;
        else fail(path + ".mode", "expected one of sources, estimated, identity");
    }
    if (j.contains("alpha")) {
        out.alpha = get_number(j["alpha"], path + ".alpha");
        if (out.alpha <= 0.0) fail(path + ".alpha", "must be > 0");
    }
    if (j.contains("base_sigma")) {
        out.base_sigma = get_number(j["base_sigma"], path + ".base_sigma");
        if (out.base_sigma <= 0.0) fail(path + ".base_sigma", "must be > 0");
    }
    // 0 keeps the coil-count default
    if (j.contains("n_sources")) out.n_sources = get_count(j["n_sources"], path + ".n_sources", 0);
    if (j.contains("corner_fraction")) {
        out.corner_fraction = get_number(j["corner_fraction"], path + ".corner_fraction");
        if (out.corner_fraction <= 0.0 || out.corner_fraction >= 1.0)
            fail(path + ".corner_fraction", "must be in (0, 1)");
    }
    if (j.contains("weights_seed"))
        out.weights_seed = get_seed(j["weights_seed"], path + ".weights_seed");
}

void parse_model(const json& j, const std::string& path, ModelSpec& out) {
    check_keys(j, path,
               {"kind", "steps", "dc_solver", "dc_lambda", "dc_cg_iters", "net", "weights_seed"});
    if (j.contains("kind")) out.kind = get_enum(j["kind"], path + ".kind", model_kind_from_string);
    if (j.contains("steps")) out.steps = get_count(j["steps"], path + ".steps", 1);
    if (j.contains("dc_solver")) {
        const std::string s = get_string(j["dc_solver"], path + ".dc_solver");
        if (s == "gradient") out.dc_solver = DcSolver::gradient;
        else if (s == "cg") out.dc_solver = DcSolver::cg;
        else fail(path + ".dc_solver", "expected gradient or cg");
    }
    if (j.contains("dc_lambda")) {
        out.dc_lambda = get_number(j["dc_lambda"], path + ".dc_lambda");
        if (out.dc_lambda <= 0.0) fail(path + ".dc_lambda", "must be > 0");
    }
    if (j.contains("dc_cg_iters"))
        out.dc_cg_iters = get_count(j["dc_cg_iters"], path + ".dc_cg_iters", 1);
    if (j.contains("net")) {
        const json& n = j["net"];
        const std::string np = path + ".net";
        check_keys(n, np, {"layers", "channels", "kernel", "gain"});
        if (n.contains("layers")) out.net_layers = get_count(n["layers"], np + ".layers", 1);
        if (n.contains("channels")) out.net_channels = get_count(n["channels"], np + ".channels", 1);
        if (n.contains("kernel")) {
            out.net_kernel = get_count(n["kernel"], np + ".kernel", 1);
            if (out.net_kernel % 2 == 0) fail(np + ".kernel", "must be odd");
        }
        if (n.contains("gain")) {
            out.net_gain = get_number(n["gain"], np + ".gain");
            if (out.net_gain < 0.0) fail(np + ".gain", "must be >= 0");
        }
    }
    if (j.contains("weights_seed")) out.weights_seed = get_seed(j["weights_seed"], path + ".weights_seed");
}

void parse_sweep(const json& j, const std::string& path, SweepConfig& out) {
    check_keys(j, path, {"param", "values"});
    if (!j.contains("param")) fail(path + ".param", "required");
    out.param = get_string(j["param"], path + ".param");
    const std::set<std::string> known = {"S", "N", "alpha", "R", "K", "scheme"};
    if (!known.count(out.param))
        fail(path + ".param", "expected one of S, N, alpha, R, K, scheme");
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
        fail(path + ".values", "expected a nonempty array");
    std::size_t idx = 0;
    for (const json& v : j["values"]) {
        const std::string vp = path + ".values[" + std::to_string(idx++) + "]";
        if (out.param == "scheme") {
            get_enum(v, vp, mask_scheme_from_string);
            out.scheme_values.push_back(v.get<std::string>());
        } else {
            const double d = get_number(v, vp);
            if (d <= 0.0) fail(vp, "must be > 0");
            out.values.push_back(d);
        }
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }

    ExperimentConfig cfg;
    check_keys(j, origin,
               {"grid", "coils", "phantom", "mask", "noise", "model", "estimators", "sketch",
                "mc", "linearization", "chunk", "threads", "seed", "out", "sweep", "bench"});

    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, "grid", {"rows", "cols"});
        if (g.contains("rows")) cfg.rows = get_count(g["rows"], "grid.rows", 8);
        if (g.contains("cols")) cfg.cols = get_count(g["cols"], "grid.cols", 8);
    }
    if (j.contains("coils")) {
        const json& c = j["coils"];
        check_keys(c, "coils", {"count"});
        if (c.contains("count")) cfg.n_coils = get_count(c["count"], "coils.count", 1);
    }
    if (j.contains("phantom")) parse_phantom(j["phantom"], "phantom", cfg.phantom);
    if (j.contains("mask")) parse_mask(j["mask"], "mask", cfg.mask);
    if (j.contains("noise")) parse_noise(j["noise"], "noise", cfg.noise);
    if (j.contains("model")) parse_model(j["model"], "model", cfg.model);

    if (j.contains("estimators")) {
        if (!j["estimators"].is_array() || j["estimators"].empty())
            fail("estimators", "expected a nonempty array");
        cfg.estimators.clear();
        std::size_t idx = 0;
        for (const json& e : j["estimators"]) {
            const std::string ep = "estimators[" + std::to_string(idx++) + "]";
            const std::string s = get_string(e, ep);
            if (s == "sketch") cfg.estimators.push_back(EstimatorKind::sketch);
            else if (s == "naive") cfg.estimators.push_back(EstimatorKind::naive);
            else if (s == "mc") cfg.estimators.push_back(EstimatorKind::mc);
            else if (s == "brute") cfg.estimators.push_back(EstimatorKind::brute);
            else fail(ep, "expected one of sketch, naive, mc, brute");
        }
    }

    if (j.contains("sketch")) {
        const json& s = j["sketch"];
        check_keys(s, "sketch", {"S", "distribution"});
        if (s.contains("S")) cfg.sketch_S = get_count(s["S"], "sketch.S", 1);
        if (s.contains("distribution"))
            cfg.distribution =
                get_enum(s["distribution"], "sketch.distribution", probe_distribution_from_string);
    }
    if (j.contains("mc")) {
        const json& m = j["mc"];
        check_keys(m, "mc", {"trials"});
        if (m.contains("trials")) cfg.mc_trials = get_count(m["trials"], "mc.trials", 2);
    }
    if (j.contains("linearization")) {
        const std::string s = get_string(j["linearization"], "linearization");
        if (s == "measured") cfg.linearization = LinPoint::measured;
        else if (s == "truth") cfg.linearization = LinPoint::truth;
        else fail("linearization", "expected measured or truth");
    }
    if (j.contains("chunk")) cfg.chunk = get_count(j["chunk"], "chunk", 1);
    if (j.contains("threads")) cfg.threads = get_count(j["threads"], "threads", 1);
    if (j.contains("seed")) cfg.master_seed = get_seed(j["seed"], "seed");
    if (j.contains("out")) cfg.out_dir = get_string(j["out"], "out");
    if (j.contains("sweep")) {
        SweepConfig sw;
        parse_sweep(j["sweep"], "sweep", sw);
        cfg.sweep = std::move(sw);
    }
    if (j.contains("bench")) {
        const json& b = j["bench"];
        check_keys(b, "bench", {"repeats"});
        if (b.contains("repeats")) cfg.bench.repeats = get_count(b["repeats"], "bench.repeats", 1);
    }

    // cross-field checks
    if (cfg.noise.mode == NoiseMode::sources && cfg.noise.n_sources != 0 &&
        cfg.noise.n_sources < cfg.n_coils)
        fail("noise.n_sources", "must be >= coils.count for a full-rank covariance");
    if (cfg.model.kind == ModelKind::unrolled_dc && cfg.model.steps > 64)
        fail("model.steps", "depth above 64 is outside the supported range");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["grid"] = {{"rows", cfg.rows}, {"cols", cfg.cols}};
    j["coils"] = {{"count", cfg.n_coils}};
    j["phantom"] = {{"kind", to_string(cfg.phantom.kind)},
                    {"point_spacing", cfg.phantom.point_spacing}};
    if (cfg.phantom.seed) j["phantom"]["seed"] = *cfg.phantom.seed;
    j["mask"] = {{"scheme", to_string(cfg.mask.scheme)},
                 {"acceleration", cfg.mask.acceleration},
                 {"calib_region", cfg.mask.calib_region}};
    if (cfg.mask.seed) j["mask"]["seed"] = *cfg.mask.seed;
    j["noise"] = {{"mode", to_string(cfg.noise.mode)},
                  {"alpha", cfg.noise.alpha},
                  {"base_sigma", cfg.noise.base_sigma},
                  {"n_sources", cfg.noise.n_sources},
                  {"corner_fraction", cfg.noise.corner_fraction}};
    if (cfg.noise.weights_seed) j["noise"]["weights_seed"] = *cfg.noise.weights_seed;
    j["model"] = {{"kind", to_string(cfg.model.kind)},
                  {"steps", cfg.model.steps},
                  {"dc_solver", cfg.model.dc_solver == DcSolver::gradient ? "gradient" : "cg"},
                  {"dc_lambda", cfg.model.dc_lambda},
                  {"dc_cg_iters", cfg.model.dc_cg_iters},
                  {"net",
                   {{"layers", cfg.model.net_layers},
                    {"channels", cfg.model.net_channels},
                    {"kernel", cfg.model.net_kernel},
                    {"gain", cfg.model.net_gain}}},
                  {"weights_seed", cfg.model.weights_seed}};
    j["estimators"] = json::array();
    for (EstimatorKind e : cfg.estimators) j["estimators"].push_back(to_string(e));
    j["sketch"] = {{"S", cfg.sketch_S}, {"distribution", to_string(cfg.distribution)}};
    j["mc"] = {{"trials", cfg.mc_trials}};
    j["linearization"] = to_string(cfg.linearization);
    j["chunk"] = cfg.chunk;
    j["threads"] = cfg.threads;
    j["seed"] = cfg.master_seed;
    j["out"] = cfg.out_dir;
    if (cfg.sweep) {
        j["sweep"] = {{"param", cfg.sweep->param}};
        if (cfg.sweep->param == "scheme") j["sweep"]["values"] = cfg.sweep->scheme_values;
        else j["sweep"]["values"] = cfg.sweep->values;
    }
    j["bench"] = {{"repeats", cfg.bench.repeats}};
    return j.dump(2) + "\n";
}

} // namespace varsketch
