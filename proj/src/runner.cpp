#include "varsketch/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "varsketch/errors.hpp"
#include "varsketch/io.hpp"
#include "varsketch/rng.hpp"
#include "varsketch/sensitivity.hpp"

namespace varsketch {

namespace {

// seed-derivation tags (arbitrary fixed constants, one per ingredient)
constexpr std::uint32_t kTagMask = 0x6d736b;      // mask geometry
constexpr std::uint32_t kTagPhantom = 0x706874;   // phantom field
constexpr std::uint32_t kTagCouplings = 0x777473; // noise source couplings
constexpr std::uint32_t kTagAcq = 0x616371;       // acquisition noise
constexpr std::uint32_t kTagCal = 0x63616c;       // calibration scan
constexpr std::uint32_t kTagProbe = 0x707262;     // sketch probes

CoilCovariance identity_covariance(std::size_t n_coils) {
    HermitianMatrix m(n_coils);
    for (std::size_t i = 0; i < n_coils; ++i) m.at(i, i) = cplx(1.0, 0.0);
    CoilCovariance cov;
    cov.n_coils = n_coils;
    cov.matrix = m;
    cov.factor = cholesky(m);
    cov.scale = 1.0;
    cov.provenance = "identity";
    return cov;
}

CoilCovariance source_covariance(const ExperimentConfig& cfg, std::uint64_t couplings_seed) {
    NoiseSourceModel src;
    src.n_sources = cfg.noise.n_sources ? cfg.noise.n_sources : cfg.n_coils;
    src.sigmas.resize(src.n_sources);
    for (std::size_t t = 0; t < src.n_sources; ++t) {
        const double spread =
            src.n_sources > 1
                ? 0.7 + 0.6 * static_cast<double>(t) / static_cast<double>(src.n_sources - 1)
                : 1.0;
        src.sigmas[t] = cfg.noise.base_sigma * spread;
    }
    // near-diagonal couplings keep the covariance well conditioned while
    // still correlating the coils
    src.weights = ComplexArray({cfg.n_coils, src.n_sources});
    CounterRng rng(couplings_seed, RngStream::covariance);
    for (std::size_t g = 0; g < cfg.n_coils; ++g)
        for (std::size_t t = 0; t < src.n_sources; ++t) {
            cplx w = 0.35 * rng.cgauss(g * src.n_sources + t);
            if (g == t) w += cplx(1.0, 0.0);
            src.weights.at2(g, t) = w;
        }
    return build_coil_covariance(src);
}

} // namespace

Pipeline build_pipeline(const ExperimentConfig& cfg) {
    Pipeline p;
    p.phantom_seed = cfg.phantom.seed
                         ? *cfg.phantom.seed
                         : derive_seed(cfg.master_seed, kTagPhantom);
    p.mask_seed = cfg.mask.seed ? *cfg.mask.seed : derive_seed(cfg.master_seed, kTagMask);
    p.couplings_seed = cfg.noise.weights_seed ? *cfg.noise.weights_seed
                                              : derive_seed(cfg.master_seed, kTagCouplings);
    p.acq_seed = derive_seed(cfg.master_seed, kTagAcq);
    p.cal_seed = derive_seed(cfg.master_seed, kTagCal);
    p.probe_seed = derive_seed(cfg.master_seed, kTagProbe);

    p.phantom = make_phantom(cfg.phantom.kind, cfg.rows, cfg.cols, p.phantom_seed,
                             cfg.phantom.point_spacing);

    MaskSpec mspec;
    mspec.scheme = cfg.mask.scheme;
    mspec.rows = cfg.rows;
    mspec.cols = cfg.cols;
    mspec.acceleration = cfg.mask.acceleration;
    mspec.seed = p.mask_seed;
    mspec.calib_region = cfg.mask.calib_region;
    SamplingMask mask = make_mask(mspec);

    p.op = std::make_unique<ImagingOperator>(birdcage_maps(cfg.n_coils, cfg.rows, cfg.cols),
                                             std::move(mask));

    // acquisition noise always follows the generating covariance; the
    // estimators may instead see an estimate of it, and alpha only scales
    // what the estimators see
    CoilCovariance est_cov;
    switch (cfg.noise.mode) {
        case NoiseMode::identity:
            p.acq_cov = identity_covariance(cfg.n_coils);
            est_cov = p.acq_cov;
            break;
        case NoiseMode::sources:
            p.acq_cov = source_covariance(cfg, p.couplings_seed);
            est_cov = p.acq_cov;
            break;
        case NoiseMode::estimated: {
            p.acq_cov = source_covariance(cfg, p.couplings_seed);
            // noise-only calibration scan on the full grid
            SampleCovariance cal{p.acq_cov, cfg.rows * cfg.cols};
            ComplexArray scan = sample_noise(cal, cfg.rows, cfg.cols, p.cal_seed);
            est_cov = estimate_coil_covariance(scan, cfg.noise.corner_fraction);
            break;
        }
    }

    p.y_clean = p.op->forward(p.phantom.image);
    p.measured = p.y_clean;
    if (cfg.linearization == LinPoint::measured) {
        SampleCovariance acq{p.acq_cov, cfg.rows * cfg.cols};
        ComplexArray noise = sample_noise(acq, cfg.rows, cfg.cols, p.acq_seed);
        p.op->mask_inplace(noise); // unmeasured frequencies acquire nothing
        p.measured += noise;
    }

    p.model = std::make_unique<ReconModel>(cfg.model, p.op.get());

    p.plan.op = p.op.get();
    p.plan.model = p.model.get();
    p.plan.cov = SampleCovariance{est_cov.with_scale(cfg.noise.alpha), cfg.rows * cfg.cols};
    p.plan.measured = p.measured;
    p.plan.linearization = p.op->adjoint(p.measured);
    p.plan.S = cfg.sketch_S;
    p.plan.seed = p.probe_seed;
    p.plan.distribution = cfg.distribution;
    p.plan.chunk = cfg.chunk;
    p.plan.n_threads = cfg.threads;
    return p;
}

namespace {

VarianceMap run_estimator(const Pipeline& p, const ExperimentConfig& cfg, EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::sketch: return sketch_variance(p.plan);
        case EstimatorKind::naive: return naive_variance(p.plan);
        case EstimatorKind::mc: {
            McOptions mc;
            mc.trials = cfg.mc_trials;
            return mc_variance(p.plan, mc);
        }
        case EstimatorKind::brute: return brute_force_diag(p.plan);
    }
    throw ConfigError("run_estimator: unhandled estimator kind");
}

// Higher value wins the reference slot in pairwise comparisons: exact
// backends over sampled ones, empirical over sketch.
int reference_rank(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::brute: return 3;
        case EstimatorKind::naive: return 2;
        case EstimatorKind::mc: return 1;
        case EstimatorKind::sketch: return 0;
    }
    return -1;
}

// Deletes everything this run created; directories last, innermost first.
class ArtifactTracker {
public:
    explicit ArtifactTracker(std::filesystem::path root) : root_(std::move(root)) {}

    std::filesystem::path file(const std::string& name) {
        std::filesystem::path path = root_ / name;
        files_.push_back(path);
        return path;
    }

    void track_dir(const std::filesystem::path& dir) { dirs_.push_back(dir); }

    void discard_all() noexcept {
        std::error_code ec;
        for (const auto& f : files_) {
            std::filesystem::remove(f, ec);
            // array bases expand to .hdr/.bin pairs
            for (const char* ext : {".hdr", ".bin"}) {
                std::filesystem::path side = f;
                side += ext;
                std::filesystem::remove(side, ec);
            }
        }
        for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it)
            if (std::filesystem::is_empty(*it, ec)) std::filesystem::remove(*it, ec);
    }

private:
    std::filesystem::path root_;
    std::vector<std::filesystem::path> files_;
    std::vector<std::filesystem::path> dirs_;
};

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

void write_run_outputs(const Pipeline& p, const ExperimentConfig& cfg, RunArtifacts& result,
                       ArtifactTracker& tracker) {
    write_text_file(tracker.file("config.json"), config_to_json(cfg));
    write_array(tracker.file("phantom"), p.phantom.image);
    write_mask(tracker.file("mask"), p.op->mask());
    tracker.file("mask.meta");
    write_coil_covariance(tracker.file("coil_cov"), p.plan.cov.coil_cov);
    tracker.file("coil_cov.meta");
    write_array(tracker.file("measured"), p.measured);
    write_array(tracker.file("zero_filled"), p.plan.linearization);

    for (const auto& [kind, map] : result.maps) {
        const std::string base = to_string(kind) + "_map";
        write_variance_map(tracker.file(base), map);
        tracker.file(base + ".meta");
        render_map(result.out_dir / base, tracker.file(base + ".pgm"),
                   /*amplify=*/1.0, /*signed_map=*/false);
    }

    // pairwise comparisons, most authoritative backend as reference
    std::ostringstream csv;
    csv << "map,reference,pcc_percent,nrmse_percent,slope,intercept,r_squared\n";
    csv << std::setprecision(12);
    for (auto a = result.maps.begin(); a != result.maps.end(); ++a) {
        for (auto b = std::next(a); b != result.maps.end(); ++b) {
            auto subject = a, reference = b;
            if (reference_rank(a->first) > reference_rank(b->first)) std::swap(subject, reference);
            const std::string sn = to_string(subject->first);
            const std::string rn = to_string(reference->first);
            const ComparisonReport rep =
                compare_maps(subject->second.values, reference->second.values);
            result.reports.emplace_back(sn, rn, rep);
            write_text_file(tracker.file("report_" + sn + "_vs_" + rn + ".txt"), report_text(rep));
            csv << sn << "," << rn << "," << rep.pcc << "," << rep.nrmse << "," << rep.slope << ","
                << rep.intercept << "," << rep.r_squared << "\n";

            RealArray diff(subject->second.values.shape());
            for (std::size_t i = 0; i < diff.size(); ++i)
                diff[i] = subject->second.values[i] - reference->second.values[i];
            const std::string diff_base = "diff_" + sn + "_vs_" + rn;
            write_array(tracker.file(diff_base), diff);
            render_map(result.out_dir / diff_base, tracker.file(diff_base + "_x10.ppm"),
                       /*amplify=*/10.0, /*signed_map=*/true);
        }
    }
    if (result.maps.size() > 1) write_text_file(tracker.file("reports.csv"), csv.str());

    if (result.maps.count(EstimatorKind::sketch) && result.maps.count(EstimatorKind::mc)) {
        const RealArray z = zscore_map(result.maps.at(EstimatorKind::sketch).values,
                                       result.maps.at(EstimatorKind::mc).values, cfg.mc_trials);
        write_array(tracker.file("zscore_sketch_vs_mc"), z);
    }

    KvPairs manifest;
    manifest.emplace_back("config", "config.json");
    manifest.emplace_back("master_seed", std::to_string(cfg.master_seed));
    manifest.emplace_back("phantom_seed", std::to_string(p.phantom_seed));
    manifest.emplace_back("mask_seed", std::to_string(p.mask_seed));
    manifest.emplace_back("couplings_seed", std::to_string(p.couplings_seed));
    manifest.emplace_back("acq_seed", std::to_string(p.acq_seed));
    manifest.emplace_back("cal_seed", std::to_string(p.cal_seed));
    manifest.emplace_back("probe_seed", std::to_string(p.probe_seed));
    {
        std::ostringstream os;
        os << p.op->mask().achieved_acceleration();
        manifest.emplace_back("achieved_acceleration", os.str());
    }
    manifest.emplace_back("covariance", p.plan.cov.coil_cov.provenance);
    for (const auto& [kind, map] : result.maps) {
        std::ostringstream os;
        os << map.meta.wall_seconds;
        manifest.emplace_back("wall_seconds_" + to_string(kind), os.str());
    }
    write_kv(tracker.file("manifest.txt"), manifest);
}

} // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
    Pipeline p = build_pipeline(cfg);

    RunArtifacts result;
    result.out_dir = cfg.out_dir;
    for (EstimatorKind kind : cfg.estimators)
        result.maps.emplace(kind, run_estimator(p, cfg, kind));

    std::filesystem::create_directories(result.out_dir);
    ArtifactTracker tracker(result.out_dir);
    tracker.track_dir(result.out_dir);
    try {
        write_run_outputs(p, cfg, result, tracker);
    } catch (...) {
        tracker.discard_all();
        throw;
    }
    return result;
}

std::vector<BenchRow> run_benchmark(const ExperimentConfig& cfg) {
    Pipeline p = build_pipeline(cfg);
    const std::size_t image_bytes = cfg.rows * cfg.cols * sizeof(cplx);

    std::vector<BenchRow> rows;
    for (EstimatorKind kind : cfg.estimators) {
        std::vector<double> times;
        times.reserve(cfg.bench.repeats);
        for (std::size_t r = 0; r < cfg.bench.repeats; ++r) {
            const VarianceMap map = run_estimator(p, cfg, kind);
            times.push_back(map.meta.wall_seconds);
        }
        std::sort(times.begin(), times.end());
        BenchRow row;
        row.estimator = to_string(kind);
        row.median_seconds = times[times.size() / 2];
        // transient working set: MC must hold one partial per trial batch
        // of reconstructions, the streaming backends hold one chunk
        row.mem_estimate_bytes =
            (kind == EstimatorKind::mc ? cfg.mc_trials : cfg.chunk) * image_bytes;
        rows.push_back(row);
    }

    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream txt, csv;
    txt << std::left << std::setw(10) << "estimator" << std::right << std::setw(16) << "median[s]"
        << std::setw(16) << "mem[bytes]" << "\n";
    csv << "estimator,median_seconds,mem_estimate_bytes\n";
    txt << std::fixed;
    for (const BenchRow& row : rows) {
        txt << std::left << std::setw(10) << row.estimator << std::right << std::setw(16)
            << std::setprecision(6) << row.median_seconds << std::setw(16)
            << row.mem_estimate_bytes << "\n";
        csv << row.estimator << "," << std::setprecision(9) << row.median_seconds << ","
            << row.mem_estimate_bytes << "\n";
    }
    write_text_file(std::filesystem::path(cfg.out_dir) / "bench.txt", txt.str());
    write_text_file(std::filesystem::path(cfg.out_dir) / "bench.csv", csv.str());
    return rows;
}

namespace {

ExperimentConfig config_with_value(const ExperimentConfig& base, const std::string& param,
                                   double value, const std::string& scheme_value) {
    ExperimentConfig cfg = base;
    if (param == "S") cfg.sketch_S = static_cast<std::size_t>(std::llround(value));
    else if (param == "N") cfg.mc_trials = static_cast<std::size_t>(std::llround(value));
    else if (param == "alpha") cfg.noise.alpha = value;
    else if (param == "R") cfg.mask.acceleration = value;
    else if (param == "K") cfg.model.steps = static_cast<std::size_t>(std::llround(value));
    else if (param == "scheme") cfg.mask.scheme = mask_scheme_from_string(scheme_value);
    else throw ConfigError("sweep.param: unknown parameter " + param);
    return cfg;
}

EstimatorKind sweep_subject(const std::string& param) {
    return param == "N" ? EstimatorKind::mc : EstimatorKind::sketch;
}

EstimatorKind sweep_reference(const ExperimentConfig& cfg, EstimatorKind subject) {
    // prefer an exact backend, then the empirical one
    const EstimatorKind order[] = {EstimatorKind::naive, EstimatorKind::brute, EstimatorKind::mc,
                                   EstimatorKind::sketch};
    for (EstimatorKind k : order)
        if (k != subject && cfg.has_estimator(k)) return k;
    throw ConfigError("sweep: config needs a second estimator to compare against");
}

std::string value_label(const std::string& param, double value, const std::string& scheme_value) {
    if (param == "scheme") return scheme_value;
    std::ostringstream os;
    os << value;
    return os.str();
}

} // namespace

std::vector<ConvergenceRow> run_sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("sweep: config has no sweep block");
    const SweepConfig& sw = *cfg.sweep;
    const EstimatorKind subject = sweep_subject(sw.param);
    const EstimatorKind reference = sweep_reference(cfg, subject);

    std::filesystem::create_directories(cfg.out_dir);

    // For S/N sweeps only the subject's sample count changes, so the
    // reference map is shared; other parameters change the pipeline and
    // the reference is recomputed per value.
    const bool shared_reference = sw.param == "S" || sw.param == "N";
    VarianceMap shared_ref;
    Pipeline shared_pipeline;
    if (shared_reference) {
        shared_pipeline = build_pipeline(cfg);
        shared_ref = run_estimator(shared_pipeline, cfg, reference);
    }

    const std::size_t count = sw.param == "scheme" ? sw.scheme_values.size() : sw.values.size();
    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
        const double value = sw.param == "scheme" ? static_cast<double>(i) : sw.values[i];
        const std::string scheme_value = sw.param == "scheme" ? sw.scheme_values[i] : "";
        const ExperimentConfig vcfg = config_with_value(cfg, sw.param, value, scheme_value);

        const std::string label = value_label(sw.param, value, scheme_value);
        const std::filesystem::path vdir =
            std::filesystem::path(cfg.out_dir) / ("sweep_" + sw.param + "_" + label);
        std::filesystem::create_directories(vdir);

        VarianceMap subject_map, reference_map;
        if (shared_reference) {
            SketchPlan plan = shared_pipeline.plan;
            plan.S = vcfg.sketch_S;
            if (subject == EstimatorKind::sketch) {
                subject_map = sketch_variance(plan);
            } else {
                McOptions mc;
                mc.trials = vcfg.mc_trials;
                subject_map = mc_variance(plan, mc);
            }
            reference_map = shared_ref;
        } else {
            Pipeline p = build_pipeline(vcfg);
            subject_map = run_estimator(p, vcfg, subject);
            reference_map = run_estimator(p, vcfg, reference);
        }

        write_variance_map(vdir / (to_string(subject) + "_map"), subject_map);
        write_variance_map(vdir / (to_string(reference) + "_map"), reference_map);

        const ComparisonReport rep = compare_maps(subject_map.values, reference_map.values);
        rows.push_back({value, rep.nrmse, rep.pcc});
    }

    write_text_file(std::filesystem::path(cfg.out_dir) / "sweep_table.txt",
                    table_text(rows, sw.param));
    write_text_file(std::filesystem::path(cfg.out_dir) / "sweep_table.csv",
                    table_csv(rows, sw.param));
    if (sw.param == "scheme") {
        std::ostringstream legend;
        for (std::size_t i = 0; i < sw.scheme_values.size(); ++i)
            legend << i << ": " << sw.scheme_values[i] << "\n";
        write_text_file(std::filesystem::path(cfg.out_dir) / "sweep_legend.txt", legend.str());
    }
    return rows;
}

void render_map(const std::filesystem::path& map_base, const std::filesystem::path& image_path,
                double amplify, bool signed_map) {
    const RealArray map = read_real_array(map_base);
    if (map.rank() != 2) throw ShapeMismatch("render_map: expected a rank-2 map");
    const std::size_t rows = map.shape()[0];
    const std::size_t cols = map.shape()[1];

    double peak = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) peak = std::max(peak, std::abs(map[i]));
    if (peak == 0.0) peak = 1.0;

    if (signed_map) {
        std::vector<std::uint8_t> rgb(rows * cols * 3, 0);
        for (std::size_t i = 0; i < map.size(); ++i) {
            const double v = std::clamp(amplify * map[i] / peak, -1.0, 1.0);
            const std::uint8_t mag = static_cast<std::uint8_t>(std::lround(255.0 * std::abs(v)));
            if (v >= 0.0) rgb[3 * i + 0] = mag;
            else rgb[3 * i + 2] = mag;
        }
        write_ppm(image_path, rows, cols, rgb);
    } else {
        std::vector<std::uint8_t> gray(rows * cols, 0);
        for (std::size_t i = 0; i < map.size(); ++i) {
            const double v = std::clamp(amplify * map[i] / peak, 0.0, 1.0);
            gray[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
        }
        write_pgm(image_path, rows, cols, gray);
    }
}

} // namespace varsketch
