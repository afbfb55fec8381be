// varsketch: voxel-wise variance maps for differentiable MRI
// reconstructions, with Monte-Carlo and exact cross-checks.
//
//   varsketch run    --config cfg.json [--out DIR] [--seed N] [--threads T]
//   varsketch bench  --config cfg.json [--out DIR] [--seed N] [--threads T]
//   varsketch sweep  --config cfg.json [--out DIR] [--seed N] [--threads T]
//   varsketch render --in MAPBASE --out IMAGE [--amplify A] [--signed]
//
// Exit codes: 0 ok, 1 unexpected error, 2 bad configuration or infeasible
// request, 3 numerical/domain failure, 4 i/o failure.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "varsketch/errors.hpp"
#include "varsketch/runner.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;
    std::int64_t threads = -1;
};

void add_common(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "experiment config (json)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", ov.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", ov.seed, "master seed (overrides config)");
    cmd->add_option("--threads", ov.threads, "worker threads (overrides config)");
}

varsketch::ExperimentConfig load_with_overrides(const Overrides& ov) {
    varsketch::ExperimentConfig cfg = varsketch::load_config(ov.config_path);
    if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
    if (ov.seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.threads >= 0) {
        if (ov.threads == 0) throw varsketch::ConfigError("--threads: must be at least 1");
        cfg.threads = static_cast<std::size_t>(ov.threads);
    }
    return cfg;
}

int do_run(const Overrides& ov) {
    const varsketch::ExperimentConfig cfg = load_with_overrides(ov);
    const varsketch::RunArtifacts art = varsketch::run_experiment(cfg);
    for (const auto& [kind, map] : art.maps)
        std::cout << varsketch::to_string(kind) << ": " << map.meta.samples << " samples, "
                  << map.meta.wall_seconds << " s\n";
    for (const auto& [name, ref, rep] : art.reports)
        std::cout << name << " vs " << ref << ": pcc " << rep.pcc << "%, nrmse " << rep.nrmse
                  << "%\n";
    std::cout << "artifacts: " << art.out_dir.string() << "\n";
    return 0;
}

int do_bench(const Overrides& ov) {
    const varsketch::ExperimentConfig cfg = load_with_overrides(ov);
    const auto rows = varsketch::run_benchmark(cfg);
    for (const auto& row : rows)
        std::cout << row.estimator << ": median " << row.median_seconds << " s, ~"
                  << row.mem_estimate_bytes << " bytes transient\n";
    return 0;
}

int do_sweep(const Overrides& ov) {
    const varsketch::ExperimentConfig cfg = load_with_overrides(ov);
    const auto rows = varsketch::run_sweep(cfg);
    const std::string param = cfg.sweep ? cfg.sweep->param : "param";
    std::cout << varsketch::table_text(rows, param);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxel-wise variance maps for differentiable reconstructions"};
    app.require_subcommand(1);

    Overrides run_ov, bench_ov, sweep_ov;
    CLI::App* run_cmd = app.add_subcommand("run", "run estimators and write artifacts");
    add_common(run_cmd, run_ov);
    CLI::App* bench_cmd = app.add_subcommand("bench", "time each configured estimator");
    add_common(bench_cmd, bench_ov);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter, tabulate agreement");
    add_common(sweep_cmd, sweep_ov);

    std::string render_in, render_out;
    double render_amplify = 1.0;
    bool render_signed = false;
    CLI::App* render_cmd = app.add_subcommand("render", "render a stored map to pgm/ppm");
    render_cmd->add_option("--in", render_in, "map base path (without .hdr/.bin)")->required();
    render_cmd->add_option("--out", render_out, "image file to write")->required();
    render_cmd->add_option("--amplify", render_amplify, "scale values before clipping");
    render_cmd->add_flag("--signed", render_signed, "red/blue rendering for difference maps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(run_ov);
        if (bench_cmd->parsed()) return do_bench(bench_ov);
        if (sweep_cmd->parsed()) return do_sweep(sweep_ov);
        if (render_cmd->parsed()) {
            varsketch::render_map(render_in, render_out, render_amplify, render_signed);
            return 0;
        }
    } catch (const varsketch::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const varsketch::InfeasibleSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const varsketch::TooFewSamples& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const varsketch::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const varsketch::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
