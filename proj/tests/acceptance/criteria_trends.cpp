#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <vector>

#include "varsketch/estimators.hpp"
#include "varsketch/metrics.hpp"
#include "varsketch/runner.hpp"

#include "pipelines.hpp"

namespace acceptance {

namespace {

using namespace varsketch;
using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t count_inversions(const std::vector<double>& seq) {
    std::size_t inv = 0;
    for (std::size_t k = 0; k + 1 < seq.size(); ++k)
        if (seq[k + 1] > seq[k]) ++inv;
    return inv;
}

std::string seq_string(const std::vector<double>& seq) {
    std::string s;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (k) s += ", ";
        s += str(seq[k]);
    }
    return s;
}

bool bit_identical(const RealArray& a, const RealArray& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

} // namespace

bool criterion_a5() {
    const auto t0 = Clock::now();
    Checklist list;

    const ExperimentConfig cfg = reference_config(21);
    const Pipeline pipe = build_pipeline(cfg);
    const VarianceMap exact = naive_variance(pipe.plan);

    // sketch error against the exact map, probe budgets averaged over seeds
    std::vector<double> sketch_curve;
    for (std::size_t S : {100, 400, 700, 1000, 1900}) {
        double acc = 0.0;
        for (std::uint64_t r = 0; r < 5; ++r) {
            SketchPlan plan = pipe.plan;
            plan.S = S;
            plan.seed = 9000 + r;
            acc += compare_maps(sketch_variance(plan).values, exact.values).nrmse;
        }
        sketch_curve.push_back(acc / 5.0);
    }
    note("sketch NRMSE percent over S {100,400,700,1000,1900}: " + seq_string(sketch_curve));
    list.check("sketch error non-increasing in S with at most one inversion",
               count_inversions(sketch_curve) <= 1);

    // MC error against the exact map over trial budgets (nested trials)
    std::vector<double> mc_curve;
    for (std::size_t N : {100, 300, 1000, 3000}) {
        McOptions mc;
        mc.trials = N;
        mc_curve.push_back(compare_maps(mc_variance(pipe.plan, mc).values, exact.values).nrmse);
    }
    note("MC NRMSE percent over N {100,300,1000,3000}: " + seq_string(mc_curve));
    list.check("MC error non-increasing in N", count_inversions(mc_curve) == 0);

    // matched small budget, each averaged over 5 seeds
    double sketch100 = 0.0, mc100 = 0.0;
    for (std::uint64_t r = 0; r < 5; ++r) {
        SketchPlan plan = pipe.plan;
        plan.S = 100;
        plan.seed = 9200 + r;
        sketch100 += compare_maps(sketch_variance(plan).values, exact.values).nrmse;
        McOptions mc;
        mc.trials = 100;
        mc.noise_seed = 9300 + r;
        mc100 += compare_maps(mc_variance(pipe.plan, mc).values, exact.values).nrmse;
    }
    sketch100 /= 5.0;
    mc100 /= 5.0;
    list.check("matched budget S=N=100: sketch NRMSE " + str(sketch100) + "% < MC NRMSE " +
                   str(mc100) + "%",
               sketch100 < mc100);

    const double secs = elapsed(t0);
    list.check_le("runtime seconds", secs, 1800.0);
    return list.ok();
}

bool criterion_a6() {
    const auto t0 = Clock::now();
    Checklist list;

    const ExperimentConfig cfg = reference_config(21);
    const Pipeline pipe = build_pipeline(cfg);

    // exact alpha scaling for the linear identity model, three backends
    {
        ModelSpec id;
        id.kind = ModelKind::identity;
        const ReconModel ident(id, pipe.op.get());
        SketchPlan base = pipe.plan;
        base.model = &ident;

        double worst = 0.0;
        for (double alpha : {4.0, 16.0}) {
            SketchPlan scaled = base;
            scaled.cov.coil_cov = pipe.plan.cov.coil_cov.with_scale(alpha);
            const VarianceMap s1 = sketch_variance(base);
            const VarianceMap sa = sketch_variance(scaled);
            const VarianceMap n1 = naive_variance(base);
            const VarianceMap na = naive_variance(scaled);
            McOptions mc;
            mc.trials = 2000;
            const VarianceMap m1 = mc_variance(base, mc);
            const VarianceMap ma = mc_variance(scaled, mc);
            for (std::size_t i = 0; i < s1.values.size(); ++i) {
                const auto rel = [&](double got, double want) {
                    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
                };
                worst = std::max(worst, rel(sa.values[i], alpha * s1.values[i]));
                worst = std::max(worst, rel(na.values[i], alpha * n1.values[i]));
                worst = std::max(worst, rel(ma.values[i], alpha * m1.values[i]));
            }
        }
        list.check_le("identity model: map at alpha {4,16} vs alpha x (alpha=1 map), "
                      "sketch/naive/mc",
                      worst, 1e-9);
    }

    // degradation direction under heavy noise for the nonlinear model
    {
        const auto agreement = [&](double alpha) {
            SketchPlan plan = pipe.plan;
            plan.cov.coil_cov = pipe.plan.cov.coil_cov.with_scale(alpha);
            const VarianceMap sk = sketch_variance(plan);
            McOptions mc;
            mc.trials = cfg.mc_trials;
            const VarianceMap ref = mc_variance(plan, mc);
            return compare_maps(sk.values, ref.values).nrmse;
        };
        const double low = agreement(1.0);
        const double high = agreement(50.0);
        list.check("nonlinear model: sketch-vs-MC NRMSE " + str(low) + "% at alpha=1 <= " +
                       str(high) + "% at alpha=50",
                   low <= high);
    }

    // correlation holds across every mask scheme and acceleration
    {
        double worst_pcc = 100.0;
        for (MaskScheme scheme : {MaskScheme::uniform_1d, MaskScheme::random_1d,
                                  MaskScheme::uniform_random_2d, MaskScheme::poisson_disc_2d})
            for (double r : {4.0, 8.0, 16.0}) {
                ExperimentConfig c = reference_config(21);
                c.mask.scheme = scheme;
                c.mask.acceleration = r;
                const Pipeline p = build_pipeline(c);
                const VarianceMap sk = sketch_variance(p.plan);
                McOptions mc;
                mc.trials = c.mc_trials;
                const VarianceMap ref = mc_variance(p.plan, mc);
                const ComparisonReport rep = compare_maps(sk.values, ref.values);
                note(to_string(scheme) + " R=" + str(r) + ": pcc " + str(rep.pcc) + "%");
                worst_pcc = std::min(worst_pcc, rep.pcc);
            }
        list.check_ge("minimum PCC percent over 4 schemes x R {4,8,16}", worst_pcc, 99.0);
    }

    const double secs = elapsed(t0);
    list.check_le("runtime seconds", secs, 2700.0);
    return list.ok();
}

bool criterion_a7() {
    const auto t0 = Clock::now();
    Checklist list;

    const ExperimentConfig cfg = reference_config(21);
    const Pipeline pipe = build_pipeline(cfg);

    const auto timed = [](const auto& fn) {
        const auto t = Clock::now();
        fn();
        return elapsed(t);
    };

    // sketch against MC wall time, medians of 3
    std::vector<double> t_sketch, t_mc, t_naive;
    for (int rep = 0; rep < 3; ++rep) {
        t_sketch.push_back(timed([&] { sketch_variance(pipe.plan); }));
        McOptions mc;
        mc.trials = cfg.mc_trials;
        t_mc.push_back(timed([&] { mc_variance(pipe.plan, mc); }));
        t_naive.push_back(timed([&] { naive_variance(pipe.plan); }));
    }
    const double med_sketch = median_of(t_sketch);
    const double med_mc = median_of(t_mc);
    const double med_naive = median_of(t_naive);
    list.check("sketch S=1000 (" + str(med_sketch) + " s) at least 2x faster than MC N=3000 (" +
                   str(med_mc) + " s)",
               2.0 * med_sketch < med_mc);
    list.check("naive over 1024 voxels (" + str(med_naive) +
                   " s) slower than sketch with S=1000 (" + str(med_sketch) + " s)",
               med_naive > med_sketch);

    // sketch cost grows with unrolled depth
    std::vector<double> depth_curve;
    for (std::size_t k : {2, 4, 6, 8, 10}) {
        ExperimentConfig c = reference_config(21);
        c.model.steps = k;
        c.sketch_S = 500;
        const Pipeline p = build_pipeline(c);
        std::vector<double> reps;
        for (int rep = 0; rep < 3; ++rep)
            reps.push_back(timed([&] { sketch_variance(p.plan); }));
        depth_curve.push_back(median_of(reps));
    }
    note("sketch seconds over K {2,4,6,8,10}: " + seq_string(depth_curve));
    bool monotone = true;
    for (std::size_t k = 0; k + 1 < depth_curve.size(); ++k)
        if (depth_curve[k + 1] <= depth_curve[k]) monotone = false;
    list.check("sketch time strictly increasing in unrolled depth", monotone);

    const double secs = elapsed(t0);
    list.check_le("runtime seconds", secs, 1800.0);
    return list.ok();
}

bool criterion_a8() {
    const auto t0 = Clock::now();
    Checklist list;

    const ExperimentConfig cfg = reference_config(21);
    const Pipeline pipe = build_pipeline(cfg);

    const auto with_threads = [&](std::size_t n) {
        SketchPlan plan = pipe.plan;
        plan.n_threads = n;
        return plan;
    };

    const auto run_all = [&](std::size_t threads) {
        const SketchPlan plan = with_threads(threads);
        std::vector<RealArray> maps;
        maps.push_back(sketch_variance(plan).values);
        McOptions mc;
        mc.trials = cfg.mc_trials;
        maps.push_back(mc_variance(plan, mc).values);
        maps.push_back(naive_variance(plan).values);
        maps.push_back(brute_force_diag(plan).values);
        return maps;
    };

    const std::vector<RealArray> one = run_all(1);
    const std::vector<RealArray> four = run_all(4);
    const char* names[] = {"sketch", "mc", "naive", "brute"};
    for (std::size_t i = 0; i < one.size(); ++i)
        list.check(std::string(names[i]) + " map bit-identical for thread counts {1,4}",
                   bit_identical(one[i], four[i]));

    const double secs = elapsed(t0);
    list.check_le("runtime seconds", secs, 1800.0);
    return list.ok();
}

} // namespace acceptance
