#include "varsketch/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "varsketch/errors.hpp"

namespace varsketch {

ComparisonReport compare_maps(const RealArray& a, const RealArray& b) {
    a.require_same_shape(b, "compare_maps");
    const std::size_t n = a.size();
    if (n < 2) throw DegenerateReference("compare_maps: need at least 2 voxels");

    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double var_a = 0.0, var_b = 0.0, cov = 0.0, diff2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        var_a += da * da;
        var_b += db * db;
        cov += da * db;
        diff2 += (a[i] - b[i]) * (a[i] - b[i]);
        ref2 += b[i] * b[i];
    }
    if (var_b == 0.0)
        throw DegenerateReference("compare_maps: reference map is constant");
    if (var_a == 0.0)
        throw DegenerateReference("compare_maps: first map is constant");

    const double r = cov / std::sqrt(var_a * var_b);
    ComparisonReport rep;
    rep.pcc = 100.0 * r;
    rep.nrmse = 100.0 * std::sqrt(diff2 / ref2);
    rep.slope = cov / var_b;
    rep.intercept = mean_a - rep.slope * mean_b;
    rep.r_squared = r * r;
    rep.n_voxels = n;
    return rep;
}

std::vector<ConvergenceRow> convergence_table(
    const RealArray& reference, const std::vector<std::pair<double, const RealArray*>>& series) {
    std::vector<ConvergenceRow> rows;
    rows.reserve(series.size());
    for (const auto& [param, map] : series) {
        const ComparisonReport rep = compare_maps(*map, reference);
        rows.push_back({param, rep.nrmse, rep.pcc});
    }
    return rows;
}

RealArray zscore_map(const RealArray& a, const RealArray& mc, std::size_t n_trials) {
    a.require_same_shape(mc, "zscore_map");
    if (n_trials < 2) throw DegenerateReference("zscore_map: need at least 2 trials");
    const double scale = std::sqrt(static_cast<double>(n_trials - 1));
    RealArray z(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double se = mc[i] / scale;
        z[i] = se > 0.0 ? (a[i] - mc[i]) / se : 0.0;
    }
    return z;
}

std::string report_text(const ComparisonReport& r) {
    std::ostringstream os;
    os << std::fixed;
    os << "pcc        " << std::setprecision(4) << std::setw(12) << r.pcc << " %\n";
    os << "nrmse      " << std::setprecision(4) << std::setw(12) << r.nrmse << " %\n";
    os << "slope      " << std::setprecision(6) << std::setw(12) << r.slope << "\n";
    os << "intercept  " << std::setprecision(6) << std::setw(12) << r.intercept << "\n";
    os << "r_squared  " << std::setprecision(6) << std::setw(12) << r.r_squared << "\n";
    os << "n_voxels   " << std::setw(12) << r.n_voxels << "\n";
    return os.str();
}

std::string table_text(const std::vector<ConvergenceRow>& rows, const std::string& param_name) {
    std::ostringstream os;
    os << std::left << std::setw(12) << param_name << std::right << std::setw(12) << "nrmse[%]"
       << std::setw(12) << "pcc[%]" << "\n";
    os << std::fixed;
    for (const auto& row : rows) {
        os << std::left << std::setw(12) << std::setprecision(6) << row.param << std::right
           << std::setw(12) << std::setprecision(4) << row.nrmse << std::setw(12)
           << std::setprecision(4) << row.pcc << "\n";
    }
    return os.str();
}

std::string table_csv(const std::vector<ConvergenceRow>& rows, const std::string& param_name) {
    std::ostringstream os;
    os << param_name << ",nrmse_percent,pcc_percent\n";
    os << std::setprecision(12);
    for (const auto& row : rows) os << row.param << "," << row.nrmse << "," << row.pcc << "\n";
    return os.str();
}

} // namespace varsketch
