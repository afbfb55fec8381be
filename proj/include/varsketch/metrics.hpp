#pragma once

// Map-against-map evaluation: Pearson correlation, normalized RMSE,
// least-squares regression, convergence tables, and a per-voxel z-score
// surrogate for significance against a Monte-Carlo reference.
//
// Conventions: PCC and NRMSE are percentages; NRMSE normalizes by the l2
// norm of the reference (second) argument, so comparing 2b against b gives
// exactly 100.

#include <string>
#include <utility>
#include <vector>

#include "varsketch/array.hpp"

namespace varsketch {

struct ComparisonReport {
    double pcc = 0.0;       // percent, in [-100, 100]
    double nrmse = 0.0;     // percent, >= 0
    double r_squared = 0.0; // of the least-squares fit a ~ slope*b + intercept
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t n_voxels = 0;
};

// b is the reference.  Throws DegenerateReference when either map is
// constant (correlation is undefined there).
ComparisonReport compare_maps(const RealArray& a, const RealArray& b);

struct ConvergenceRow {
    double param = 0.0;
    double nrmse = 0.0;
    double pcc = 0.0;
};

std::vector<ConvergenceRow> convergence_table(
    const RealArray& reference, const std::vector<std::pair<double, const RealArray*>>& series);

// (a - mc) / SE per voxel, where SE = mc * sqrt(1/(n_trials - 1)) is the
// sampling error of a complex sample variance over n_trials draws.
RealArray zscore_map(const RealArray& a, const RealArray& mc, std::size_t n_trials);

// Renderers: aligned plain text and comma-separated with a header row.
std::string report_text(const ComparisonReport& r);
std::string table_text(const std::vector<ConvergenceRow>& rows, const std::string& param_name);
std::string table_csv(const std::vector<ConvergenceRow>& rows, const std::string& param_name);

} // namespace varsketch
