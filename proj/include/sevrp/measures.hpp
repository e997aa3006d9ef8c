#pragma once

#include "sevrp/set_partition.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace sevrp {

/// Stochastic value measures. Infinite EEV propagates into vss and vss_pct.
struct MeasuresReport {
    double rp = 0.0;
    double ws = 0.0;
    double evpi = 0.0;
    double evpi_pct = 0.0;
    double evp = 0.0;
    double eev = 0.0;
    double vss = 0.0;
    double vss_pct = 0.0;
    std::vector<std::string> warnings; // heuristic-gap flags, never fatal
};

/// Fills derived fields from rp, ws, evp, eev. Percentages are relative to rp.
MeasuresReport make_report(double rp, double ws, double evp, double eev, double tol = 1e-6);

/// Probability-weighted objective of one full solve per scenario.
double wait_and_see(const Instance& instance, const ScenarioSet& scenarios, const SearchParams& params,
                    double sp_time_limit);

struct ExpectedValueResult {
    double evp = kInfeasible;
    double eev = kInfeasible;
    Solution mean_solution;
};

/// Solves the mean-scenario problem, then prices its routes on the full set.
ExpectedValueResult expected_value_analysis(const Instance& instance, const ScenarioSet& scenarios,
                                            const SearchParams& params, double sp_time_limit);

/// RP, WS, EVP and EEV with one call each.
MeasuresReport compute_measures(const Instance& instance, const ScenarioSet& scenarios, const SearchParams& params,
                                double sp_time_limit);

/// (z_algo - z_model) / z_model in percent.
double gap_percent(double z_algo, double z_model);

void write_measures_header(std::ostream& out);
void write_measures_row(std::ostream& out, const std::string& instance, const MeasuresReport& r);

/// Fixed-precision text for a CSV cell; infinity prints as "inf".
std::string format_number(double v, int digits = 4);

} // namespace sevrp
