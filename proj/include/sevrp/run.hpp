#pragma once

#include "sevrp/measures.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sevrp {

/// Everything one run needs. Settable by key through apply_setting; keys use
/// dashes (`i-max`) and underscores are accepted as aliases.
struct RunConfig {
    std::filesystem::path instance;
    std::optional<std::filesystem::path> scenario_file;
    Distribution distribution = Distribution::Uniform;
    std::size_t scenario_count = 1;
    std::optional<std::size_t> reduce_to;
    bool symmetric = false;
    std::uint64_t seed = 1;

    // fractions of q_max; unset keeps the instance's own values
    std::optional<double> threshold_fraction;
    std::optional<double> goal_fraction;
    double q_max = 24.0;
    std::optional<double> speed;

    int i_max = 2000;
    double gamma = 1.0;
    double time_limit = 10800.0;
    double sp_time_limit = 600.0;
    bool use_ndcs = true;
    bool use_filters = true;
    bool first_improvement = false;
    std::vector<Neighborhood> vnd_order{kDefaultOrder.begin(), kDefaultOrder.end()};

    /// Throws std::invalid_argument for a bad fraction pair or count.
    void check() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws ConfigError on an unknown key or unparsable value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// `key = value` lines; `#` starts a comment.
std::vector<std::pair<std::string, std::string>> read_settings(std::istream& in);

const std::vector<std::string>& setting_keys();

/// Stable 64-bit seed for a named random stream derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, const std::string& stream);

/// Relative paths that do not exist are looked up under $SEVRP_INSTANCE_DIR.
std::filesystem::path resolve_instance_path(const std::filesystem::path& p);

Instance load_configured_instance(const RunConfig& cfg);
ScenarioSet configured_scenarios(const RunConfig& cfg, const Instance& inst);
SearchParams configured_search(const RunConfig& cfg);

struct SolveReport {
    std::string instance;
    std::size_t scenarios = 0;
    IlsSpResult result;
    double wall_time = 0.0;
};

/// Loads, builds scenarios, runs ILS-SP. Progress lines go to `log` when given.
SolveReport run_solve(const RunConfig& cfg, std::ostream* log = nullptr);
SolveReport run_solve(const RunConfig& cfg, const Instance& inst, const ScenarioSet& set, std::ostream* log = nullptr);

/// Deterministic summary; wall time is left to the log.
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const SolveReport& r);

/// Routes, durations and per-scenario traces as JSON.
void write_solution(std::ostream& out, const Instance& inst, const ScenarioSet& set, const SolveReport& r,
                    bool use_ndcs);

enum class SweepAxis { QThreshold, QGoal, ScenarioCount };
SweepAxis sweep_axis_from_string(const std::string& text);
std::string to_string(SweepAxis a);

struct SweepCell {
    std::string instance;
    double value = 0.0;
    std::string status; // ok, infeasible, error
    double objective = kInfeasible;
    std::size_t routes = 0;
    std::string message;
};

/// One solve per (instance, value). Infeasible cells are data; other
/// failures are recorded with status "error" and the sweep continues.
std::vector<SweepCell> run_sweep(const RunConfig& base, const std::vector<std::filesystem::path>& instances,
                                 SweepAxis axis, const std::vector<double>& values, std::ostream* log = nullptr);

void write_sweep(std::ostream& out, SweepAxis axis, const std::vector<SweepCell>& cells);

/// Per-arc moments of a scenario set as CSV (i, j, mean, std, min, max).
void write_inspection(std::ostream& out, const ScenarioSet& set);

} // namespace sevrp
