#pragma once

#include "sevrp/instance.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sevrp {

/// Realized energy consumption e_ij (kWh) over all ordered node pairs, row-major.
struct Scenario {
    std::size_t n = 0;
    std::vector<double> energy;

    double operator()(NodeId i, NodeId j) const
    {
        return energy[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
    }
    double& operator()(NodeId i, NodeId j)
    {
        return energy[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::vector<double> probabilities;

    std::size_t size() const { return scenarios.size(); }

    /// Throws std::invalid_argument when the set is empty, ragged, has negative
    /// energies or probabilities that do not sum to one.
    void check() const;

    friend bool operator==(const ScenarioSet&, const ScenarioSet&) = default;
};

enum class Distribution { Uniform, TruncatedNormal, TruncatedExponential };

std::string to_string(Distribution d);
/// Accepts "uniform", "truncated-normal", "truncated-exponential" (also "normal", "exponential").
Distribution distribution_from_string(const std::string& text);

struct GenerationOptions {
    Distribution distribution = Distribution::Uniform;
    std::size_t count = 1;
    std::uint64_t seed = 1;
    bool symmetric = false; // sample i<j once and mirror it
};

/// count = 1 gives the nominal scenario; otherwise every arc is sampled
/// independently with mean ê and variance (0.5 ê)^2 / 12, p_s = 1/count.
ScenarioSet generate_scenarios(const Instance& instance, const GenerationOptions& options);

ScenarioSet nominal_scenarios(const Instance& instance);

/// Probability-weighted per-arc mean.
Scenario mean_scenario(const ScenarioSet& set);

/// Set holding `s` alone with probability 1.
ScenarioSet singleton(Scenario s);

struct ReducedScenarioSet {
    std::vector<std::size_t> kept_indices; // selection order
    ScenarioSet reduced;                   // aligned with kept_indices
    double transport_distance = 0.0;
};

/// Euclidean distance between flattened energy vectors.
double scenario_distance(const Scenario& a, const Scenario& b);

/// Fast forward selection down to m scenarios, with each deleted scenario's
/// probability moved to its nearest kept scenario.
ReducedScenarioSet reduce_ffs(const ScenarioSet& set, std::size_t m);

/// Sum over deleted scenarios of p * distance to the nearest kept scenario.
double transport_distance(const ScenarioSet& parent, const std::vector<std::size_t>& kept_indices);

/// Probabilities of `kept_indices` after redistributing the deleted mass
/// (ties go to the lowest parent index).
std::vector<double> redistribute(const ScenarioSet& parent, const std::vector<std::size_t>& kept_indices);

void save_scenarios(std::ostream& out, const ScenarioSet& set);
ScenarioSet load_scenarios(std::istream& in);

} // namespace sevrp
