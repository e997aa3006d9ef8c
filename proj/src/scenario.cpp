#include "sevrp/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sevrp {

void ScenarioSet::check() const
{
    if (scenarios.empty() || scenarios.size() != probabilities.size()) {
        throw std::invalid_argument("scenario set needs as many probabilities as scenarios (at least one)");
    }
    double total = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const auto& sc = scenarios[s];
        if (sc.energy.size() != sc.n * sc.n || sc.n != scenarios.front().n) {
            throw std::invalid_argument("scenario " + std::to_string(s) + " has the wrong dimension");
        }
        if (std::any_of(sc.energy.begin(), sc.energy.end(), [](double e) { return !(e >= 0.0); })) {
            throw std::invalid_argument("scenario " + std::to_string(s) + " has a negative energy");
        }
        if (!(probabilities[s] >= 0.0)) {
            throw std::invalid_argument("negative probability");
        }
        total += probabilities[s];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("probabilities sum to " + std::to_string(total));
    }
}

std::string to_string(Distribution d)
{
    switch (d) {
    case Distribution::Uniform:
        return "uniform";
    case Distribution::TruncatedNormal:
        return "truncated-normal";
    case Distribution::TruncatedExponential:
        return "truncated-exponential";
    }
    return "unknown";
}

Distribution distribution_from_string(const std::string& text)
{
    if (text == "uniform") {
        return Distribution::Uniform;
    }
    if (text == "truncated-normal" || text == "normal") {
        return Distribution::TruncatedNormal;
    }
    if (text == "truncated-exponential" || text == "exponential") {
        return Distribution::TruncatedExponential;
    }
    throw std::invalid_argument("unknown distribution '" + text + "'");
}

namespace {

class ArcSampler {
public:
    ArcSampler(Distribution d, std::uint64_t seed) : dist_(d), rng_(seed) {}

    double operator()(double nominal)
    {
        if (nominal <= 0.0) {
            return 0.0;
        }
        const double sigma = 0.5 * nominal / std::sqrt(12.0);
        switch (dist_) {
        case Distribution::Uniform:
            return std::uniform_real_distribution<double>(0.75 * nominal, 1.25 * nominal)(rng_);
        case Distribution::TruncatedNormal: {
            std::normal_distribution<double> n(nominal, sigma);
            for (;;) {
                const double v = n(rng_);
                if (v >= 0.0 && v <= 2.0 * nominal) {
                    return v;
                }
            }
        }
        case Distribution::TruncatedExponential: {
            std::exponential_distribution<double> e(1.0 / sigma);
            const double lo = std::max(0.0, nominal - sigma);
            const double hi = nominal + 6.0 * sigma;
            for (;;) {
                const double v = nominal - sigma + e(rng_);
                if (v >= lo && v <= hi) {
                    return v;
                }
            }
        }
        }
        throw std::logic_error("unreachable");
    }

private:
    Distribution dist_;
    std::mt19937_64 rng_;
};

} // namespace

ScenarioSet nominal_scenarios(const Instance& instance)
{
    Scenario s{instance.size(), {instance.nominal_energy_matrix().begin(), instance.nominal_energy_matrix().end()}};
    return singleton(std::move(s));
}

ScenarioSet generate_scenarios(const Instance& instance, const GenerationOptions& options)
{
    if (options.count < 1) {
        throw std::invalid_argument("scenario count must be >= 1");
    }
    if (options.count == 1) {
        return nominal_scenarios(instance);
    }
    const std::size_t n = instance.size();
    ArcSampler sample(options.distribution, options.seed);
    ScenarioSet set;
    set.scenarios.reserve(options.count);
    for (std::size_t s = 0; s < options.count; ++s) {
        Scenario sc{n, std::vector<double>(n * n, 0.0)};
        for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
            for (NodeId j = 0; j < static_cast<NodeId>(n); ++j) {
                if (i == j || (options.symmetric && j < i)) {
                    continue;
                }
                sc(i, j) = sample(instance.nominal_energy(i, j));
                if (options.symmetric) {
                    sc(j, i) = sc(i, j);
                }
            }
        }
        set.scenarios.push_back(std::move(sc));
    }
    set.probabilities.assign(options.count, 1.0 / static_cast<double>(options.count));
    return set;
}

ScenarioSet singleton(Scenario s)
{
    ScenarioSet set;
    set.scenarios.push_back(std::move(s));
    set.probabilities.push_back(1.0);
    return set;
}

Scenario mean_scenario(const ScenarioSet& set)
{
    set.check();
    if (set.size() == 1) {
        return set.scenarios.front();
    }
    Scenario mean{set.scenarios.front().n, std::vector<double>(set.scenarios.front().energy.size(), 0.0)};
    for (std::size_t s = 0; s < set.size(); ++s) {
        const auto& e = set.scenarios[s].energy;
        for (std::size_t k = 0; k < e.size(); ++k) {
            mean.energy[k] += set.probabilities[s] * e[k];
        }
    }
    return mean;
}

double scenario_distance(const Scenario& a, const Scenario& b)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < a.energy.size(); ++k) {
        const double d = a.energy[k] - b.energy[k];
        sum += d * d;
    }
    return std::sqrt(sum);
}

namespace {

std::vector<double> distance_matrix(const ScenarioSet& set)
{
    const std::size_t n = set.size();
    std::vector<double> c(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            c[a * n + b] = c[b * n + a] = scenario_distance(set.scenarios[a], set.scenarios[b]);
        }
    }
    return c;
}

// Nearest kept scenario for every parent index (lowest kept index on ties).
std::vector<std::size_t> nearest_kept(const std::vector<double>& c, std::size_t n, const std::vector<std::size_t>& kept)
{
    std::vector<std::size_t> sorted = kept;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> near(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::size_t best = sorted.front();
        for (std::size_t k : sorted) {
            if (c[s * n + k] < c[s * n + best]) {
                best = k;
            }
        }
        near[s] = best;
    }
    return near;
}

void check_kept(std::size_t n, const std::vector<std::size_t>& kept)
{
    if (kept.empty()) {
        throw std::invalid_argument("kept index set is empty");
    }
    std::vector<bool> seen(n, false);
    for (std::size_t k : kept) {
        if (k >= n || seen[k]) {
            throw std::invalid_argument("kept indices must be distinct and in range");
        }
        seen[k] = true;
    }
}

} // namespace

double transport_distance(const ScenarioSet& parent, const std::vector<std::size_t>& kept_indices)
{
    const std::size_t n = parent.size();
    check_kept(n, kept_indices);
    const auto c = distance_matrix(parent);
    const auto near = nearest_kept(c, n, kept_indices);
    std::vector<bool> is_kept(n, false);
    for (std::size_t k : kept_indices) {
        is_kept[k] = true;
    }
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!is_kept[s]) {
            total += parent.probabilities[s] * c[s * n + near[s]];
        }
    }
    return total;
}

std::vector<double> redistribute(const ScenarioSet& parent, const std::vector<std::size_t>& kept_indices)
{
    const std::size_t n = parent.size();
    check_kept(n, kept_indices);
    const auto c = distance_matrix(parent);
    const auto near = nearest_kept(c, n, kept_indices);
    std::vector<double> mass(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        mass[near[s]] += parent.probabilities[s];
    }
    std::vector<double> out;
    out.reserve(kept_indices.size());
    for (std::size_t k : kept_indices) {
        out.push_back(mass[k]);
    }
    return out;
}

ReducedScenarioSet reduce_ffs(const ScenarioSet& set, std::size_t m)
{
    set.check();
    const std::size_t n = set.size();
    if (m < 1 || m > n) {
        throw std::invalid_argument("reduction target m must lie in [1, " + std::to_string(n) + "]");
    }
    const auto& p = set.probabilities;
    std::vector<double> c = distance_matrix(set);
    std::vector<bool> selected(n, false);
    std::vector<std::size_t> kept;

    for (std::size_t step = 0; step < m; ++step) {
        if (!kept.empty()) {
            const std::size_t last = kept.back();
            for (std::size_t k = 0; k < n; ++k) {
                if (selected[k]) {
                    continue;
                }
                for (std::size_t u = 0; u < n; ++u) {
                    if (!selected[u]) {
                        c[k * n + u] = std::min(c[k * n + u], c[k * n + last]);
                    }
                }
            }
        }
        std::size_t best = n;
        double best_z = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < n; ++u) {
            if (selected[u]) {
                continue;
            }
            double z = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (!selected[k] && k != u) {
                    z += p[k] * c[k * n + u];
                }
            }
            if (z < best_z) {
                best_z = z;
                best = u;
            }
        }
        selected[best] = true;
        kept.push_back(best);
    }

    ReducedScenarioSet out;
    out.kept_indices = kept;
    out.reduced.probabilities = redistribute(set, kept);
    for (std::size_t k : kept) {
        out.reduced.scenarios.push_back(set.scenarios[k]);
    }
    out.transport_distance = transport_distance(set, kept);
    return out;
}

void save_scenarios(std::ostream& out, const ScenarioSet& set)
{
    nlohmann::json doc;
    doc["n"] = set.scenarios.empty() ? 0 : set.scenarios.front().n;
    doc["probabilities"] = set.probabilities;
    auto arr = nlohmann::json::array();
    for (const auto& s : set.scenarios) {
        arr.push_back(s.energy);
    }
    doc["scenarios"] = std::move(arr);
    out << doc.dump() << "\n";
}

ScenarioSet load_scenarios(std::istream& in)
{
    try {
        const auto doc = nlohmann::json::parse(in);
        ScenarioSet set;
        const auto n = doc.at("n").get<std::size_t>();
        set.probabilities = doc.at("probabilities").get<std::vector<double>>();
        for (const auto& e : doc.at("scenarios")) {
            set.scenarios.push_back({n, e.get<std::vector<double>>()});
        }
        set.check();
        return set;
    }
    catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed scenario file: ") + e.what());
    }
}

} // namespace sevrp
