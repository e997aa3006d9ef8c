#include "sevrp/measures.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sevrp {

MeasuresReport make_report(double rp, double ws, double evp, double eev, double tol)
{
    MeasuresReport r;
    r.rp = rp;
    r.ws = ws;
    r.evp = evp;
    r.eev = eev;
    r.evpi = rp - ws;
    r.evpi_pct = 100.0 * r.evpi / rp;
    r.vss = eev - rp; // inf - finite stays inf
    r.vss_pct = 100.0 * r.vss / rp;
    if (r.evpi < -tol) {
        r.warnings.push_back("WS exceeds RP by " + format_number(-r.evpi, 6) + " (heuristic gap)");
    }
    if (std::isfinite(eev) && r.vss < -tol) {
        r.warnings.push_back("EEV below RP by " + format_number(-r.vss, 6) + " (heuristic gap)");
    }
    return r;
}

double wait_and_see(const Instance& instance, const ScenarioSet& scenarios, const SearchParams& params,
                    double sp_time_limit)
{
    if (scenarios.size() == 0) {
        throw std::invalid_argument("wait-and-see needs at least one scenario");
    }
    double ws = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const auto one = singleton(scenarios.scenarios[s]);
        ws += scenarios.probabilities[s] * ils_sp(instance, one, params, sp_time_limit).objective();
    }
    return ws;
}

ExpectedValueResult expected_value_analysis(const Instance& instance, const ScenarioSet& scenarios,
                                            const SearchParams& params, double sp_time_limit)
{
    ExpectedValueResult out;
    const auto mean = singleton(mean_scenario(scenarios));
    try {
        out.mean_solution = ils_sp(instance, mean, params, sp_time_limit).solution;
    }
    catch (const std::runtime_error&) {
        return out; // mean problem has no feasible solution: both stay infinite
    }
    out.evp = out.mean_solution.objective();
    const NdcsTable ndcs = params.use_ndcs ? precompute_ndcs(instance) : NdcsTable{};
    out.eev = 0.0;
    for (const auto& r : out.mean_solution.routes) {
        const double t = route_duration(r, instance, scenarios, params.use_ndcs ? &ndcs : nullptr);
        if (t == kInfeasible) {
            out.eev = kInfeasible;
            break;
        }
        out.eev += t;
    }
    return out;
}

MeasuresReport compute_measures(const Instance& instance, const ScenarioSet& scenarios, const SearchParams& params,
                                double sp_time_limit)
{
    const double rp = ils_sp(instance, scenarios, params, sp_time_limit).objective();
    const double ws = wait_and_see(instance, scenarios, params, sp_time_limit);
    const auto ev = expected_value_analysis(instance, scenarios, params, sp_time_limit);
    return make_report(rp, ws, ev.evp, ev.eev);
}

double gap_percent(double z_algo, double z_model)
{
    if (!(z_model > 0.0)) {
        throw std::invalid_argument("gap needs a positive reference objective");
    }
    return 100.0 * (z_algo - z_model) / z_model;
}

std::string format_number(double v, int digits)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

void write_measures_header(std::ostream& out) { out << "instance,RP,WS,%EVPI,EVP,EEV,%VSS\n"; }

void write_measures_row(std::ostream& out, const std::string& instance, const MeasuresReport& r)
{
    out << instance << ',' << format_number(r.rp) << ',' << format_number(r.ws) << ',' << format_number(r.evpi_pct, 2)
        << ',' << format_number(r.evp) << ',' << format_number(r.eev) << ',' << format_number(r.vss_pct, 2) << '\n';
}

} // namespace sevrp
