#include "sevrp/fixed_route.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sevrp {

void check_route(const Instance& instance, std::span<const NodeId> route)
{
    if (route.empty()) {
        throw std::invalid_argument("route is empty");
    }
    std::vector<bool> seen(instance.size(), false);
    for (NodeId c : route) {
        if (!instance.is_customer(c)) {
            throw std::invalid_argument("route node " + std::to_string(c) + " is not a customer");
        }
        if (seen[static_cast<std::size_t>(c)]) {
            throw std::invalid_argument("customer " + std::to_string(c) + " repeated in route");
        }
        seen[static_cast<std::size_t>(c)] = true;
    }
}

namespace {

Point point_of(const Instance& inst, NodeId id) { return {inst.node(id).x, inst.node(id).y}; }

// Time and energy per length unit on arc (i, j) under the scenario.
struct ArcRates {
    double time;
    double energy;
};

ArcRates rates(const Instance& inst, NodeId i, NodeId j, double e)
{
    const double d = inst.distance(i, j);
    if (d > 0.0) {
        return {inst.travel_time(i, j) / d, e / d};
    }
    return {1.0 / inst.params().speed, inst.params().consumption_rate};
}

// Walks consecutive arcs 0 -> route -> 0.
template <typename F>
void for_each_arc(std::span<const NodeId> route, F&& f)
{
    NodeId prev = 0;
    for (std::size_t a = 0; a <= route.size(); ++a) {
        const NodeId next = a < route.size() ? route[a] : 0;
        f(a, prev, next);
        prev = next;
    }
}

} // namespace

double min_dist_point_to_segment(Point p, Point a, Point b)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    }
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double min_dist_point_to_segment(const Instance& instance, NodeId k, NodeId i, NodeId j)
{
    return min_dist_point_to_segment(point_of(instance, k), point_of(instance, i), point_of(instance, j));
}

namespace {

// True when charging any interval at k1 takes at least as long as at k2:
// t1 - t2 is nondecreasing in SoC. Both curves are piecewise linear, so the
// breakpoints of either one are the only places to check.
bool charges_no_faster(const Instance& inst, NodeId k1, NodeId k2)
{
    const auto& c1 = inst.curve_at(k1);
    const auto& c2 = inst.curve_at(k2);
    if (c1 == c2) {
        return true;
    }
    if (c1.max_soc() > c2.max_soc()) {
        return false;
    }
    std::vector<double> socs;
    for (const auto& b : c1.breakpoints()) {
        socs.push_back(b.soc);
    }
    for (const auto& b : c2.breakpoints()) {
        if (b.soc <= c1.max_soc()) {
            socs.push_back(b.soc);
        }
    }
    std::sort(socs.begin(), socs.end());
    double prev = c1.time_to(socs.front()) - c2.time_to(socs.front());
    for (double q : socs) {
        const double diff = c1.time_to(q) - c2.time_to(q);
        if (diff < prev - 1e-12) {
            return false;
        }
        prev = diff;
    }
    return true;
}

// k1 can be dropped for k2 when every detour point on the arc is strictly
// nearer to k2, k2 sits no farther from j and k2 charges no slower. Then k2
// is reached with more energy, needs a lower target and is faster on every leg.
bool dominated(const Instance& inst, NodeId j, NodeId k1, double seg1, NodeId k2, double far2)
{
    return seg1 > far2 && inst.distance(k1, j) >= inst.distance(k2, j) && charges_no_faster(inst, k1, k2);
}

std::vector<NodeId> ndcs_for_arc(const Instance& inst, NodeId i, NodeId j)
{
    const auto& p = inst.params();
    const auto stations = inst.stations();
    const std::size_t m = stations.size();
    const double d_ij = inst.distance(i, j);
    const double rate = d_ij > 0.0 ? inst.nominal_energy(i, j) / d_ij : p.consumption_rate;

    std::vector<double> seg(m);
    for (std::size_t a = 0; a < m; ++a) {
        seg[a] = min_dist_point_to_segment(inst, stations[a], i, j);
    }

    std::vector<bool> keep(m, true);
    for (std::size_t a = 0; a < m; ++a) {
        const NodeId k1 = stations[a];
        const double q_bar = j == 0 ? inst.nominal_energy(k1, j) : p.q_goal + inst.nominal_energy(k1, j);
        if (p.q_threshold < rate * seg[a] || q_bar > p.q_max) {
            keep[a] = false;
            continue;
        }
        for (std::size_t b = 0; b < m && keep[a]; ++b) {
            const NodeId k2 = stations[b];
            if (b == a) {
                continue;
            }
            const double far2 = std::max(inst.distance(i, k2), inst.distance(k2, j));
            if (dominated(inst, j, k1, seg[a], k2, far2)) {
                keep[a] = false;
            }
        }
    }

    std::vector<NodeId> out;
    for (std::size_t a = 0; a < m; ++a) {
        if (keep[a]) {
            out.push_back(stations[a]);
        }
    }
    return out;
}

} // namespace

NdcsTable precompute_ndcs(const Instance& instance)
{
    const std::size_t n = instance.size();
    std::vector<std::vector<NodeId>> table(n * n);
    std::vector<NodeId> ends{0};
    ends.insert(ends.end(), instance.customers().begin(), instance.customers().end());
    for (NodeId i : ends) {
        for (NodeId j : ends) {
            if (i != j) {
                table[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = ndcs_for_arc(instance, i, j);
            }
        }
    }
    return NdcsTable(n, std::move(table));
}

std::optional<DetourEvent> detour_option_time(const Instance& instance, NodeId i, NodeId j, double soc_at_i,
                                              NodeId k, const Scenario& scenario)
{
    const auto& p = instance.params();
    const double e = scenario(i, j);
    const auto r = rates(instance, i, j, e);

    DetourEvent ev;
    ev.from = i;
    ev.to = j;
    ev.station = k;
    ev.z = e > 0.0 ? std::clamp((soc_at_i - p.q_threshold) / e, 0.0, 1.0) : 0.0;
    ev.soc_at_detour = e > 0.0 ? p.q_threshold : soc_at_i;
    const auto& ni = instance.node(i);
    const auto& nj = instance.node(j);
    ev.detour_point = {nj.x * ev.z + ni.x * (1.0 - ev.z), nj.y * ev.z + ni.y * (1.0 - ev.z)};
    const auto& nk = instance.node(k);
    ev.dist_to_station = std::hypot(ev.detour_point.x - nk.x, ev.detour_point.y - nk.y);
    ev.soc_at_station = ev.soc_at_detour - r.energy * ev.dist_to_station;
    if (ev.soc_at_station < 0.0) {
        return std::nullopt;
    }
    const double e_kj = scenario(k, j);
    ev.soc_leaving_station = j == 0 ? std::max(ev.soc_at_station, e_kj) : p.q_goal + e_kj;
    const auto& curve = instance.curve_at(k);
    if (ev.soc_leaving_station > p.q_max || ev.soc_leaving_station > curve.max_soc()) {
        return std::nullopt;
    }
    ev.charge_time = curve.inverse_charge_time({ev.soc_at_station, ev.soc_leaving_station});
    ev.time = instance.travel_time(i, j) * ev.z + r.time * ev.dist_to_station + ev.charge_time
              + instance.travel_time(k, j);
    return ev;
}

namespace {

template <bool Record>
double run_scenario(std::span<const NodeId> route, const Instance& inst, const Scenario& sc, const NdcsTable* ndcs,
                    RecourseTrace* trace)
{
    const auto& p = inst.params();
    double soc = p.q_max;
    double duration = 0.0;
    bool ok = true;

    for_each_arc(route, [&](std::size_t, NodeId i, NodeId j) {
        if (!ok) {
            return;
        }
        const double e = sc(i, j);
        const bool final_arc = j == 0;
        if constexpr (Record) {
            trace->departure_soc.push_back(soc);
        }
        const bool pass = final_arc ? soc >= e : soc - e > p.q_threshold;
        if (pass) {
            soc -= e;
            duration += inst.travel_time(i, j);
            if constexpr (Record) {
                trace->arrival_soc.push_back(soc);
            }
            return;
        }

        const auto candidates = ndcs != nullptr ? ndcs->candidates(i, j) : inst.stations();
        std::optional<DetourEvent> best;
        for (NodeId k : candidates) {
            auto opt = detour_option_time(inst, i, j, soc, k, sc);
            if (opt && (!best || opt->time < best->time)) {
                best = opt;
            }
        }
        if (!best) {
            ok = false;
            return;
        }
        duration += best->time;
        soc = final_arc ? best->soc_leaving_station - sc(best->station, j) : p.q_goal;
        if constexpr (Record) {
            trace->arrival_soc.push_back(soc);
            trace->detours.push_back(*best);
        }
    });
    return ok ? duration : kInfeasible;
}

} // namespace

RouteEvaluation evaluate_route(std::span<const NodeId> route, const Instance& instance, const ScenarioSet& scenarios,
                               const EvalOptions& options)
{
    RouteEvaluation out;
    double expected = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        RecourseTrace trace;
        trace.scenario = s;
        const double dur = options.record_traces
                               ? run_scenario<true>(route, instance, scenarios.scenarios[s], options.ndcs, &trace)
                               : run_scenario<false>(route, instance, scenarios.scenarios[s], options.ndcs, nullptr);
        trace.duration = dur;
        trace.feasible = dur < kInfeasible;
        expected = trace.feasible && expected < kInfeasible ? expected + scenarios.probabilities[s] * dur : kInfeasible;
        if (options.record_traces) {
            out.traces.push_back(std::move(trace));
        }
        else if (!trace.feasible) {
            break;
        }
    }
    out.expected_duration = expected;
    return out;
}

double route_duration(std::span<const NodeId> route, const Instance& instance, const ScenarioSet& scenarios,
                      const NdcsTable* ndcs)
{
    double expected = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const double dur = run_scenario<false>(route, instance, scenarios.scenarios[s], ndcs, nullptr);
        if (dur == kInfeasible) {
            return kInfeasible;
        }
        expected += scenarios.probabilities[s] * dur;
    }
    return expected;
}

double first_stage_time(std::span<const NodeId> route, const Instance& instance)
{
    double total = 0.0;
    for_each_arc(route, [&](std::size_t, NodeId i, NodeId j) { total += instance.travel_time(i, j); });
    return total;
}

double prop2_bound(const Instance& instance, NodeId i, NodeId j)
{
    return std::max(instance.distance(i, j),
                    instance.nearest_station_distance(i) + instance.nearest_station_distance(j));
}

double lower_bound_route(std::span<const NodeId> route, const Instance& instance, const Scenario& scenario)
{
    const auto& p = instance.params();
    const double a_fast = instance.fastest_time_per_kwh();
    double soc = p.q_max;
    double total = 0.0;
    for_each_arc(route, [&](std::size_t, NodeId i, NodeId j) {
        const double e = scenario(i, j);
        const bool final_arc = j == 0;
        if (final_arc ? soc >= e : soc - e > p.q_threshold) {
            soc -= e;
            total += instance.travel_time(i, j);
            return;
        }
        const auto r = rates(instance, i, j, e);
        const double d_j = instance.nearest_station_distance(j);
        const double charge = final_arc ? std::max(0.0, r.energy * d_j - p.q_threshold)
                                        : p.q_goal + r.energy * d_j - p.q_threshold;
        total += r.time * prop2_bound(instance, i, j) + a_fast * charge;
        soc = p.q_goal;
    });
    return total;
}

double lower_bound_route(std::span<const NodeId> route, const Instance& instance, const ScenarioSet& scenarios)
{
    double total = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        total += scenarios.probabilities[s] * lower_bound_route(route, instance, scenarios.scenarios[s]);
    }
    return total;
}

void write_evaluation(std::ostream& out, std::span<const NodeId> route, const RouteEvaluation& eval)
{
    using nlohmann::json;
    json doc;
    doc["route"] = std::vector<NodeId>(route.begin(), route.end());
    doc["feasible"] = eval.feasible();
    doc["expected_duration"] = eval.feasible() ? json(eval.expected_duration) : json(nullptr);
    json traces = json::array();
    for (const auto& t : eval.traces) {
        json jt;
        jt["scenario"] = t.scenario;
        jt["feasible"] = t.feasible;
        jt["duration"] = t.feasible ? json(t.duration) : json(nullptr);
        jt["departure_soc"] = t.departure_soc;
        jt["arrival_soc"] = t.arrival_soc;
        json dets = json::array();
        for (const auto& d : t.detours) {
            dets.push_back({{"arc", {d.from, d.to}},
                            {"z", d.z},
                            {"detour_point", {d.detour_point.x, d.detour_point.y}},
                            {"station", d.station},
                            {"dist_to_station", d.dist_to_station},
                            {"soc_at_station", d.soc_at_station},
                            {"soc_leaving_station", d.soc_leaving_station},
                            {"charge_time", d.charge_time},
                            {"time", d.time}});
        }
        jt["detours"] = std::move(dets);
        traces.push_back(std::move(jt));
    }
    doc["traces"] = std::move(traces);
    out << doc.dump(2) << "\n";
}

} // namespace sevrp
