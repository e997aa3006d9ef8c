#pragma once

#include "sevrp/instance.hpp"
#include "sevrp/scenario.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace sevrp {

/// Customer sequence; the depot is implicit at both ends.
using Route = std::vector<NodeId>;

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

/// Throws std::invalid_argument unless `route` is a nonempty sequence of distinct customers.
void check_route(const Instance& instance, std::span<const NodeId> route);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct DetourEvent {
    NodeId from = 0;
    NodeId to = 0;
    double z = 0.0;
    Point detour_point;
    NodeId station = 0;
    double dist_to_station = 0.0;
    double soc_at_detour = 0.0;
    double soc_at_station = 0.0;
    double soc_leaving_station = 0.0;
    double charge_time = 0.0;
    double time = 0.0; // replaces t_ij for this arc
};

struct RecourseTrace {
    std::size_t scenario = 0;
    std::vector<double> departure_soc; // one per arc, y_i
    std::vector<double> arrival_soc;   // one per arc, at the arc's head
    std::vector<DetourEvent> detours;
    double duration = kInfeasible;
    bool feasible = false;
};

struct RouteEvaluation {
    double expected_duration = kInfeasible;
    std::vector<RecourseTrace> traces;

    bool feasible() const { return expected_duration < kInfeasible; }
};

/// Per ordered pair of depot/customer nodes, the stations surviving the
/// non-dominated charging-station filter, ascending by id.
class NdcsTable {
public:
    NdcsTable() = default;
    NdcsTable(std::size_t n, std::vector<std::vector<NodeId>> candidates) : n_(n), candidates_(std::move(candidates)) {}

    std::span<const NodeId> candidates(NodeId i, NodeId j) const
    {
        return candidates_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
    }
    std::size_t size() const { return n_; }

    friend bool operator==(const NdcsTable&, const NdcsTable&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::vector<NodeId>> candidates_;
};

/// Euclidean distance from station `k` to the closed segment [node i, node j].
double min_dist_point_to_segment(const Instance& instance, NodeId k, NodeId i, NodeId j);
double min_dist_point_to_segment(Point p, Point a, Point b);

NdcsTable precompute_ndcs(const Instance& instance);

/// Detour on arc (i, j) to station k when the arc triggers the policy.
/// Non-final arcs charge to Q^G + e_kj; the final arc (j = depot) charges to
/// max(arrival, e_k0). Returns std::nullopt when the station cannot be
/// reached or the charge target exceeds Q^max.
std::optional<DetourEvent> detour_option_time(const Instance& instance, NodeId i, NodeId j, double soc_at_i,
                                              NodeId k, const Scenario& scenario);

struct EvalOptions {
    const NdcsTable* ndcs = nullptr; // all stations when null
    bool record_traces = true;
};

RouteEvaluation evaluate_route(std::span<const NodeId> route, const Instance& instance, const ScenarioSet& scenarios,
                               const EvalOptions& options = {});

/// Expected duration only (no traces); kInfeasible when any scenario fails.
double route_duration(std::span<const NodeId> route, const Instance& instance, const ScenarioSet& scenarios,
                      const NdcsTable* ndcs = nullptr);

/// Sum of first-stage travel times, depot to depot.
double first_stage_time(std::span<const NodeId> route, const Instance& instance);

/// max{d_ij, d_i + d_j} with d_x the distance from x to its nearest station.
double prop2_bound(const Instance& instance, NodeId i, NodeId j);

/// Lower bound on the expected duration. Triggered non-final arcs use the
/// detour-length bound plus the fastest charge rate; the final arc follows
/// the evaluator's depot rule.
double lower_bound_route(std::span<const NodeId> route, const Instance& instance, const ScenarioSet& scenarios);
double lower_bound_route(std::span<const NodeId> route, const Instance& instance, const Scenario& scenario);

/// Structured report of an evaluation (per-scenario detours and SoC).
void write_evaluation(std::ostream& out, std::span<const NodeId> route, const RouteEvaluation& eval);

} // namespace sevrp
