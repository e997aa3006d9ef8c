#pragma once

#include "sevrp/fixed_route.hpp"
#include "sevrp/instance.hpp"
#include "sevrp/scenario.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sevrp {

enum class Neighborhood {
    Inter10,
    Inter11,
    Inter20,
    Inter21,
    Inter22,
    Intra10,
    Intra11,
    Intra20,
    Intra21,
    Intra22,
    TwoOpt,
    Separate,
};

inline constexpr std::array<Neighborhood, 12> kDefaultOrder{
    Neighborhood::Inter10, Neighborhood::Inter11, Neighborhood::Inter20, Neighborhood::Inter21,
    Neighborhood::Inter22, Neighborhood::Intra10, Neighborhood::Intra11, Neighborhood::Intra20,
    Neighborhood::Intra21, Neighborhood::Intra22, Neighborhood::TwoOpt,  Neighborhood::Separate,
};

std::string to_string(Neighborhood n);
Neighborhood neighborhood_from_string(const std::string& text);

struct SearchParams {
    int i_max = 2000;
    double gamma = 1.0;
    double time_limit = 10800.0; // seconds, whole ILS run
    bool use_ndcs = true;
    bool use_filters = true;
    bool first_improvement = false;
    std::vector<Neighborhood> order{kDefaultOrder.begin(), kDefaultOrder.end()};
    std::uint64_t seed = 1;

    static SearchParams from(const PolicyParams& p);
};

struct RouteHash {
    std::size_t operator()(const Route& r) const noexcept;
};

/// Shared evaluation context for one search: scenario set, mean scenario,
/// optional NDCS table and a memo of expected route durations.
class RouteEvaluator {
public:
    RouteEvaluator(const Instance& instance, const ScenarioSet& scenarios, bool use_ndcs);

    const Instance& instance() const { return *instance_; }
    const ScenarioSet& scenarios() const { return *scenarios_; }
    const Scenario& mean() const { return mean_; }
    const NdcsTable* ndcs() const { return use_ndcs_ ? &ndcs_ : nullptr; }

    double duration(const Route& route);
    double lower_bound(const Route& route) const { return lower_bound_route(route, *instance_, mean_); }
    double first_stage(const Route& route) const { return first_stage_time(route, *instance_); }

    std::size_t evaluations() const { return evaluations_; }

private:
    const Instance* instance_;
    const ScenarioSet* scenarios_;
    Scenario mean_;
    bool use_ndcs_;
    NdcsTable ndcs_;
    std::unordered_map<Route, double, RouteHash> cache_;
    std::size_t evaluations_ = 0;
};

struct Solution {
    std::vector<Route> routes;
    std::vector<double> durations; // aligned with routes

    double objective() const;
    std::size_t customer_count() const;
};

/// Throws std::logic_error unless every customer of `instance` appears exactly once.
void check_partition(const Instance& instance, const Solution& s);

struct Move {
    Neighborhood kind = Neighborhood::Inter10;
    int r1 = 0;
    int r2 = -1;
    int i = 0;
    int j = 0;
    bool rev1 = false;
    bool rev2 = false;
};

/// Calls `f` for every move of the neighborhood on `routes`, in a fixed order.
void enumerate_moves(const std::vector<Route>& routes, Neighborhood kind, const std::function<void(const Move&)>& f);

/// Routes of the impacted slots after the move, in slot order; empty routes dropped.
std::vector<Route> apply_move(const std::vector<Route>& routes, const Move& m);

/// Route indices touched by the move (r1, plus r2 for inter moves).
std::vector<int> impacted_routes(const Move& m);

/// Solution with the move applied; new routes take the impacted slots.
Solution replace_routes(const Solution& s, const Move& m, std::vector<Route> fresh, std::vector<double> durations);

enum class FilterResult { RejectedStage1, RejectedStage2, Candidate };

FilterResult filter_move(const std::vector<Route>& fresh, double impacted_duration, RouteEvaluator& eval, double gamma);

struct VndStats {
    std::size_t moves_applied = 0;
    std::size_t rejected_stage1 = 0;
    std::size_t rejected_stage2 = 0;
    std::size_t evaluated = 0;
};

Solution vnd(const Solution& start, RouteEvaluator& eval, const SearchParams& params, VndStats* stats = nullptr);

/// A customer that no route can serve, not even a route of its own.
class UnservableCustomer : public std::runtime_error {
public:
    explicit UnservableCustomer(NodeId customer);
    NodeId customer() const { return customer_; }

private:
    NodeId customer_;
};

/// Nearest-neighbour giant tour split greedily into feasible routes. Throws
/// UnservableCustomer for the first customer that is infeasible even alone.
Solution initial_solution(RouteEvaluator& eval);

/// Inclusive bounds of the number of removed customers for |I| customers.
std::pair<int, int> perturbation_size_range(int customers);

Solution perturb(const Solution& best, RouteEvaluator& eval, std::mt19937_64& rng);

class RoutePool {
public:
    /// Keeps the smaller duration for a repeated sequence; infinite durations are ignored.
    void insert(const Route& route, double duration);
    std::size_t size() const { return entries_.size(); }
    const std::map<Route, double>& entries() const { return entries_; }
    bool contains(const Route& route) const { return entries_.contains(route); }

private:
    std::map<Route, double> entries_;
};

struct IlsProgress {
    int iteration = 0;
    double incumbent = 0.0;
    std::size_t pool_size = 0;
    double elapsed = 0.0;
};

struct IlsResult {
    Solution best;
    RoutePool pool;
    int iterations = 0;
    std::vector<double> incumbent_history; // after each iteration
};

IlsResult ils(RouteEvaluator& eval, const SearchParams& params,
              const std::function<void(const IlsProgress&)>& progress = {});

} // namespace sevrp
