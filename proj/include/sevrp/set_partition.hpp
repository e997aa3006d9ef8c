#pragma once

#include "sevrp/search.hpp"

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <ostream>
#include <vector>

namespace sevrp {

struct SpColumn {
    boost::dynamic_bitset<> cover; // bit k <=> SpInstance::customers[k]
    double cost = 0.0;
    Route route;
};

struct SpInstance {
    std::vector<NodeId> customers;
    std::vector<SpColumn> columns;
    std::vector<std::size_t> incumbent; // columns of the ILS incumbent, may be empty
};

/// Deduplicates pool routes by customer set (minimum cost wins, first on ties)
/// and makes sure the incumbent's customer sets are present.
/// Throws std::invalid_argument on an empty pool or an uncovered customer.
SpInstance build_sp(const Instance& instance, const RoutePool& pool, const Solution& incumbent);

/// Plain column list; columns index customers through `customers`.
SpInstance make_sp(std::vector<NodeId> customers, const std::vector<std::pair<Route, double>>& columns);

struct SpResult {
    std::vector<std::size_t> selected; // ascending column index
    double cost = kInfeasible;
    bool proven = false;
    std::size_t nodes = 0;
};

/// Depth-first branch and bound. Branches on the lowest uncovered customer and
/// bounds with the cheapest amortized cover of every uncovered customer.
SpResult solve_sp(const SpInstance& sp, double time_limit = 600.0);

Solution to_solution(const SpInstance& sp, const SpResult& result);

/// CPLEX LP text of the model (one binary per column, one equality per customer).
void write_lp(std::ostream& out, const SpInstance& sp);


struct IlsSpResult {
    Solution solution;   // after set partitioning
    double ils_objective = kInfeasible;
    int iterations = 0;
    std::size_t pool_size = 0;
    bool sp_proven = false;
    std::vector<double> incumbent_history;

    double objective() const { return solution.objective(); }
};

/// ILS followed by set partitioning over its pool.
IlsSpResult ils_sp(const Instance& instance, const ScenarioSet& scenarios, const SearchParams& params,
                   double sp_time_limit, const std::function<void(const IlsProgress&)>& progress = {});

} // namespace sevrp
