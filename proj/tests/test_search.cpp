#include "sevrp/search.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace sevrp;

namespace {

Instance instance_with(int customers, std::uint64_t seed, int stations = 3)
{
    sevrp::testing::RandomInstanceSpec spec;
    spec.customers = customers;
    spec.stations = stations;
    spec.seed = seed;
    return sevrp::testing::random_instance(spec);
}

std::size_t count(const std::vector<Route>& routes, Neighborhood k)
{
    std::size_t n = 0;
    enumerate_moves(routes, k, [&](const Move&) { ++n; });
    return n;
}

// Neighbourhood sizes counted position by position.
std::size_t expected_count(const std::vector<Route>& routes, Neighborhood k)
{
    std::size_t total = 0;
    const auto nr = routes.size();
    for (std::size_t a = 0; a < nr; ++a) {
        const std::size_t n = routes[a].size();
        const std::size_t pairs = n >= 2 ? n - 1 : 0;
        switch (k) {
        case Neighborhood::Intra10:
            total += n * (n - 1);
            break;
        case Neighborhood::Intra11:
            total += n * (n - 1) / 2;
            break;
        case Neighborhood::Intra20:
            total += pairs == 0 ? 0 : pairs * (2 * pairs - 1);
            break;
        case Neighborhood::Intra21:
            total += n >= 3 ? pairs * (n - 2) * 2 : 0;
            break;
        case Neighborhood::Intra22:
            total += n >= 4 ? (n - 2) * (n - 3) / 2 * 4 : 0;
            break;
        case Neighborhood::Separate:
            total += pairs;
            break;
        default:
            break;
        }
        for (std::size_t b = 0; b < nr; ++b) {
            if (a == b) {
                continue;
            }
            const std::size_t m = routes[b].size();
            const std::size_t mpairs = m >= 2 ? m - 1 : 0;
            switch (k) {
            case Neighborhood::Inter10:
                total += n * (m + 1);
                break;
            case Neighborhood::Inter11:
                total += a < b ? n * m : 0;
                break;
            case Neighborhood::Inter20:
                total += pairs * (m + 1) * 2;
                break;
            case Neighborhood::Inter21:
                total += pairs * m * 2;
                break;
            case Neighborhood::Inter22:
                total += a < b ? pairs * mpairs * 4 : 0;
                break;
            case Neighborhood::TwoOpt:
                total += a < b ? (n + 1) * (m + 1) - 2 : 0;
                break;
            default:
                break;
            }
        }
    }
    return total;
}

std::multiset<NodeId> flatten(const std::vector<Route>& routes)
{
    std::multiset<NodeId> out;
    for (const auto& r : routes) {
        out.insert(r.begin(), r.end());
    }
    return out;
}

} // namespace

TEST(Neighborhood, NamesRoundTrip)
{
    for (auto k : kDefaultOrder) {
        EXPECT_EQ(neighborhood_from_string(to_string(k)), k);
    }
    EXPECT_THROW(neighborhood_from_string("3-opt"), std::invalid_argument);
}

TEST(Neighborhood, CountsMatchPositionalCounting)
{
    const std::vector<std::vector<Route>> layouts{
        {{1, 2, 3}, {4, 5}},
        {{1}, {2, 3, 4, 5, 6}},
        {{1, 2, 3, 4, 5, 6, 7}},
        {{1, 2}, {3}, {4, 5, 6, 7}},
    };
    for (const auto& routes : layouts) {
        for (auto k : kDefaultOrder) {
            EXPECT_EQ(count(routes, k), expected_count(routes, k)) << to_string(k);
        }
    }
    // two routes of 3 and 2 customers, written out
    const std::vector<Route> r{{1, 2, 3}, {4, 5}};
    EXPECT_EQ(count(r, Neighborhood::Inter10), 3u * 3 + 2 * 4);
    EXPECT_EQ(count(r, Neighborhood::Inter11), 6u);
    EXPECT_EQ(count(r, Neighborhood::Intra10), 6u + 2);
    EXPECT_EQ(count(r, Neighborhood::TwoOpt), 10u);
}

TEST(Neighborhood, HandExamples)
{
    const std::vector<Route> r{{1, 2, 3, 4, 5}, {6, 7}};
    EXPECT_EQ(apply_move(r, {Neighborhood::Inter10, 1, 0, 0, 5}), (std::vector<Route>{{7}, {1, 2, 3, 4, 5, 6}}));
    EXPECT_EQ(apply_move(r, {Neighborhood::Inter20, 1, 0, 0, 2, true}), (std::vector<Route>{{1, 2, 7, 6, 3, 4, 5}}));
    EXPECT_EQ(apply_move(r, {Neighborhood::Inter22, 0, 1, 1, 0, false, true}),
              (std::vector<Route>{{1, 7, 6, 4, 5}, {2, 3}}));
    EXPECT_EQ(apply_move(r, {Neighborhood::Intra21, 0, -1, 3, 0, true}), (std::vector<Route>{{5, 4, 2, 3, 1}}));
    EXPECT_EQ(apply_move(r, {Neighborhood::Intra21, 0, -1, 0, 4, false}), (std::vector<Route>{{5, 3, 4, 1, 2}}));
    EXPECT_EQ(apply_move(r, {Neighborhood::Intra22, 0, -1, 0, 3, true, false}),
              (std::vector<Route>{{4, 5, 3, 2, 1}}));
    EXPECT_EQ(apply_move(r, {Neighborhood::TwoOpt, 0, 1, 2, 1}), (std::vector<Route>{{1, 2, 7}, {6, 3, 4, 5}}));
    EXPECT_EQ(apply_move(r, {Neighborhood::TwoOpt, 0, 1, 5, 0}), (std::vector<Route>{{1, 2, 3, 4, 5, 6, 7}}));
    EXPECT_EQ(apply_move(r, {Neighborhood::Separate, 0, -1, 1}), (std::vector<Route>{{1, 2}, {3, 4, 5}}));
}

TEST(Neighborhood, MovesPreserveThePartition)
{
    std::mt19937_64 rng(77);
    std::vector<Route> routes{{1, 2, 3}, {4, 5, 6, 7}, {8}, {9, 10}};
    const auto reference = flatten(routes);
    int applied = 0;
    while (applied < 10000) {
        const auto k = kDefaultOrder[rng() % kDefaultOrder.size()];
        std::vector<Move> moves;
        enumerate_moves(routes, k, [&](const Move& m) { moves.push_back(m); });
        if (moves.empty()) {
            continue;
        }
        const Move m = moves[rng() % moves.size()];
        auto fresh = apply_move(routes, m);
        Solution s;
        s.routes = routes;
        s.durations.assign(routes.size(), 0.0);
        s = replace_routes(s, m, fresh, std::vector<double>(fresh.size(), 0.0));
        routes = s.routes;
        ASSERT_EQ(flatten(routes), reference) << to_string(k);
        for (const auto& r : routes) {
            ASSERT_FALSE(r.empty());
        }
        ++applied;
    }
}

TEST(Perturbation, SizeRange)
{
    EXPECT_EQ(perturbation_size_range(10), (std::pair<int, int>{5, 5}));
    EXPECT_EQ(perturbation_size_range(40), (std::pair<int, int>{5, 7}));
    EXPECT_EQ(perturbation_size_range(100), (std::pair<int, int>{5, 10}));
    EXPECT_EQ(perturbation_size_range(3), (std::pair<int, int>{3, 3}));
}

TEST(Perturbation, KeepsEveryCustomerOnce)
{
    const auto inst = instance_with(12, 5);
    const auto set = nominal_scenarios(inst);
    RouteEvaluator eval(inst, set, true);
    std::mt19937_64 rng(3);
    Solution s = initial_solution(eval);
    for (int k = 0; k < 50; ++k) {
        s = perturb(s, eval, rng);
        check_partition(inst, s);
        for (std::size_t r = 0; r < s.routes.size(); ++r) {
            ASSERT_LT(s.durations[r], kInfeasible);
            ASSERT_DOUBLE_EQ(s.durations[r], eval.duration(s.routes[r]));
        }
    }
}

TEST(Initial, FeasibleAndDeterministic)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = instance_with(10, seed);
        const auto set = nominal_scenarios(inst);
        RouteEvaluator eval(inst, set, true);
        const auto a = initial_solution(eval);
        check_partition(inst, a);
        EXPECT_LT(a.objective(), kInfeasible);
        EXPECT_EQ(a.routes, initial_solution(eval).routes);
    }
}

TEST(Initial, NamesUnservableCustomer)
{
    auto data = instance_with(4, 2).data();
    data.nodes.push_back({static_cast<NodeId>(data.nodes.size()), NodeKind::Customer, 5000.0, 5000.0, ""});
    const Instance inst(data);
    const auto set = nominal_scenarios(inst);
    RouteEvaluator eval(inst, set, false);
    try {
        initial_solution(eval);
        FAIL() << "expected an error";
    }
    catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("customer " + std::to_string(data.nodes.back().id)), std::string::npos);
    }
}

TEST(Vnd, MonotoneAndLocallyOptimal)
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto inst = instance_with(7, seed);
        const auto set = generate_scenarios(inst, {Distribution::Uniform, 5, seed});
        RouteEvaluator eval(inst, set, true);
        SearchParams p;
        p.use_filters = false;
        const auto start = initial_solution(eval);
        VndStats st;
        const auto s = vnd(start, eval, p, &st);
        check_partition(inst, s);
        EXPECT_LE(s.objective(), start.objective() + 1e-12);

        // no single move of any neighbourhood improves the result
        for (auto k : kDefaultOrder) {
            enumerate_moves(s.routes, k, [&](const Move& m) {
                double before = 0.0;
                for (int r : impacted_routes(m)) {
                    before += s.durations[static_cast<std::size_t>(r)];
                }
                double after = 0.0;
                for (const auto& r : apply_move(s.routes, m)) {
                    after += eval.duration(r);
                }
                EXPECT_GE(after - before, -1e-9) << to_string(k);
            });
        }
        // fixed point
        EXPECT_EQ(vnd(s, eval, p).routes, s.routes);
    }
}

TEST(Vnd, FiltersDoNotChangeResultOnNominalScenario)
{
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto inst = instance_with(9, seed);
        const auto set = nominal_scenarios(inst);
        RouteEvaluator eval(inst, set, true);
        const auto start = initial_solution(eval);
        SearchParams on;
        SearchParams off;
        off.use_filters = false;
        VndStats st;
        const auto a = vnd(start, eval, on, &st);
        const auto b = vnd(start, eval, off);
        EXPECT_EQ(a.routes, b.routes);
        EXPECT_EQ(a.objective(), b.objective());
    }
}

TEST(Vnd, FilterStages)
{
    const auto inst = instance_with(6, 4);
    const auto set = nominal_scenarios(inst);
    RouteEvaluator eval(inst, set, true);
    const Route r{1, 2, 3};
    const double first = eval.first_stage(r);
    EXPECT_EQ(filter_move({r}, first, eval, 1.0), FilterResult::RejectedStage1);
    EXPECT_EQ(filter_move({r}, first * 0.9, eval, 1.0), FilterResult::RejectedStage1);
    const double lb = eval.lower_bound(r);
    if (lb > first) {
        EXPECT_EQ(filter_move({r}, 0.5 * (first + lb), eval, 1.0), FilterResult::RejectedStage2);
    }
    EXPECT_EQ(filter_move({r}, lb + 1.0, eval, 1.0), FilterResult::Candidate);
}

TEST(Ils, IncumbentPoolAndDeterminism)
{
    const auto inst = instance_with(10, 9);
    const auto set = generate_scenarios(inst, {Distribution::Uniform, 5, 1});
    SearchParams p;
    p.i_max = 15;
    p.seed = 11;

    RouteEvaluator eval(inst, set, true);
    const auto res = ils(eval, p);
    EXPECT_EQ(res.iterations, 15);
    ASSERT_EQ(res.incumbent_history.size(), 15u);
    for (std::size_t k = 1; k < res.incumbent_history.size(); ++k) {
        EXPECT_LE(res.incumbent_history[k], res.incumbent_history[k - 1]);
    }
    check_partition(inst, res.best);
    EXPECT_EQ(res.best.objective(), res.incumbent_history.back());
    for (const auto& r : res.best.routes) {
        EXPECT_TRUE(res.pool.contains(r));
    }
    for (const auto& [route, dur] : res.pool.entries()) {
        EXPECT_NEAR(route_duration(route, inst, set, nullptr), dur, 1e-9);
    }

    RouteEvaluator fresh(inst, set, true);
    const auto again = ils(fresh, p);
    EXPECT_EQ(again.best.routes, res.best.routes);
    EXPECT_EQ(again.incumbent_history, res.incumbent_history);
    EXPECT_EQ(again.pool.entries(), res.pool.entries());
}

TEST(Ils, ProgressCallbackAndPoolMin)
{
    RoutePool pool;
    pool.insert({1, 2}, 3.0);
    pool.insert({1, 2}, 2.5);
    pool.insert({1, 2}, 4.0);
    pool.insert({3}, kInfeasible);
    EXPECT_EQ(pool.size(), 1u);
    EXPECT_EQ(pool.entries().at({1, 2}), 2.5);

    const auto inst = instance_with(5, 3);
    const auto set = nominal_scenarios(inst);
    RouteEvaluator eval(inst, set, false);
    SearchParams p;
    p.i_max = 4;
    int calls = 0;
    ils(eval, p, [&](const IlsProgress& pr) { EXPECT_EQ(pr.iteration, calls++); });
    EXPECT_EQ(calls, 4);
}

TEST(Evaluator, CacheAgreesWithDirectEvaluation)
{
    const auto inst = instance_with(8, 1);
    const auto set = generate_scenarios(inst, {Distribution::TruncatedNormal, 4, 2});
    RouteEvaluator eval(inst, set, false);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 50; ++k) {
        const auto r = sevrp::testing::random_route(inst, 1 + k % 5, rng);
        const double direct = route_duration(r, inst, set, nullptr);
        EXPECT_EQ(eval.duration(r), direct);
        EXPECT_EQ(eval.duration(r), direct);
    }
}
