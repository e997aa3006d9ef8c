#include "sevrp/fixed_route.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sevrp;
using sevrp::testing::RandomInstanceSpec;

namespace {

// Depot, customers and stations given explicitly; curve [(0,0),(1,16),(2,24)], speed 1.
Instance line_instance(std::vector<Node> nodes)
{
    InstanceData d;
    d.charging_functions.emplace("fast", ChargingFunction({{0, 0}, {1, 16}, {2, 24}}));
    d.nodes = std::move(nodes);
    return Instance(d);
}

} // namespace

TEST(Geometry, PointToSegment)
{
    EXPECT_EQ(min_dist_point_to_segment({5, 0}, {0, 0}, {10, 0}), 0.0);
    EXPECT_DOUBLE_EQ(min_dist_point_to_segment({5, 3}, {0, 0}, {10, 0}), 3.0);
    EXPECT_DOUBLE_EQ(min_dist_point_to_segment({13, 4}, {0, 0}, {10, 0}), 5.0);
    EXPECT_DOUBLE_EQ(min_dist_point_to_segment({-3, -4}, {0, 0}, {10, 0}), 5.0);
    EXPECT_DOUBLE_EQ(min_dist_point_to_segment({4, 3}, {0, 0}, {0, 0}), 5.0);
}

TEST(Prop2, Examples)
{
    // nearest stations at distance 3 from node 1 and 4 from node 2, d_12 = 5
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 0, 0, ""},
                                     {2, NodeKind::Customer, 5, 0, ""},
                                     {3, NodeKind::Station, 0, 3, "fast"},
                                     {4, NodeKind::Station, 5, -4, "fast"}});
    EXPECT_DOUBLE_EQ(prop2_bound(inst, 1, 2), 7.0);

    const auto collinear = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                          {1, NodeKind::Customer, 10, 0, ""},
                                          {2, NodeKind::Station, 4, 0, "fast"}});
    EXPECT_DOUBLE_EQ(prop2_bound(collinear, 0, 1), 10.0);
}

TEST(Detour, DegenerateStationAtDetourPoint)
{
    // final arc 1 -> 0 of length 40, e = 5, z = 0.5 puts the detour point on station 2;
    // e_20 = 2.5 <= Q^T, so no charge is needed
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 40, 0, ""},
                                     {2, NodeKind::Station, 20, 0, "fast"}});
    const auto sc = nominal_scenarios(inst).scenarios[0];
    const auto ev = detour_option_time(inst, 1, 0, 7.2 + 2.5, 2, sc);
    ASSERT_TRUE(ev.has_value());
    EXPECT_DOUBLE_EQ(ev->z, 0.5);
    EXPECT_NEAR(ev->dist_to_station, 0.0, 1e-12);
    EXPECT_EQ(ev->charge_time, 0.0);
    EXPECT_DOUBLE_EQ(ev->time, 40 * 0.5 + 20);
}

TEST(Detour, UnreachableStationIsInfeasible)
{
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 150, 0, ""},
                                     {2, NodeKind::Station, 75, 70, "fast"}});
    const auto sc = nominal_scenarios(inst).scenarios[0];
    // detour point at z = (24 - 7.2) / 18.75 along the arc, station 70 above: 7.2 - 0.125 * 70 < 0
    EXPECT_FALSE(detour_option_time(inst, 0, 1, 24.0, 2, sc).has_value());
}

TEST(Evaluate, NoDetourRoute)
{
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 10, 0, ""},
                                     {2, NodeKind::Customer, 10, 10, ""},
                                     {3, NodeKind::Station, 50, 50, "fast"}});
    const Route r{1, 2};
    const auto ev = evaluate_route(r, inst, nominal_scenarios(inst));
    EXPECT_DOUBLE_EQ(ev.expected_duration, first_stage_time(r, inst));
    EXPECT_TRUE(ev.traces[0].detours.empty());
    EXPECT_DOUBLE_EQ(lower_bound_route(r, inst, nominal_scenarios(inst)), first_stage_time(r, inst));
}

TEST(Evaluate, HandComputedForcedDetour)
{
    // 0 -> 1 is 150 long: e = 18.75 so 24 - 18.75 <= 7.2 triggers at z = 16.8 / 18.75 = 0.896
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 150, 0, ""},
                                     {2, NodeKind::Station, 134.4, 3, "fast"}});
    const Route r{1};
    const auto ev = evaluate_route(r, inst, nominal_scenarios(inst));
    ASSERT_TRUE(ev.feasible());
    const auto& tr = ev.traces[0];
    ASSERT_EQ(tr.detours.size(), 1u);
    const double z = 16.8 / 18.75;
    const double ell = 3.0;
    const double arrive = 7.2 - 0.125 * ell;
    const double d_k1 = std::hypot(150 - 134.4, 3.0);
    const double target = 19.2 + 0.125 * d_k1;
    auto c = [](double q) { return q <= 16 ? q / 16 : 1 + (q - 16) / 8; };
    // the return arc starts at Q^G = 19.2 >= 18.75, so it passes without a detour
    const double expected = 150 * z + ell + (c(target) - c(arrive)) + d_k1 + 150;
    EXPECT_NEAR(ev.expected_duration, expected, 1e-9);
    EXPECT_EQ(tr.detours[0].station, 2);
    EXPECT_DOUBLE_EQ(tr.arrival_soc[0], 19.2);
    EXPECT_NEAR(tr.arrival_soc[1], 19.2 - 18.75, 1e-12);
}

TEST(Evaluate, InfeasibleWhenNoStationWorks)
{
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 150, 0, ""},
                                     {2, NodeKind::Station, 0, 140, "fast"}});
    const auto ev = evaluate_route(Route{1}, inst, nominal_scenarios(inst));
    EXPECT_FALSE(ev.feasible());
    EXPECT_EQ(route_duration(Route{1}, inst, nominal_scenarios(inst)), kInfeasible);
}

TEST(Evaluate, FinalArcMayEndBelowThreshold)
{
    // 0 -> 1 -> 0 with each leg 80: 24 - 10 = 14 > 7.2, then 14 >= 10 reaches the depot at 4
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 80, 0, ""},
                                     {2, NodeKind::Station, 0, 50, "fast"}});
    const auto ev = evaluate_route(Route{1}, inst, nominal_scenarios(inst));
    EXPECT_DOUBLE_EQ(ev.expected_duration, 160.0);
    EXPECT_DOUBLE_EQ(ev.traces[0].arrival_soc.back(), 4.0);
}

TEST(Evaluate, MatchesBruteForceOnTinyInstances)
{
    int checked = 0, with_detour = 0;
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        RandomInstanceSpec spec;
        spec.seed = seed;
        spec.customers = 1 + static_cast<int>(seed % 2);
        spec.stations = 1 + static_cast<int>((seed / 2) % 2);
        spec.extent = 160.0;
        const auto inst = sevrp::testing::random_instance(spec);
        const auto set = generate_scenarios(inst, {Distribution::Uniform, 4, seed});
        std::mt19937_64 rng(seed);
        const auto route = sevrp::testing::random_route(inst, inst.customers().size(), rng);
        const auto ev = evaluate_route(route, inst, set);
        const auto oracle = sevrp::testing::brute_force_durations(inst, route, set);
        for (std::size_t s = 0; s < set.size(); ++s) {
            if (std::isinf(oracle[s])) {
                EXPECT_FALSE(ev.traces[s].feasible) << "seed " << seed;
            }
            else {
                ASSERT_TRUE(ev.traces[s].feasible) << "seed " << seed;
                EXPECT_NEAR(ev.traces[s].duration, oracle[s], 1e-9) << "seed " << seed;
                with_detour += !ev.traces[s].detours.empty();
            }
            ++checked;
        }
    }
    EXPECT_GT(with_detour, 50);
}

TEST(Evaluate, TraceInvariantsAndFirstStageFloor)
{
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        RandomInstanceSpec spec;
        spec.seed = seed;
        spec.customers = 12;
        spec.stations = 5;
        const auto inst = sevrp::testing::random_instance(spec);
        const auto& p = inst.params();
        const auto set = generate_scenarios(inst, {Distribution::TruncatedNormal, 10, seed});
        std::mt19937_64 rng(seed);
        for (int k = 0; k < 10; ++k) {
            const auto route = sevrp::testing::random_route(inst, 3 + rng() % 8, rng);
            const auto ev = evaluate_route(route, inst, set);
            double expected = 0;
            for (const auto& tr : ev.traces) {
                if (!tr.feasible) {
                    continue;
                }
                EXPECT_GE(tr.duration, first_stage_time(route, inst) - 1e-9);
                expected += set.probabilities[tr.scenario] * tr.duration;
                ASSERT_EQ(tr.arrival_soc.size(), route.size() + 1);
                std::size_t d = 0;
                for (std::size_t a = 0; a < route.size(); ++a) {
                    const NodeId j = route[a];
                    const bool detoured = d < tr.detours.size() && tr.detours[d].to == j
                                          && tr.detours[d].from == (a == 0 ? 0 : route[a - 1]);
                    if (detoured) {
                        EXPECT_EQ(tr.arrival_soc[a], p.q_goal);
                        ++d;
                    }
                    else {
                        EXPECT_GT(tr.arrival_soc[a], p.q_threshold);
                    }
                }
                EXPECT_GE(tr.arrival_soc.back(), 0.0);
                for (const auto& ev_d : tr.detours) {
                    const auto& ni = inst.node(ev_d.from);
                    const auto& nj = inst.node(ev_d.to);
                    EXPECT_EQ(ev_d.detour_point.x, nj.x * ev_d.z + ni.x * (1 - ev_d.z));
                    EXPECT_EQ(ev_d.detour_point.y, nj.y * ev_d.z + ni.y * (1 - ev_d.z));
                    EXPECT_EQ(ev_d.soc_at_detour, p.q_threshold);
                    EXPECT_GE(ev_d.soc_at_station, 0.0);
                    EXPECT_LE(ev_d.soc_at_station, ev_d.soc_leaving_station);
                    EXPECT_LE(ev_d.soc_leaving_station, p.q_max);
                    EXPECT_GE(ev_d.z, 0.0);
                    EXPECT_LE(ev_d.z, 1.0);
                }
            }
            if (ev.feasible()) {
                EXPECT_NEAR(ev.expected_duration, expected, 1e-9);
                EXPECT_EQ(route_duration(route, inst, set), ev.expected_duration);
            }
        }
    }
}

TEST(LowerBound, DominatesOnProportionalScenarios)
{
    int feasible = 0;
    for (std::uint64_t seed = 1; feasible < 300 && seed < 2000; ++seed) {
        RandomInstanceSpec spec;
        spec.seed = seed;
        spec.customers = 10;
        spec.stations = 2 + static_cast<int>(seed % 5);
        const auto inst = sevrp::testing::random_instance(spec);
        const auto set = nominal_scenarios(inst);
        std::mt19937_64 rng(seed);
        const auto route = sevrp::testing::random_route(inst, 3 + rng() % 8, rng);
        const auto ev = evaluate_route(route, inst, set);
        if (!ev.feasible()) {
            continue;
        }
        ++feasible;
        EXPECT_LE(lower_bound_route(route, inst, set), ev.expected_duration + 1e-9) << "seed " << seed;
        for (const auto& d : ev.traces[0].detours) {
            const double realized = std::hypot(d.detour_point.x - inst.node(d.from).x,
                                               d.detour_point.y - inst.node(d.from).y)
                                    + d.dist_to_station + inst.distance(d.station, d.to);
            EXPECT_LE(prop2_bound(inst, d.from, d.to), realized + 1e-9);
        }
    }
    EXPECT_GE(feasible, 300);
}

TEST(Ndcs, SingleStationKeptWhereReachable)
{
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 60, 0, ""},
                                     {2, NodeKind::Station, 50, 5, "fast"}});
    const auto t = precompute_ndcs(inst);
    EXPECT_EQ(std::vector<NodeId>(t.candidates(0, 1).begin(), t.candidates(0, 1).end()), std::vector<NodeId>{2});
    EXPECT_EQ(std::vector<NodeId>(t.candidates(1, 0).begin(), t.candidates(1, 0).end()), std::vector<NodeId>{2});
}

TEST(Ndcs, SameTechnologyFartherStationRemoved)
{
    // station 4 is farther from the arc than station 3 is from either end of it
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 40, 0, ""},
                                     {2, NodeKind::Customer, 80, 0, ""},
                                     {3, NodeKind::Station, 20, 5, "fast"},
                                     {4, NodeKind::Station, 20, 25, "fast"}});
    // arc (0,1): d_seg(4) = 25 > max(d_03, d_31) = hypot(20, 5) and d_41 > d_31
    const auto t = precompute_ndcs(inst);
    EXPECT_EQ(std::vector<NodeId>(t.candidates(0, 1).begin(), t.candidates(0, 1).end()), std::vector<NodeId>{3});
}

TEST(Ndcs, ExcludesStationWithTargetAboveCapacity)
{
    // Q^G + e_21 = 19.2 + 0.125 * 60 = 26.7 > 24
    const auto inst = line_instance({{0, NodeKind::Depot, 0, 0, ""},
                                     {1, NodeKind::Customer, 60, 0, ""},
                                     {2, NodeKind::Station, 0, 0.5, "fast"}});
    const auto t = precompute_ndcs(inst);
    EXPECT_TRUE(t.candidates(0, 1).empty());
    EXPECT_EQ(t.candidates(1, 0).size(), 1u);
}

TEST(Ndcs, StableUnderRecomputation)
{
    RandomInstanceSpec spec;
    spec.customers = 12;
    spec.stations = 6;
    const auto inst = sevrp::testing::random_instance(spec);
    EXPECT_EQ(precompute_ndcs(inst), precompute_ndcs(inst));
}

TEST(Ndcs, SlowerTechnologyDroppedOnlyWhenDominated)
{
    InstanceData d;
    d.charging_functions.emplace("fast", ChargingFunction({{0, 0}, {1, 16}, {2, 24}}));
    d.charging_functions.emplace("slow", ChargingFunction({{0, 0}, {2, 16}, {4, 24}}));
    d.nodes = {{0, NodeKind::Depot, 0, 0, ""},
               {1, NodeKind::Customer, 40, 0, ""},
               {2, NodeKind::Station, 20, 5, "fast"},
               {3, NodeKind::Station, 20, 25, "slow"},
               {4, NodeKind::Station, 45, 10, "fast"}};
    const Instance inst(d);
    const auto t = precompute_ndcs(inst);
    // 3 is farther than 2 from the whole arc and from 1, and charges slower;
    // 4 is nearer to 1 than 2 is, so neither fast station outranks the other
    EXPECT_EQ(std::vector<NodeId>(t.candidates(0, 1).begin(), t.candidates(0, 1).end()),
              (std::vector<NodeId>{2, 4}));
}

TEST(Ndcs, NominalEquivalenceOnRandomInstances)
{
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        RandomInstanceSpec spec;
        spec.customers = 8;
        spec.stations = 3 + static_cast<int>(seed % 6);
        spec.extent = 150.0;
        spec.seed = seed;
        const auto inst = sevrp::testing::random_instance(spec);
        const ScenarioSet set = nominal_scenarios(inst);
        const auto ndcs = precompute_ndcs(inst);
        std::mt19937_64 rng(seed);
        for (int k = 0; k < 100; ++k) {
            const auto route = sevrp::testing::random_route(inst, 1 + rng() % 6, rng);
            EvalOptions with, without;
            with.ndcs = &ndcs;
            with.record_traces = without.record_traces = true;
            const auto a = evaluate_route(route, inst, set, with);
            const auto b = evaluate_route(route, inst, set, without);
            ASSERT_EQ(a.expected_duration, b.expected_duration) << "seed " << seed;
            ASSERT_EQ(a.traces[0].detours.size(), b.traces[0].detours.size());
            for (std::size_t i = 0; i < a.traces[0].detours.size(); ++i) {
                EXPECT_EQ(a.traces[0].detours[i].station, b.traces[0].detours[i].station) << "seed " << seed;
            }
        }
    }
}

TEST(Prop1, TimeBetterStationChosenOverShorterOne)
{
    const double a1 = 16, b1 = 16, b2 = 2;
    const auto inst = sevrp::testing::prop1_instance(sevrp::testing::two_segment_curve(a1, b1, b2));
    const auto sc = nominal_scenarios(inst);
    const Point f{134.4, 0};
    const double path2 = 1.0 + inst.distance(2, 1);
    const double path3 = std::hypot(141 - 134.4, 0.0) + inst.distance(3, 1);
    ASSERT_LT(path2, path3);

    const double t2 = sevrp::testing::direct_detour_time(inst, f, 2, 1, a1, b1, b2);
    const double t3 = sevrp::testing::direct_detour_time(inst, f, 3, 1, a1, b1, b2);
    ASSERT_GT(t2, t3);

    const auto ev = evaluate_route(Route{1}, inst, sc);
    ASSERT_EQ(ev.traces[0].detours.size(), 1u);
    const auto& d = ev.traces[0].detours[0];
    EXPECT_NEAR(d.detour_point.x, f.x, 1e-9);
    EXPECT_EQ(d.station, 3);
    EXPECT_NEAR(d.time, 134.4 / 40 + t3, 1e-9);
}

TEST(Prop1, NearlyLinearCurveFlipsChoice)
{
    const double a1 = 16, b1 = 16, b2 = 15.5;
    const auto inst = sevrp::testing::prop1_instance(sevrp::testing::two_segment_curve(a1, b1, b2));
    const Point f{134.4, 0};
    ASSERT_LT(sevrp::testing::direct_detour_time(inst, f, 2, 1, a1, b1, b2), sevrp::testing::direct_detour_time(inst, f, 3, 1, a1, b1, b2));
    const auto ev = evaluate_route(Route{1}, inst, nominal_scenarios(inst));
    ASSERT_EQ(ev.traces[0].detours.size(), 1u);
    EXPECT_EQ(ev.traces[0].detours[0].station, 2);
}
