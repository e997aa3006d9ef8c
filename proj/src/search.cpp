#include "sevrp/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sevrp {

namespace {

constexpr double kImprovement = 1e-9;
constexpr std::size_t kCacheLimit = 500000;

const std::array<const char*, 12> kNames{"inter-1-0", "inter-1-1", "inter-2-0", "inter-2-1", "inter-2-2", "intra-1-0",
                                         "intra-1-1", "intra-2-0", "intra-2-1", "intra-2-2", "2-opt",     "separate"};

} // namespace

std::string to_string(Neighborhood n) { return kNames[static_cast<std::size_t>(n)]; }

Neighborhood neighborhood_from_string(const std::string& text)
{
    for (std::size_t k = 0; k < kNames.size(); ++k) {
        if (text == kNames[k]) {
            return static_cast<Neighborhood>(k);
        }
    }
    throw std::invalid_argument("unknown neighborhood '" + text + "'");
}

SearchParams SearchParams::from(const PolicyParams& p)
{
    SearchParams s;
    s.i_max = p.i_max;
    s.gamma = p.gamma;
    s.use_ndcs = p.use_ndcs;
    s.seed = p.seed;
    return s;
}

std::size_t RouteHash::operator()(const Route& r) const noexcept
{
    std::size_t h = r.size();
    for (NodeId c : r) {
        h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

RouteEvaluator::RouteEvaluator(const Instance& instance, const ScenarioSet& scenarios, bool use_ndcs)
    : instance_(&instance), scenarios_(&scenarios), mean_(mean_scenario(scenarios)), use_ndcs_(use_ndcs)
{
    if (use_ndcs_) {
        ndcs_ = precompute_ndcs(instance);
    }
}

double RouteEvaluator::duration(const Route& route)
{
    if (auto it = cache_.find(route); it != cache_.end()) {
        return it->second;
    }
    if (cache_.size() >= kCacheLimit) {
        cache_.clear();
    }
    ++evaluations_;
    const double d = route_duration(route, *instance_, *scenarios_, ndcs());
    cache_.emplace(route, d);
    return d;
}

double Solution::objective() const { return std::accumulate(durations.begin(), durations.end(), 0.0); }

std::size_t Solution::customer_count() const
{
    std::size_t n = 0;
    for (const auto& r : routes) {
        n += r.size();
    }
    return n;
}

void check_partition(const Instance& instance, const Solution& s)
{
    std::vector<int> seen(instance.size(), 0);
    for (const auto& r : s.routes) {
        if (r.empty()) {
            throw std::logic_error("solution holds an empty route");
        }
        for (NodeId c : r) {
            if (!instance.is_customer(c) || seen[static_cast<std::size_t>(c)]++ > 0) {
                throw std::logic_error("customer " + std::to_string(c) + " is not a unique customer visit");
            }
        }
    }
    for (NodeId c : instance.customers()) {
        if (seen[static_cast<std::size_t>(c)] != 1) {
            throw std::logic_error("customer " + std::to_string(c) + " is not visited");
        }
    }
    if (s.durations.size() != s.routes.size()) {
        throw std::logic_error("durations misaligned with routes");
    }
}

// ---------------------------------------------------------------------------
// Moves
// ---------------------------------------------------------------------------

namespace {

bool is_inter(Neighborhood k)
{
    switch (k) {
    case Neighborhood::Inter10:
    case Neighborhood::Inter11:
    case Neighborhood::Inter20:
    case Neighborhood::Inter21:
    case Neighborhood::Inter22:
    case Neighborhood::TwoOpt:
        return true;
    default:
        return false;
    }
}

Route segment(const Route& r, int i, int len, bool rev)
{
    Route s(r.begin() + i, r.begin() + i + len);
    if (rev) {
        std::reverse(s.begin(), s.end());
    }
    return s;
}

Route erased(const Route& r, int i, int len)
{
    Route out = r;
    out.erase(out.begin() + i, out.begin() + i + len);
    return out;
}

Route inserted(const Route& r, int pos, const Route& seq)
{
    Route out = r;
    out.insert(out.begin() + pos, seq.begin(), seq.end());
    return out;
}

// Replace r[i, i + len) with seq.
Route replaced(const Route& r, int i, int len, const Route& seq) { return inserted(erased(r, i, len), i, seq); }

int sz(const Route& r) { return static_cast<int>(r.size()); }

} // namespace

void enumerate_moves(const std::vector<Route>& routes, Neighborhood kind, const std::function<void(const Move&)>& f)
{
    const int nr = static_cast<int>(routes.size());
    const bool flips[2] = {false, true};

    switch (kind) {
    case Neighborhood::Inter10:
        for (int a = 0; a < nr; ++a) {
            for (int b = 0; b < nr; ++b) {
                if (a == b) {
                    continue;
                }
                for (int i = 0; i < sz(routes[a]); ++i) {
                    for (int p = 0; p <= sz(routes[b]); ++p) {
                        f({kind, a, b, i, p, false, false});
                    }
                }
            }
        }
        break;
    case Neighborhood::Inter11:
        for (int a = 0; a < nr; ++a) {
            for (int b = a + 1; b < nr; ++b) {
                for (int i = 0; i < sz(routes[a]); ++i) {
                    for (int j = 0; j < sz(routes[b]); ++j) {
                        f({kind, a, b, i, j, false, false});
                    }
                }
            }
        }
        break;
    case Neighborhood::Inter20:
    case Neighborhood::Inter21:
        for (int a = 0; a < nr; ++a) {
            for (int b = 0; b < nr; ++b) {
                if (a == b) {
                    continue;
                }
                const int slots = kind == Neighborhood::Inter20 ? sz(routes[b]) + 1 : sz(routes[b]);
                for (int i = 0; i + 1 < sz(routes[a]); ++i) {
                    for (int j = 0; j < slots; ++j) {
                        for (bool rev : flips) {
                            f({kind, a, b, i, j, rev, false});
                        }
                    }
                }
            }
        }
        break;
    case Neighborhood::Inter22:
        for (int a = 0; a < nr; ++a) {
            for (int b = a + 1; b < nr; ++b) {
                for (int i = 0; i + 1 < sz(routes[a]); ++i) {
                    for (int j = 0; j + 1 < sz(routes[b]); ++j) {
                        for (bool r1 : flips) {
                            for (bool r2 : flips) {
                                f({kind, a, b, i, j, r1, r2});
                            }
                        }
                    }
                }
            }
        }
        break;
    case Neighborhood::Intra10:
        for (int a = 0; a < nr; ++a) {
            const int n = sz(routes[a]);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (j != i) {
                        f({kind, a, -1, i, j, false, false});
                    }
                }
            }
        }
        break;
    case Neighborhood::Intra11:
        for (int a = 0; a < nr; ++a) {
            const int n = sz(routes[a]);
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    f({kind, a, -1, i, j, false, false});
                }
            }
        }
        break;
    case Neighborhood::Intra20:
        for (int a = 0; a < nr; ++a) {
            const int n = sz(routes[a]);
            for (int i = 0; i + 1 < n; ++i) {
                for (int j = 0; j <= n - 2; ++j) {
                    for (bool rev : flips) {
                        if (j != i || rev) {
                            f({kind, a, -1, i, j, rev, false});
                        }
                    }
                }
            }
        }
        break;
    case Neighborhood::Intra21:
        for (int a = 0; a < nr; ++a) {
            const int n = sz(routes[a]);
            for (int i = 0; i + 1 < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (j == i || j == i + 1) {
                        continue;
                    }
                    for (bool rev : flips) {
                        f({kind, a, -1, i, j, rev, false});
                    }
                }
            }
        }
        break;
    case Neighborhood::Intra22:
        for (int a = 0; a < nr; ++a) {
            const int n = sz(routes[a]);
            for (int i = 0; i + 1 < n; ++i) {
                for (int j = i + 2; j + 1 < n; ++j) {
                    for (bool r1 : flips) {
                        for (bool r2 : flips) {
                            f({kind, a, -1, i, j, r1, r2});
                        }
                    }
                }
            }
        }
        break;
    case Neighborhood::TwoOpt:
        for (int a = 0; a < nr; ++a) {
            for (int b = a + 1; b < nr; ++b) {
                const int na = sz(routes[a]);
                const int nb = sz(routes[b]);
                for (int i = 0; i <= na; ++i) {
                    for (int j = 0; j <= nb; ++j) {
                        if ((i == 0 && j == 0) || (i == na && j == nb)) {
                            continue;
                        }
                        f({kind, a, b, i, j, false, false});
                    }
                }
            }
        }
        break;
    case Neighborhood::Separate:
        for (int a = 0; a < nr; ++a) {
            for (int p = 0; p + 1 < sz(routes[a]); ++p) {
                f({kind, a, -1, p, 0, false, false});
            }
        }
        break;
    }
}

std::vector<Route> apply_move(const std::vector<Route>& routes, const Move& m)
{
    const Route& a = routes[static_cast<std::size_t>(m.r1)];
    const Route empty;
    const Route& b = m.r2 >= 0 ? routes[static_cast<std::size_t>(m.r2)] : empty;
    std::vector<Route> out;

    switch (m.kind) {
    case Neighborhood::Inter10:
        out = {erased(a, m.i, 1), inserted(b, m.j, {a[m.i]})};
        break;
    case Neighborhood::Inter11:
        out = {replaced(a, m.i, 1, {b[m.j]}), replaced(b, m.j, 1, {a[m.i]})};
        break;
    case Neighborhood::Inter20:
        out = {erased(a, m.i, 2), inserted(b, m.j, segment(a, m.i, 2, m.rev1))};
        break;
    case Neighborhood::Inter21:
        out = {replaced(a, m.i, 2, {b[m.j]}), replaced(b, m.j, 1, segment(a, m.i, 2, m.rev1))};
        break;
    case Neighborhood::Inter22:
        out = {replaced(a, m.i, 2, segment(b, m.j, 2, m.rev2)), replaced(b, m.j, 2, segment(a, m.i, 2, m.rev1))};
        break;
    case Neighborhood::Intra10:
        out = {inserted(erased(a, m.i, 1), m.j, {a[m.i]})};
        break;
    case Neighborhood::Intra11: {
        Route r = a;
        std::swap(r[m.i], r[m.j]);
        out = {r};
        break;
    }
    case Neighborhood::Intra20:
        out = {inserted(erased(a, m.i, 2), m.j, segment(a, m.i, 2, m.rev1))};
        break;
    case Neighborhood::Intra21: {
        const Route pair = segment(a, m.i, 2, m.rev1);
        Route r;
        if (m.j < m.i) {
            r.assign(a.begin(), a.begin() + m.j);
            r.insert(r.end(), pair.begin(), pair.end());
            r.insert(r.end(), a.begin() + m.j + 1, a.begin() + m.i);
            r.push_back(a[m.j]);
            r.insert(r.end(), a.begin() + m.i + 2, a.end());
        }
        else {
            r.assign(a.begin(), a.begin() + m.i);
            r.push_back(a[m.j]);
            r.insert(r.end(), a.begin() + m.i + 2, a.begin() + m.j);
            r.insert(r.end(), pair.begin(), pair.end());
            r.insert(r.end(), a.begin() + m.j + 1, a.end());
        }
        out = {r};
        break;
    }
    case Neighborhood::Intra22: {
        const Route p1 = segment(a, m.i, 2, m.rev1);
        const Route p2 = segment(a, m.j, 2, m.rev2);
        Route r(a.begin(), a.begin() + m.i);
        r.insert(r.end(), p2.begin(), p2.end());
        r.insert(r.end(), a.begin() + m.i + 2, a.begin() + m.j);
        r.insert(r.end(), p1.begin(), p1.end());
        r.insert(r.end(), a.begin() + m.j + 2, a.end());
        out = {r};
        break;
    }
    case Neighborhood::TwoOpt: {
        Route r1(a.begin(), a.begin() + m.i);
        r1.insert(r1.end(), b.begin() + m.j, b.end());
        Route r2(b.begin(), b.begin() + m.j);
        r2.insert(r2.end(), a.begin() + m.i, a.end());
        out = {r1, r2};
        break;
    }
    case Neighborhood::Separate:
        out = {Route(a.begin(), a.begin() + m.i + 1), Route(a.begin() + m.i + 1, a.end())};
        break;
    }
    std::erase_if(out, [](const Route& r) { return r.empty(); });
    return out;
}

std::vector<int> impacted_routes(const Move& m)
{
    if (is_inter(m.kind)) {
        return {m.r1, m.r2};
    }
    return {m.r1};
}

Solution replace_routes(const Solution& s, const Move& m, std::vector<Route> fresh, std::vector<double> durations)
{
    const auto hit = impacted_routes(m);
    const int slot = *std::min_element(hit.begin(), hit.end());
    Solution out;
    for (int r = 0; r < static_cast<int>(s.routes.size()); ++r) {
        if (r == slot) {
            for (std::size_t k = 0; k < fresh.size(); ++k) {
                out.routes.push_back(std::move(fresh[k]));
                out.durations.push_back(durations[k]);
            }
        }
        if (std::find(hit.begin(), hit.end(), r) == hit.end()) {
            out.routes.push_back(s.routes[static_cast<std::size_t>(r)]);
            out.durations.push_back(s.durations[static_cast<std::size_t>(r)]);
        }
    }
    return out;
}

FilterResult filter_move(const std::vector<Route>& fresh, double impacted_duration, RouteEvaluator& eval, double gamma)
{
    double first = 0.0;
    for (const auto& r : fresh) {
        first += eval.first_stage(r);
    }
    if (first >= gamma * impacted_duration) {
        return FilterResult::RejectedStage1;
    }
    double lb = 0.0;
    for (const auto& r : fresh) {
        lb += eval.lower_bound(r);
    }
    if (lb >= impacted_duration) {
        return FilterResult::RejectedStage2;
    }
    return FilterResult::Candidate;
}

// ---------------------------------------------------------------------------
// VND
// ---------------------------------------------------------------------------

Solution vnd(const Solution& start, RouteEvaluator& eval, const SearchParams& params, VndStats* stats)
{
    VndStats local;
    VndStats& st = stats != nullptr ? *stats : local;
    Solution cur = start;
    std::size_t d = 0;

    while (d < params.order.size()) {
        bool found = false;
        double best_delta = -kImprovement;
        Move best_move;
        std::vector<Route> best_routes;
        std::vector<double> best_durations;

        enumerate_moves(cur.routes, params.order[d], [&](const Move& m) {
            if (found && params.first_improvement) {
                return;
            }
            auto fresh = apply_move(cur.routes, m);
            double impacted = 0.0;
            for (int r : impacted_routes(m)) {
                impacted += cur.durations[static_cast<std::size_t>(r)];
            }
            if (params.use_filters) {
                const auto verdict = filter_move(fresh, impacted, eval, params.gamma);
                if (verdict == FilterResult::RejectedStage1) {
                    ++st.rejected_stage1;
                    return;
                }
                if (verdict == FilterResult::RejectedStage2) {
                    ++st.rejected_stage2;
                    return;
                }
            }
            ++st.evaluated;
            std::vector<double> durs;
            double total = 0.0;
            for (const auto& r : fresh) {
                const double t = eval.duration(r);
                if (t == kInfeasible) {
                    return;
                }
                durs.push_back(t);
                total += t;
            }
            const double delta = total - impacted;
            if (delta < best_delta) {
                best_delta = delta;
                best_move = m;
                best_routes = std::move(fresh);
                best_durations = std::move(durs);
                found = true;
            }
        });

        if (found) {
            cur = replace_routes(cur, best_move, std::move(best_routes), std::move(best_durations));
            ++st.moves_applied;
            d = 0;
        }
        else {
            ++d;
        }
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Construction and perturbation
// ---------------------------------------------------------------------------

UnservableCustomer::UnservableCustomer(NodeId customer)
    : std::runtime_error("customer " + std::to_string(customer)
                         + " cannot be served under the recharge policy, even on its own route"),
      customer_(customer)
{
}

Solution initial_solution(RouteEvaluator& eval)
{
    const auto& inst = eval.instance();
    for (NodeId c : inst.customers()) {
        if (eval.duration({c}) == kInfeasible) {
            throw UnservableCustomer(c);
        }
    }

    std::vector<NodeId> left(inst.customers().begin(), inst.customers().end());
    std::vector<NodeId> tour;
    NodeId last = 0;
    while (!left.empty()) {
        auto it = std::min_element(left.begin(), left.end(), [&](NodeId a, NodeId b) {
            return inst.distance(last, a) < inst.distance(last, b)
                   || (inst.distance(last, a) == inst.distance(last, b) && a < b);
        });
        last = *it;
        tour.push_back(last);
        left.erase(it);
    }

    Solution s;
    Route cur;
    double cur_dur = 0.0;
    for (NodeId c : tour) {
        Route cand = cur;
        cand.push_back(c);
        const double t = eval.duration(cand);
        if (t < kInfeasible) {
            cur = std::move(cand);
            cur_dur = t;
            continue;
        }
        s.routes.push_back(std::move(cur));
        s.durations.push_back(cur_dur);
        cur = {c};
        cur_dur = eval.duration(cur);
    }
    if (!cur.empty()) {
        s.routes.push_back(std::move(cur));
        s.durations.push_back(cur_dur);
    }
    return s;
}

std::pair<int, int> perturbation_size_range(int customers)
{
    const int lo = std::min(customers, 5);
    const int hi = std::max(lo, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(customers)))));
    return {lo, hi};
}

Solution perturb(const Solution& best, RouteEvaluator& eval, std::mt19937_64& rng)
{
    const auto& inst = eval.instance();
    const auto customers = inst.customers();
    const int n = static_cast<int>(customers.size());
    if (n == 0) {
        return best;
    }
    const auto [lo, hi] = perturbation_size_range(n);
    const int kappa = std::uniform_int_distribution<int>(lo, hi)(rng);
    const NodeId seed = customers[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng))];

    std::vector<NodeId> order;
    for (NodeId c : customers) {
        if (c != seed) {
            order.push_back(c);
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return inst.distance(seed, a) < inst.distance(seed, b); });
    std::vector<NodeId> removed{seed};
    removed.insert(removed.end(), order.begin(), order.begin() + (kappa - 1));

    // origin tag per route: the index in `best`, or -1 for routes opened here
    std::vector<int> origin_of(inst.size(), -1);
    for (std::size_t r = 0; r < best.routes.size(); ++r) {
        for (NodeId c : best.routes[r]) {
            origin_of[static_cast<std::size_t>(c)] = static_cast<int>(r);
        }
    }
    const std::set<NodeId> gone(removed.begin(), removed.end());
    std::vector<Route> routes;
    std::vector<int> tags;
    std::vector<double> durs;
    for (std::size_t r = 0; r < best.routes.size(); ++r) {
        Route kept;
        for (NodeId c : best.routes[r]) {
            if (!gone.contains(c)) {
                kept.push_back(c);
            }
        }
        if (kept.empty()) {
            continue;
        }
        const double t = kept.size() == best.routes[r].size() ? best.durations[r] : eval.duration(kept);
        if (t == kInfeasible) {
            // the remnant broke: release it for reinsertion as well
            removed.insert(removed.end(), kept.begin(), kept.end());
            continue;
        }
        routes.push_back(std::move(kept));
        tags.push_back(static_cast<int>(r));
        durs.push_back(t);
    }

    std::shuffle(removed.begin(), removed.end(), rng);
    for (NodeId c : removed) {
        const int origin = origin_of[static_cast<std::size_t>(c)];
        int best_r = -1;
        int best_p = 0;
        double best_inc = kInfeasible;
        double best_t = 0.0;
        for (std::size_t r = 0; r < routes.size(); ++r) {
            if (tags[r] == origin) {
                continue;
            }
            for (int p = 0; p <= static_cast<int>(routes[r].size()); ++p) {
                Route cand = routes[r];
                cand.insert(cand.begin() + p, c);
                const double t = eval.duration(cand);
                if (t == kInfeasible) {
                    continue;
                }
                if (t - durs[r] < best_inc) {
                    best_inc = t - durs[r];
                    best_r = static_cast<int>(r);
                    best_p = p;
                    best_t = t;
                }
            }
        }
        if (best_r >= 0) {
            auto& r = routes[static_cast<std::size_t>(best_r)];
            r.insert(r.begin() + best_p, c);
            durs[static_cast<std::size_t>(best_r)] = best_t;
        }
        else {
            routes.push_back({c});
            tags.push_back(-1);
            durs.push_back(eval.duration({c}));
        }
    }

    Solution out;
    out.routes = std::move(routes);
    out.durations = std::move(durs);
    return out;
}

// ---------------------------------------------------------------------------
// ILS
// ---------------------------------------------------------------------------

void RoutePool::insert(const Route& route, double duration)
{
    if (!(duration < kInfeasible)) {
        return;
    }
    auto [it, fresh] = entries_.emplace(route, duration);
    if (!fresh) {
        it->second = std::min(it->second, duration);
    }
}

IlsResult ils(RouteEvaluator& eval, const SearchParams& params, const std::function<void(const IlsProgress&)>& progress)
{
    if (params.i_max < 1) {
        throw std::invalid_argument("i_max must be >= 1");
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    std::mt19937_64 rng(params.seed);
    IlsResult res;
    const Solution s0 = initial_solution(eval);
    res.best = s0;

    for (int it = 0; it < params.i_max; ++it) {
        if (it > 0 && elapsed() >= params.time_limit) {
            break;
        }
        const Solution start = it == 0 ? s0 : perturb(res.best, eval, rng);
        const Solution s = vnd(start, eval, params);
        for (std::size_t r = 0; r < s.routes.size(); ++r) {
            res.pool.insert(s.routes[r], s.durations[r]);
        }
        if (it == 0 || s.objective() < res.best.objective()) {
            res.best = s;
        }
        res.iterations = it + 1;
        res.incumbent_history.push_back(res.best.objective());
        if (progress) {
            progress({it, res.best.objective(), res.pool.size(), elapsed()});
        }
    }
    return res;
}

} // namespace sevrp
