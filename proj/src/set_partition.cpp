#include "sevrp/set_partition.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace sevrp {

namespace {

constexpr double kTol = 1e-9;

struct CoverKey {
    boost::dynamic_bitset<> bits;
    bool operator<(const CoverKey& o) const { return bits < o.bits; }
};

class Builder {
public:
    explicit Builder(std::vector<NodeId> customers) : customers_(std::move(customers))
    {
        for (std::size_t k = 0; k < customers_.size(); ++k) {
            slot_[customers_[k]] = k;
        }
    }

    std::size_t add(const Route& route, double cost)
    {
        if (!(cost >= 0.0) || cost == kInfeasible) {
            throw std::invalid_argument("column cost must be finite and non-negative");
        }
        boost::dynamic_bitset<> bits(customers_.size());
        for (NodeId c : route) {
            auto it = slot_.find(c);
            if (it == slot_.end() || bits.test(it->second)) {
                throw std::invalid_argument("route visits node " + std::to_string(c) + " that is not a distinct customer");
            }
            bits.set(it->second);
        }
        auto [it, fresh] = index_.emplace(CoverKey{bits}, sp_.columns.size());
        if (fresh) {
            sp_.columns.push_back({std::move(bits), cost, route});
        }
        else if (cost < sp_.columns[it->second].cost) {
            sp_.columns[it->second].cost = cost;
            sp_.columns[it->second].route = route;
        }
        return it->second;
    }

    SpInstance finish()
    {
        sp_.customers = customers_;
        boost::dynamic_bitset<> all(customers_.size());
        for (const auto& col : sp_.columns) {
            all |= col.cover;
        }
        for (std::size_t k = 0; k < customers_.size(); ++k) {
            if (!all.test(k)) {
                throw std::invalid_argument("customer " + std::to_string(customers_[k]) + " has no covering column");
            }
        }
        return std::move(sp_);
    }

    SpInstance& sp() { return sp_; }

private:
    std::vector<NodeId> customers_;
    std::map<NodeId, std::size_t> slot_;
    std::map<CoverKey, std::size_t> index_;
    SpInstance sp_;
};

} // namespace

SpInstance build_sp(const Instance& instance, const RoutePool& pool, const Solution& incumbent)
{
    if (pool.size() == 0) {
        throw std::invalid_argument("route pool is empty");
    }
    Builder b({instance.customers().begin(), instance.customers().end()});
    for (const auto& [route, cost] : pool.entries()) {
        b.add(route, cost);
    }
    for (std::size_t r = 0; r < incumbent.routes.size(); ++r) {
        b.sp().incumbent.push_back(b.add(incumbent.routes[r], incumbent.durations[r]));
    }
    std::sort(b.sp().incumbent.begin(), b.sp().incumbent.end());
    return b.finish();
}

SpInstance make_sp(std::vector<NodeId> customers, const std::vector<std::pair<Route, double>>& columns)
{
    Builder b(std::move(customers));
    for (const auto& [route, cost] : columns) {
        b.add(route, cost);
    }
    return b.finish();
}

namespace {

class BranchAndBound {
public:
    BranchAndBound(const SpInstance& sp, double time_limit)
        : sp_(sp), n_(sp.customers.size()), limit_(time_limit), start_(std::chrono::steady_clock::now())
    {
        order_.resize(sp.columns.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return sp.columns[a].cost < sp.columns[b].cost; });
        covering_.resize(n_);
        amortized_.assign(n_, std::numeric_limits<double>::infinity());
        for (std::size_t c : order_) {
            const auto& col = sp.columns[c];
            const double share = col.cost / static_cast<double>(col.cover.count());
            for (auto k = col.cover.find_first(); k != boost::dynamic_bitset<>::npos; k = col.cover.find_next(k)) {
                covering_[k].push_back(c);
                amortized_[k] = std::min(amortized_[k], share);
            }
        }
    }

    SpResult run()
    {
        if (!sp_.incumbent.empty() && is_partition(sp_.incumbent)) {
            result_.selected = sp_.incumbent;
            result_.cost = 0.0;
            for (std::size_t c : sp_.incumbent) {
                result_.cost += sp_.columns[c].cost;
            }
        }
        boost::dynamic_bitset<> covered(n_);
        dfs(covered, 0.0);
        result_.proven = !timed_out_;
        std::sort(result_.selected.begin(), result_.selected.end());
        return result_;
    }

private:
    bool is_partition(const std::vector<std::size_t>& cols) const
    {
        boost::dynamic_bitset<> seen(n_);
        for (std::size_t c : cols) {
            if ((seen & sp_.columns[c].cover).any()) {
                return false;
            }
            seen |= sp_.columns[c].cover;
        }
        return seen.all();
    }

    bool out_of_time()
    {
        if (timed_out_) {
            return true;
        }
        if ((result_.nodes & 1023u) == 0) {
            const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start_;
            timed_out_ = spent.count() >= limit_;
        }
        return timed_out_;
    }

    void dfs(boost::dynamic_bitset<>& covered, double cost)
    {
        ++result_.nodes;
        if (out_of_time()) {
            return;
        }
        if (covered.all()) {
            if (cost < result_.cost - kTol) {
                result_.cost = cost;
                result_.selected = stack_;
            }
            return;
        }
        double bound = cost;
        std::size_t branch = n_;
        for (std::size_t k = 0; k < n_; ++k) {
            if (!covered.test(k)) {
                bound += amortized_[k];
                if (branch == n_) {
                    branch = k;
                }
            }
        }
        if (bound >= result_.cost - kTol) {
            return;
        }
        for (std::size_t c : covering_[branch]) {
            const auto& col = sp_.columns[c];
            if (cost + col.cost >= result_.cost - kTol) {
                break; // columns are sorted by cost
            }
            if (col.cover.intersects(covered)) {
                continue;
            }
            covered |= col.cover;
            stack_.push_back(c);
            dfs(covered, cost + col.cost);
            stack_.pop_back();
            covered ^= col.cover;
            if (timed_out_) {
                return;
            }
        }
    }

    const SpInstance& sp_;
    std::size_t n_;
    double limit_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::size_t>> covering_;
    std::vector<double> amortized_;
    std::vector<std::size_t> stack_;
    SpResult result_;
    bool timed_out_ = false;
};

} // namespace

SpResult solve_sp(const SpInstance& sp, double time_limit)
{
    if (sp.customers.empty()) {
        SpResult r;
        r.cost = 0.0;
        r.proven = true;
        return r;
    }
    return BranchAndBound(sp, time_limit).run();
}

Solution to_solution(const SpInstance& sp, const SpResult& result)
{
    Solution s;
    for (std::size_t c : result.selected) {
        s.routes.push_back(sp.columns[c].route);
        s.durations.push_back(sp.columns[c].cost);
    }
    return s;
}

void write_lp(std::ostream& out, const SpInstance& sp)
{
    out << std::setprecision(17);
    out << "\\ set partitioning over " << sp.columns.size() << " routes\n";
    out << "Minimize\n obj:";
    for (std::size_t c = 0; c < sp.columns.size(); ++c) {
        out << (c == 0 ? " " : " + ") << sp.columns[c].cost << " x" << c;
    }
    out << "\nSubject To\n";
    for (std::size_t k = 0; k < sp.customers.size(); ++k) {
        out << " visit_" << sp.customers[k] << ":";
        bool first = true;
        for (std::size_t c = 0; c < sp.columns.size(); ++c) {
            if (sp.columns[c].cover.test(k)) {
                out << (first ? " " : " + ") << "x" << c;
                first = false;
            }
        }
        out << " = 1\n";
    }
    out << "Binary\n";
    for (std::size_t c = 0; c < sp.columns.size(); ++c) {
        out << " x" << c << "\n";
    }
    out << "End\n";
}


IlsSpResult ils_sp(const Instance& instance, const ScenarioSet& scenarios, const SearchParams& params,
                   double sp_time_limit, const std::function<void(const IlsProgress&)>& progress)
{
    RouteEvaluator eval(instance, scenarios, params.use_ndcs);
    auto run = ils(eval, params, progress);
    IlsSpResult out;
    out.ils_objective = run.best.objective();
    out.iterations = run.iterations;
    out.pool_size = run.pool.size();
    out.incumbent_history = std::move(run.incumbent_history);
    const auto sp = build_sp(instance, run.pool, run.best);
    const auto picked = solve_sp(sp, sp_time_limit);
    out.sp_proven = picked.proven;
    out.solution = to_solution(sp, picked);
    if (!(out.solution.objective() <= out.ils_objective)) {
        out.solution = run.best; // only reachable on a timeout without a better cover
    }
    return out;
}

} // namespace sevrp
