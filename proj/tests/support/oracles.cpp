#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace sevrp::testing {

double direct_detour_time(const Instance& inst, Point f, NodeId k, NodeId j, double a1, double b1, double b2)
{
    const auto& p = inst.params();
    const auto& nk = inst.node(k);
    const double d_fk = std::hypot(f.x - nk.x, f.y - nk.y);
    const double arrive = p.q_threshold - p.consumption_rate * d_fk;
    const double target = p.q_goal + inst.nominal_energy(k, j);
    const double charge = (a1 - arrive) / b1 + (target - a1) / b2;
    return d_fk / p.speed + charge + inst.travel_time(k, j);
}

std::vector<std::size_t> greedy_replay(const std::vector<double>& v, const std::vector<double>& p, std::size_t m)
{
    const std::size_t n = v.size();
    std::vector<std::size_t> kept;
    for (std::size_t step = 0; step < m; ++step) {
        std::size_t best = n;
        double best_z = INFINITY;
        for (std::size_t u = 0; u < n; ++u) {
            if (std::find(kept.begin(), kept.end(), u) != kept.end()) {
                continue;
            }
            std::vector<std::size_t> cand = kept;
            cand.push_back(u);
            double z = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (std::find(cand.begin(), cand.end(), k) != cand.end()) {
                    continue;
                }
                double near = INFINITY;
                for (std::size_t j : cand) {
                    near = std::min(near, std::abs(v[k] - v[j]));
                }
                z += p[k] * near;
            }
            if (z < best_z) {
                best_z = z;
                best = u;
            }
        }
        kept.push_back(best);
    }
    return kept;
}

std::vector<double> redistribution_oracle(const std::vector<double>& v, const std::vector<double>& p,
                                          const std::vector<std::size_t>& kept)
{
    std::vector<std::size_t> sorted = kept;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> mass(v.size(), 0.0);
    for (std::size_t s = 0; s < v.size(); ++s) {
        std::size_t near = sorted.front();
        for (std::size_t k : sorted) {
            if (std::abs(v[s] - v[k]) < std::abs(v[s] - v[near])) {
                near = k;
            }
        }
        mass[near] += p[s];
    }
    std::vector<double> out;
    for (std::size_t k : kept) {
        out.push_back(mass[k]);
    }
    return out;
}

} // namespace sevrp::testing
