#include "sevrp/charging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sevrp {

namespace {

// Index of the segment [b-1, b] holding `value` along the chosen coordinate.
template <typename Key>
std::size_t segment_of(std::span<const Breakpoint> bps, double value, Key key)
{
    auto it = std::lower_bound(bps.begin() + 1, bps.end(), value,
                               [&](const Breakpoint& bp, double v) { return key(bp) < v; });
    if (it == bps.end()) {
        --it;
    }
    return static_cast<std::size_t>(it - bps.begin());
}

} // namespace

ChargingFunction::ChargingFunction(std::vector<Breakpoint> breakpoints)
    : breakpoints_(std::move(breakpoints))
{
    if (breakpoints_.size() < 2) {
        throw std::invalid_argument("charging function needs at least two breakpoints");
    }
}

double ChargingFunction::soc_after(double t) const
{
    if (!(t >= 0.0) || t > max_time()) {
        std::ostringstream msg;
        msg << "charging time " << t << " outside [0, " << max_time() << "]";
        throw std::out_of_range(msg.str());
    }
    const auto b = segment_of(breakpoints_, t, [](const Breakpoint& bp) { return bp.time; });
    const auto& lo = breakpoints_[b - 1];
    const auto& hi = breakpoints_[b];
    if (t == hi.time) {
        return hi.soc;
    }
    return lo.soc + (t - lo.time) * (hi.soc - lo.soc) / (hi.time - lo.time);
}

double ChargingFunction::time_to(double soc) const
{
    if (!(soc >= 0.0) || soc > max_soc()) {
        std::ostringstream msg;
        msg << "state of charge " << soc << " outside [0, " << max_soc() << "]";
        throw std::out_of_range(msg.str());
    }
    const auto b = segment_of(breakpoints_, soc, [](const Breakpoint& bp) { return bp.soc; });
    const auto& lo = breakpoints_[b - 1];
    const auto& hi = breakpoints_[b];
    if (soc == hi.soc) {
        return hi.time;
    }
    return lo.time + (soc - lo.soc) * (hi.time - lo.time) / (hi.soc - lo.soc);
}

double ChargingFunction::inverse_charge_time(const ChargeQuery& query) const
{
    if (query.q_in < 0.0 || query.q_in > query.q_out) {
        std::ostringstream msg;
        msg << "invalid charge query [" << query.q_in << ", " << query.q_out << "]";
        throw std::invalid_argument(msg.str());
    }
    if (query.q_out > max_soc()) {
        std::ostringstream msg;
        msg << "charge target " << query.q_out << " exceeds capacity " << max_soc();
        throw std::out_of_range(msg.str());
    }
    if (query.q_in == query.q_out) {
        return 0.0;
    }
    return time_to(query.q_out) - time_to(query.q_in);
}

double ChargingFunction::min_time_per_kwh() const
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 1; b < breakpoints_.size(); ++b) {
        const double dq = breakpoints_[b].soc - breakpoints_[b - 1].soc;
        const double dt = breakpoints_[b].time - breakpoints_[b - 1].time;
        if (dq > 0.0) {
            best = std::min(best, dt / dq);
        }
    }
    return best;
}

std::vector<std::string> curve_diagnostics(const ChargingFunction& cf, double q_max)
{
    std::vector<std::string> out;
    const auto bps = cf.breakpoints();
    if (bps.size() < 2) {
        out.emplace_back("fewer than two breakpoints");
        return out;
    }
    if (bps.front().time != 0.0 || bps.front().soc != 0.0) {
        out.emplace_back("first breakpoint is not (0, 0)");
    }
    bool monotone = true;
    for (std::size_t b = 1; b < bps.size(); ++b) {
        if (!(bps[b].time > bps[b - 1].time) || !(bps[b].soc > bps[b - 1].soc)) {
            std::ostringstream msg;
            msg << "breakpoint " << b << " does not strictly increase in time and soc";
            out.push_back(msg.str());
            monotone = false;
        }
    }
    if (monotone) {
        double prev_slope = std::numeric_limits<double>::infinity();
        for (std::size_t b = 1; b < bps.size(); ++b) {
            const double slope = (bps[b].soc - bps[b - 1].soc) / (bps[b].time - bps[b - 1].time);
            if (!(slope < prev_slope)) {
                std::ostringstream msg;
                msg << "not concave: slope of segment " << b << " (" << slope
                    << ") is not below the previous one (" << prev_slope << ")";
                out.push_back(msg.str());
            }
            prev_slope = slope;
        }
    }
    if (std::abs(bps.back().soc - q_max) > 1e-9 * std::max(1.0, q_max)) {
        std::ostringstream msg;
        msg << "last breakpoint soc " << bps.back().soc << " differs from q_max " << q_max;
        out.push_back(msg.str());
    }
    return out;
}

} // namespace sevrp
