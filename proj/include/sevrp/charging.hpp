#pragma once

#include <span>
#include <string>
#include <vector>

namespace sevrp {

/// One vertex of a piecewise-linear charging curve: after charging for
/// `time` from empty, the battery holds `soc` kWh.
struct Breakpoint {
    double time = 0.0;
    double soc = 0.0;

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Charge from `q_in` kWh up to `q_out` kWh.
struct ChargeQuery {
    double q_in = 0.0;
    double q_out = 0.0;
};

/// Piecewise-linear concave state-of-charge curve of a station technology.
///
/// The curve starts at (0, 0), both coordinates increase strictly along the
/// breakpoints and segment slopes (kWh per time unit) decrease strictly.
/// Construction does not enforce these; `curve_diagnostics` reports them so
/// the instance validator can name every violation at once.
class ChargingFunction {
public:
    ChargingFunction() = default;
    explicit ChargingFunction(std::vector<Breakpoint> breakpoints);

    std::span<const Breakpoint> breakpoints() const { return breakpoints_; }
    double max_soc() const { return breakpoints_.back().soc; }
    double max_time() const { return breakpoints_.back().time; }

    /// SoC after charging from empty for `t` time units.
    double soc_after(double t) const;

    /// Charging time needed to reach `soc` from empty (exact inverse of soc_after).
    double time_to(double soc) const;

    /// Time to charge from q_in to q_out. Throws std::invalid_argument when
    /// q_in > q_out or q_in < 0, std::out_of_range when q_out exceeds the curve.
    double inverse_charge_time(const ChargeQuery& query) const;

    /// Smallest time-per-kWh over all segments (the first segment for a concave curve).
    double min_time_per_kwh() const;

    friend bool operator==(const ChargingFunction&, const ChargingFunction&) = default;

private:
    std::vector<Breakpoint> breakpoints_;
};

/// Human-readable descriptions of violated curve invariants; empty when valid.
/// `q_max` is the battery capacity the last breakpoint must reach.
std::vector<std::string> curve_diagnostics(const ChargingFunction& cf, double q_max);

inline double soc_after(const ChargingFunction& cf, double t) { return cf.soc_after(t); }

inline double inverse_charge_time(const ChargingFunction& cf, const ChargeQuery& query)
{
    return cf.inverse_charge_time(query);
}

} // namespace sevrp
