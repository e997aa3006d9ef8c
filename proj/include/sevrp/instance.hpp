#pragma once

#include "sevrp/charging.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sevrp {

using NodeId = int;

enum class NodeKind { Depot, Customer, Station };

std::string to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& text);

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Customer;
    double x = 0.0;
    double y = 0.0;
    std::string technology; // stations only

    friend bool operator==(const Node&, const Node&) = default;
};

struct PolicyParams {
    double q_max = 24.0;
    double q_threshold = 7.2;
    double q_goal = 19.2;
    double consumption_rate = 0.125; // kWh per length unit
    double speed = 1.0;              // length units per time unit
    double gamma = 1.0;
    int i_max = 2000;
    std::uint64_t seed = 1;
    bool use_ndcs = true;
    double sp_time_limit = 600.0; // seconds

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Unvalidated instance contents, as read from a file or built by hand.
struct InstanceData {
    std::string name;
    std::vector<Node> nodes;
    std::map<std::string, ChargingFunction> charging_functions;
    PolicyParams params;
};

struct Diagnostic {
    std::string invariant; // e.g. "concavity", "parameter-ordering"
    std::string entity;    // e.g. "node 3", "technology fast", "params"
    std::string detail;
};

/// Every violated instance invariant; empty iff the data forms a valid instance.
std::vector<Diagnostic> validate(const InstanceData& data);

class InstanceError : public std::runtime_error {
public:
    explicit InstanceError(const std::string& what, std::vector<Diagnostic> diagnostics = {});
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Immutable SEVRP-T network with dense distance, time and nominal-energy
/// matrices over all physical nodes (depot, customers, stations).
class Instance {
public:
    /// Validates `data`; throws InstanceError listing every diagnostic on failure.
    explicit Instance(InstanceData data);

    const std::string& name() const { return data_.name; }
    const InstanceData& data() const { return data_; }
    const PolicyParams& params() const { return data_.params; }
    std::span<const Node> nodes() const { return data_.nodes; }
    const Node& node(NodeId id) const { return data_.nodes[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return data_.nodes.size(); }

    std::span<const NodeId> customers() const { return customers_; }
    std::span<const NodeId> stations() const { return stations_; }
    bool is_customer(NodeId id) const;

    double distance(NodeId i, NodeId j) const { return distance_[index(i, j)]; }
    double travel_time(NodeId i, NodeId j) const { return travel_time_[index(i, j)]; }
    double nominal_energy(NodeId i, NodeId j) const { return nominal_energy_[index(i, j)]; }
    std::span<const double> distance_matrix() const { return distance_; }
    std::span<const double> travel_time_matrix() const { return travel_time_; }
    std::span<const double> nominal_energy_matrix() const { return nominal_energy_; }

    const ChargingFunction& curve_at(NodeId station) const;

    /// Distance from `id` to its nearest charging station (infinity without stations).
    double nearest_station_distance(NodeId id) const { return nearest_station_[static_cast<std::size_t>(id)]; }

    /// Smallest time per kWh over every segment of every charging function.
    double fastest_time_per_kwh() const { return fastest_time_per_kwh_; }

    /// Copy with replaced policy parameters (revalidated).
    Instance with_params(const PolicyParams& params) const;

private:
    std::size_t index(NodeId i, NodeId j) const
    {
        return static_cast<std::size_t>(i) * data_.nodes.size() + static_cast<std::size_t>(j);
    }

    InstanceData data_;
    std::vector<NodeId> customers_;
    std::vector<NodeId> stations_;
    std::vector<double> distance_;
    std::vector<double> travel_time_;
    std::vector<double> nominal_energy_;
    std::vector<const ChargingFunction*> curve_of_;
    std::vector<double> nearest_station_;
    double fastest_time_per_kwh_ = 0.0;
};

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

enum class InstanceFormat { Canonical, BenchmarkImport };

enum class CurveScaling {
    SocAndTime, // stretch both axes so the curve ends at q_max; charging power is unchanged
    SocOnly,    // stretch the soc axis only; full-charge time is unchanged
};

/// Options for mapping a vrp-rep EVRP-NL file onto SEVRP-T parameters.
struct ImportOptions {
    double q_max = 24.0;
    double threshold_fraction = 0.3;
    double goal_fraction = 0.8;
    std::optional<double> speed;            // overrides the file's speed_factor
    std::optional<double> consumption_rate; // overrides the file's consumption_rate
    CurveScaling curve_scaling = CurveScaling::SocAndTime;
};

Instance load_instance(std::istream& source, InstanceFormat format, const ImportOptions& options = {});

/// Picks the format from the extension: `.xml` is a benchmark import, anything else canonical.
Instance load_instance_file(const std::filesystem::path& path, const ImportOptions& options = {});

/// Canonical text form; reloading it reproduces the instance exactly.
std::string to_canonical(const Instance& instance);
void save_instance(std::ostream& out, const Instance& instance);

} // namespace sevrp
