#include "sevrp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace sevrp {

std::string to_string(NodeKind kind)
{
    switch (kind) {
    case NodeKind::Depot:
        return "depot";
    case NodeKind::Customer:
        return "customer";
    case NodeKind::Station:
        return "station";
    }
    return "unknown";
}

NodeKind node_kind_from_string(const std::string& text)
{
    if (text == "depot") {
        return NodeKind::Depot;
    }
    if (text == "customer") {
        return NodeKind::Customer;
    }
    if (text == "station") {
        return NodeKind::Station;
    }
    throw InstanceError("unknown node kind '" + text + "'");
}

namespace {

std::string node_label(const Node& n) { return "node " + std::to_string(n.id); }

void check_params(const PolicyParams& p, std::vector<Diagnostic>& out)
{
    auto add = [&](std::string inv, std::string detail) {
        out.push_back({std::move(inv), "params", std::move(detail)});
    };
    if (!(p.q_threshold >= 0.0 && p.q_threshold < p.q_goal && p.q_goal < p.q_max)) {
        std::ostringstream msg;
        msg << "need 0 <= q_threshold < q_goal < q_max, got " << p.q_threshold << ", " << p.q_goal << ", "
            << p.q_max;
        add("parameter-ordering", msg.str());
    }
    if (!(p.consumption_rate > 0.0)) {
        add("positive-consumption-rate", "consumption_rate must be > 0");
    }
    if (!(p.speed > 0.0)) {
        add("positive-speed", "speed must be > 0");
    }
    if (!(p.gamma >= 1.0)) {
        add("gamma-at-least-one", "gamma must be >= 1");
    }
    if (p.i_max < 1) {
        add("i-max-positive", "i_max must be >= 1");
    }
}

} // namespace

std::vector<Diagnostic> validate(const InstanceData& data)
{
    std::vector<Diagnostic> out;

    std::set<NodeId> seen;
    int depots = 0;
    for (const auto& n : data.nodes) {
        if (!seen.insert(n.id).second) {
            out.push_back({"unique-id", node_label(n), "duplicate node id"});
        }
        if (!std::isfinite(n.x) || !std::isfinite(n.y)) {
            out.push_back({"finite-coordinates", node_label(n), "coordinates must be finite"});
        }
        if (n.kind == NodeKind::Depot) {
            ++depots;
            if (n.id != 0) {
                out.push_back({"depot", node_label(n), "the depot must have id 0"});
            }
        }
        if (n.kind == NodeKind::Station && !data.charging_functions.contains(n.technology)) {
            out.push_back({"known-technology", node_label(n), "unknown technology '" + n.technology + "'"});
        }
    }
    if (depots != 1) {
        out.push_back({"depot", "nodes", "expected exactly one depot, found " + std::to_string(depots)});
    }
    if (!seen.empty() && (*seen.begin() != 0 || *seen.rbegin() != static_cast<NodeId>(seen.size()) - 1)) {
        out.push_back({"contiguous-ids", "nodes", "node ids must be 0..N-1"});
    }

    for (const auto& [tech, cf] : data.charging_functions) {
        for (auto& msg : curve_diagnostics(cf, data.params.q_max)) {
            const bool concavity = msg.find("concave") != std::string::npos;
            out.push_back({concavity ? "concavity" : "charging-function", "technology " + tech, std::move(msg)});
        }
    }

    check_params(data.params, out);
    return out;
}

InstanceError::InstanceError(const std::string& what, std::vector<Diagnostic> diagnostics)
    : std::runtime_error(what), diagnostics_(std::move(diagnostics))
{
}

Instance::Instance(InstanceData data) : data_(std::move(data))
{
    if (auto diags = validate(data_); !diags.empty()) {
        std::ostringstream msg;
        msg << "invalid instance '" << data_.name << "':";
        for (const auto& d : diags) {
            msg << "\n  [" << d.invariant << "] " << d.entity << ": " << d.detail;
        }
        throw InstanceError(msg.str(), std::move(diags));
    }

    std::sort(data_.nodes.begin(), data_.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    const std::size_t n = data_.nodes.size();
    for (const auto& node : data_.nodes) {
        if (node.kind == NodeKind::Customer) {
            customers_.push_back(node.id);
        }
        else if (node.kind == NodeKind::Station) {
            stations_.push_back(node.id);
        }
    }

    const auto& p = data_.params;
    distance_.resize(n * n);
    travel_time_.resize(n * n);
    nominal_energy_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = i == j ? 0.0
                                    : std::hypot(data_.nodes[i].x - data_.nodes[j].x,
                                                 data_.nodes[i].y - data_.nodes[j].y);
            distance_[i * n + j] = d;
            travel_time_[i * n + j] = d / p.speed;
            nominal_energy_[i * n + j] = p.consumption_rate * d;
        }
    }

    curve_of_.assign(n, nullptr);
    for (NodeId k : stations_) {
        curve_of_[static_cast<std::size_t>(k)] = &data_.charging_functions.at(node(k).technology);
    }

    nearest_station_.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (NodeId k : stations_) {
            nearest_station_[i] = std::min(nearest_station_[i], distance_[i * n + static_cast<std::size_t>(k)]);
        }
    }

    fastest_time_per_kwh_ = std::numeric_limits<double>::infinity();
    for (const auto& [tech, cf] : data_.charging_functions) {
        fastest_time_per_kwh_ = std::min(fastest_time_per_kwh_, cf.min_time_per_kwh());
    }
}

bool Instance::is_customer(NodeId id) const
{
    return id > 0 && static_cast<std::size_t>(id) < size() && node(id).kind == NodeKind::Customer;
}

const ChargingFunction& Instance::curve_at(NodeId station) const
{
    const auto* cf = curve_of_.at(static_cast<std::size_t>(station));
    if (cf == nullptr) {
        throw std::invalid_argument("node " + std::to_string(station) + " is not a charging station");
    }
    return *cf;
}

Instance Instance::with_params(const PolicyParams& params) const
{
    InstanceData copy = data_;
    copy.params = params;
    return Instance(std::move(copy));
}

} // namespace sevrp
