#include "sevrp/instance.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace sevrp {

namespace {

using nlohmann::json;

template <typename T>
void read_opt(const json& obj, const char* key, T& out)
{
    if (auto it = obj.find(key); it != obj.end()) {
        out = it->get<T>();
    }
}

PolicyParams params_from_json(const json& j)
{
    PolicyParams p;
    read_opt(j, "q_max", p.q_max);
    read_opt(j, "q_threshold", p.q_threshold);
    read_opt(j, "q_goal", p.q_goal);
    read_opt(j, "consumption_rate", p.consumption_rate);
    read_opt(j, "speed", p.speed);
    read_opt(j, "gamma", p.gamma);
    read_opt(j, "i_max", p.i_max);
    read_opt(j, "seed", p.seed);
    read_opt(j, "use_ndcs", p.use_ndcs);
    read_opt(j, "sp_time_limit", p.sp_time_limit);
    return p;
}

json params_to_json(const PolicyParams& p)
{
    return json{{"q_max", p.q_max},
                {"q_threshold", p.q_threshold},
                {"q_goal", p.q_goal},
                {"consumption_rate", p.consumption_rate},
                {"speed", p.speed},
                {"gamma", p.gamma},
                {"i_max", p.i_max},
                {"seed", p.seed},
                {"use_ndcs", p.use_ndcs},
                {"sp_time_limit", p.sp_time_limit}};
}

Instance load_canonical(std::istream& source)
{
    json doc;
    try {
        doc = json::parse(source);
    }
    catch (const json::parse_error& e) {
        throw InstanceError(std::string("malformed instance file: ") + e.what());
    }

    try {
        InstanceData data;
        read_opt(doc, "name", data.name);
        if (doc.contains("params")) {
            data.params = params_from_json(doc.at("params"));
        }
        for (const auto& n : doc.at("nodes")) {
            Node node;
            node.id = n.at("id").get<int>();
            node.kind = node_kind_from_string(n.at("kind").get<std::string>());
            node.x = n.at("x").get<double>();
            node.y = n.at("y").get<double>();
            read_opt(n, "technology", node.technology);
            data.nodes.push_back(std::move(node));
        }
        for (const auto& [tech, pairs] : doc.at("charging_functions").items()) {
            std::vector<Breakpoint> bps;
            for (const auto& pair : pairs) {
                if (!pair.is_array() || pair.size() != 2) {
                    throw InstanceError("charging function '" + tech + "': breakpoints must be [c, a] pairs");
                }
                bps.push_back({pair[0].get<double>(), pair[1].get<double>()});
            }
            data.charging_functions.emplace(tech, ChargingFunction(std::move(bps)));
        }
        return Instance(std::move(data));
    }
    catch (const json::exception& e) {
        throw InstanceError(std::string("malformed instance file: ") + e.what());
    }
    catch (const std::invalid_argument& e) {
        throw InstanceError(std::string("malformed instance file: ") + e.what());
    }
}

// vrp-rep EVRP-NL grammar (see docs/benchmark-format.md).
Instance load_benchmark(std::istream& source, const ImportOptions& opt)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_xml(source, tree, pt::xml_parser::trim_whitespace);
    }
    catch (const pt::xml_parser_error& e) {
        throw InstanceError(std::string("malformed benchmark file: ") + e.what());
    }

    try {
        const auto& root = tree.get_child("instance");
        InstanceData data;
        data.name = root.get<std::string>("info.name", "");

        for (const auto& [tag, node] : root.get_child("network.nodes")) {
            if (tag != "node") {
                continue;
            }
            Node n;
            n.id = node.get<int>("<xmlattr>.id");
            const int type = node.get<int>("<xmlattr>.type");
            switch (type) {
            case 0:
                n.kind = NodeKind::Depot;
                break;
            case 1:
                n.kind = NodeKind::Customer;
                break;
            case 2:
                n.kind = NodeKind::Station;
                n.technology = node.get<std::string>("custom.cs_type");
                break;
            default:
                throw InstanceError("node " + std::to_string(n.id) + ": unknown type " + std::to_string(type));
            }
            n.x = node.get<double>("cx");
            n.y = node.get<double>("cy");
            data.nodes.push_back(std::move(n));
        }

        const auto& vehicle = root.get_child("fleet.vehicle_profile");
        const double capacity = vehicle.get<double>("custom.battery_capacity");
        if (!(capacity > 0.0)) {
            throw InstanceError("battery_capacity must be > 0");
        }
        const double soc_scale = opt.q_max / capacity;
        const double time_scale = opt.curve_scaling == CurveScaling::SocAndTime ? soc_scale : 1.0;

        for (const auto& [tag, fn] : vehicle.get_child("custom.charging_functions")) {
            if (tag != "function") {
                continue;
            }
            std::vector<Breakpoint> bps;
            for (const auto& [btag, bp] : fn) {
                if (btag != "breakpoint") {
                    continue;
                }
                bps.push_back({bp.get<double>("charging_time") * time_scale, bp.get<double>("battery_level") * soc_scale});
            }
            data.charging_functions.emplace(fn.get<std::string>("<xmlattr>.cs_type"), ChargingFunction(std::move(bps)));
        }

        auto& p = data.params;
        p.q_max = opt.q_max;
        p.q_threshold = opt.threshold_fraction * opt.q_max;
        p.q_goal = opt.goal_fraction * opt.q_max;
        p.speed = opt.speed ? *opt.speed : vehicle.get<double>("speed_factor");
        p.consumption_rate = opt.consumption_rate ? *opt.consumption_rate : vehicle.get<double>("custom.consumption_rate");
        return Instance(std::move(data));
    }
    catch (const pt::ptree_error& e) {
        throw InstanceError(std::string("malformed benchmark file: ") + e.what());
    }
    catch (const std::invalid_argument& e) {
        throw InstanceError(std::string("malformed benchmark file: ") + e.what());
    }
}

} // namespace

Instance load_instance(std::istream& source, InstanceFormat format, const ImportOptions& options)
{
    return format == InstanceFormat::Canonical ? load_canonical(source) : load_benchmark(source, options);
}

Instance load_instance_file(const std::filesystem::path& path, const ImportOptions& options)
{
    std::ifstream in(path);
    if (!in) {
        throw InstanceError("cannot open instance file " + path.string());
    }
    const auto format = path.extension() == ".xml" ? InstanceFormat::BenchmarkImport : InstanceFormat::Canonical;
    Instance inst = load_instance(in, format, options);
    if (inst.name().empty()) {
        InstanceData data = inst.data();
        data.name = path.stem().string();
        return Instance(std::move(data));
    }
    return inst;
}

std::string to_canonical(const Instance& instance)
{
    json doc;
    doc["name"] = instance.name();
    doc["params"] = params_to_json(instance.params());
    json nodes = json::array();
    for (const auto& n : instance.nodes()) {
        json jn{{"id", n.id}, {"kind", to_string(n.kind)}, {"x", n.x}, {"y", n.y}};
        if (n.kind == NodeKind::Station) {
            jn["technology"] = n.technology;
        }
        nodes.push_back(std::move(jn));
    }
    doc["nodes"] = std::move(nodes);
    json curves = json::object();
    for (const auto& [tech, cf] : instance.data().charging_functions) {
        json pairs = json::array();
        for (const auto& bp : cf.breakpoints()) {
            pairs.push_back({bp.time, bp.soc});
        }
        curves[tech] = std::move(pairs);
    }
    doc["charging_functions"] = std::move(curves);
    return doc.dump(2) + "\n";
}

void save_instance(std::ostream& out, const Instance& instance) { out << to_canonical(instance); }

} // namespace sevrp
