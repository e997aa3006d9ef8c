#include "sevrp/run.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sevrp {

namespace {

std::string normalize_key(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return "";
    }
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) {
            return d;
        }
    }
    catch (const std::exception&) {
    }
    throw ConfigError("setting '" + key + "' expects a number, got '" + v + "'");
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v)
{
    if (!v.empty() && std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        try {
            return std::stoull(v);
        }
        catch (const std::exception&) {
        }
    }
    throw ConfigError("setting '" + key + "' expects a non-negative integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw ConfigError("setting '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) {
        part = trim(part);
        if (!part.empty()) {
            out.push_back(part);
        }
    }
    return out;
}

std::string fixed6(double v) { return format_number(v, 6); }

} // namespace

void RunConfig::check() const
{
    auto in_unit = [](const std::optional<double>& f) { return !f || (*f > 0.0 && *f < 1.0); };
    if (!in_unit(threshold_fraction) || !in_unit(goal_fraction)) {
        throw std::invalid_argument("charging fractions must lie strictly between 0 and 1");
    }
    if (threshold_fraction && goal_fraction && !(*threshold_fraction < *goal_fraction)) {
        throw std::invalid_argument("threshold fraction must be below the goal fraction");
    }
    if (scenario_count < 1) {
        throw std::invalid_argument("scenario count must be at least 1");
    }
    if (reduce_to && (*reduce_to < 1 || *reduce_to > scenario_count)) {
        throw std::invalid_argument("reduce-to must lie in [1, scenario count]");
    }
    if (i_max < 1) {
        throw std::invalid_argument("i-max must be at least 1");
    }
}

const std::vector<std::string>& setting_keys()
{
    static const std::vector<std::string> keys{
        "instance",      "scenario-file", "distribution", "scenarios",        "reduce-to",   "symmetric",
        "seed",          "threshold",     "goal",         "q-max",            "speed",       "i-max",
        "gamma",         "time-limit",    "sp-time-limit", "use-ndcs",        "use-filters", "first-improvement",
        "vnd-order",
    };
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value)
{
    const std::string key = normalize_key(trim(raw_key));
    const std::string v = trim(raw_value);
    if (key == "instance") {
        cfg.instance = v;
    }
    else if (key == "scenario-file") {
        cfg.scenario_file = v;
    }
    else if (key == "distribution") {
        try {
            cfg.distribution = distribution_from_string(v);
        }
        catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    else if (key == "scenarios") {
        cfg.scenario_count = to_unsigned(key, v);
    }
    else if (key == "reduce-to") {
        cfg.reduce_to = to_unsigned(key, v);
    }
    else if (key == "symmetric") {
        cfg.symmetric = to_bool(key, v);
    }
    else if (key == "seed") {
        cfg.seed = to_unsigned(key, v);
    }
    else if (key == "threshold") {
        cfg.threshold_fraction = to_double(key, v);
    }
    else if (key == "goal") {
        cfg.goal_fraction = to_double(key, v);
    }
    else if (key == "q-max") {
        cfg.q_max = to_double(key, v);
    }
    else if (key == "speed") {
        cfg.speed = to_double(key, v);
    }
    else if (key == "i-max") {
        cfg.i_max = static_cast<int>(to_unsigned(key, v));
    }
    else if (key == "gamma") {
        cfg.gamma = to_double(key, v);
    }
    else if (key == "time-limit") {
        cfg.time_limit = to_double(key, v);
    }
    else if (key == "sp-time-limit") {
        cfg.sp_time_limit = to_double(key, v);
    }
    else if (key == "use-ndcs") {
        cfg.use_ndcs = to_bool(key, v);
    }
    else if (key == "use-filters") {
        cfg.use_filters = to_bool(key, v);
    }
    else if (key == "first-improvement") {
        cfg.first_improvement = to_bool(key, v);
    }
    else if (key == "vnd-order") {
        std::vector<Neighborhood> order;
        try {
            for (const auto& name : split(v, ',')) {
                order.push_back(neighborhood_from_string(name));
            }
        }
        catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (order.empty()) {
            throw ConfigError("vnd-order lists no neighborhood");
        }
        cfg.vnd_order = std::move(order);
    }
    else {
        throw ConfigError("unknown setting '" + raw_key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> read_settings(std::istream& in)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
        }
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& stream)
{
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a
    for (unsigned char c : stream) {
        h = (h ^ c) * 1099511628211ULL;
    }
    std::uint64_t z = master ^ h; // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::filesystem::path resolve_instance_path(const std::filesystem::path& p)
{
    if (p.empty() || std::filesystem::exists(p) || p.is_absolute()) {
        return p;
    }
    if (const char* dir = std::getenv("SEVRP_INSTANCE_DIR"); dir != nullptr && *dir != '\0') {
        const auto candidate = std::filesystem::path(dir) / p;
        if (std::filesystem::exists(candidate)) {
            return candidate;
        }
    }
    return p;
}

Instance load_configured_instance(const RunConfig& cfg)
{
    cfg.check();
    if (cfg.instance.empty()) {
        throw ConfigError("no instance given");
    }
    const auto path = resolve_instance_path(cfg.instance);
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("instance file not found: " + cfg.instance.string());
    }
    ImportOptions opt;
    opt.q_max = cfg.q_max;
    opt.threshold_fraction = cfg.threshold_fraction.value_or(opt.threshold_fraction);
    opt.goal_fraction = cfg.goal_fraction.value_or(opt.goal_fraction);
    opt.speed = cfg.speed;
    Instance inst = load_instance_file(path, opt);
    if (cfg.threshold_fraction || cfg.goal_fraction) {
        PolicyParams p = inst.params();
        if (cfg.threshold_fraction) {
            p.q_threshold = *cfg.threshold_fraction * p.q_max;
        }
        if (cfg.goal_fraction) {
            p.q_goal = *cfg.goal_fraction * p.q_max;
        }
        inst = inst.with_params(p);
    }
    return inst;
}

ScenarioSet configured_scenarios(const RunConfig& cfg, const Instance& inst)
{
    ScenarioSet set;
    if (cfg.scenario_file) {
        std::ifstream in(*cfg.scenario_file);
        if (!in) {
            throw std::runtime_error("cannot open scenario file " + cfg.scenario_file->string());
        }
        set = load_scenarios(in);
        if (!set.scenarios.empty() && set.scenarios.front().n != inst.size()) {
            throw std::runtime_error("scenario file does not match the instance size");
        }
    }
    else {
        set = generate_scenarios(
            inst, {cfg.distribution, cfg.scenario_count, derive_seed(cfg.seed, "scenario-gen"), cfg.symmetric});
    }
    if (cfg.reduce_to && *cfg.reduce_to < set.size()) {
        set = reduce_ffs(set, *cfg.reduce_to).reduced;
    }
    return set;
}

SearchParams configured_search(const RunConfig& cfg)
{
    SearchParams p;
    p.i_max = cfg.i_max;
    p.gamma = cfg.gamma;
    p.time_limit = cfg.time_limit;
    p.use_ndcs = cfg.use_ndcs;
    p.use_filters = cfg.use_filters;
    p.first_improvement = cfg.first_improvement;
    p.order = cfg.vnd_order;
    p.seed = derive_seed(cfg.seed, "perturbation");
    return p;
}

SolveReport run_solve(const RunConfig& cfg, const Instance& inst, const ScenarioSet& set, std::ostream* log)
{
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.instance = inst.name();
    rep.scenarios = set.size();
    std::function<void(const IlsProgress&)> progress;
    if (log != nullptr) {
        progress = [&](const IlsProgress& p) {
            *log << "iteration=" << p.iteration << " incumbent=" << fixed6(p.incumbent) << " pool=" << p.pool_size
                 << " elapsed=" << format_number(p.elapsed, 3) << "\n";
        };
    }
    rep.result = ils_sp(inst, set, configured_search(cfg), cfg.sp_time_limit, progress);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (log != nullptr) {
        *log << "done instance=" << rep.instance << " objective=" << fixed6(rep.result.objective())
             << " sp_proven=" << (rep.result.sp_proven ? "true" : "false")
             << " wall_time=" << format_number(rep.wall_time, 3) << "\n";
    }
    return rep;
}

SolveReport run_solve(const RunConfig& cfg, std::ostream* log)
{
    const auto inst = load_configured_instance(cfg);
    const auto set = configured_scenarios(cfg, inst);
    return run_solve(cfg, inst, set, log);
}

void write_summary_header(std::ostream& out)
{
    out << "instance,scenarios,objective,routes,ils_objective,iterations,pool_size,sp_proven\n";
}

void write_summary_row(std::ostream& out, const SolveReport& r)
{
    out << r.instance << ',' << r.scenarios << ',' << fixed6(r.result.objective()) << ','
        << r.result.solution.routes.size() << ',' << fixed6(r.result.ils_objective) << ',' << r.result.iterations
        << ',' << r.result.pool_size << ',' << (r.result.sp_proven ? "true" : "false") << '\n';
}

void write_solution(std::ostream& out, const Instance& inst, const ScenarioSet& set, const SolveReport& r,
                    bool use_ndcs)
{
    using nlohmann::json;
    const NdcsTable ndcs = use_ndcs ? precompute_ndcs(inst) : NdcsTable{};
    json doc;
    doc["instance"] = r.instance;
    doc["scenarios"] = r.scenarios;
    doc["objective"] = r.result.objective();
    json routes = json::array();
    for (const auto& route : r.result.solution.routes) {
        EvalOptions opt;
        opt.ndcs = use_ndcs ? &ndcs : nullptr;
        opt.record_traces = true;
        std::stringstream buf;
        write_evaluation(buf, route, evaluate_route(route, inst, set, opt));
        routes.push_back(json::parse(buf));
    }
    doc["routes"] = std::move(routes);
    out << doc.dump(2) << "\n";
}

SweepAxis sweep_axis_from_string(const std::string& text)
{
    const auto t = normalize_key(text);
    if (t == "q-threshold" || t == "threshold") {
        return SweepAxis::QThreshold;
    }
    if (t == "q-goal" || t == "goal") {
        return SweepAxis::QGoal;
    }
    if (t == "scenario-count" || t == "scenarios") {
        return SweepAxis::ScenarioCount;
    }
    throw std::invalid_argument("unknown sweep axis '" + text + "'");
}

std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::QThreshold:
        return "q_threshold";
    case SweepAxis::QGoal:
        return "q_goal";
    case SweepAxis::ScenarioCount:
        return "scenario_count";
    }
    return "?";
}

std::vector<SweepCell> run_sweep(const RunConfig& base, const std::vector<std::filesystem::path>& instances,
                                 SweepAxis axis, const std::vector<double>& values, std::ostream* log)
{
    std::vector<SweepCell> cells;
    for (double v : values) {
        for (const auto& path : instances) {
            SweepCell cell;
            cell.instance = path.stem().string();
            cell.value = v;
            RunConfig cfg = base;
            cfg.instance = path;
            try {
                switch (axis) {
                case SweepAxis::QThreshold:
                    cfg.threshold_fraction = v;
                    break;
                case SweepAxis::QGoal:
                    cfg.goal_fraction = v;
                    break;
                case SweepAxis::ScenarioCount:
                    if (!(v >= 1.0) || v != std::floor(v)) {
                        throw std::invalid_argument("scenario count must be a positive integer");
                    }
                    cfg.scenario_count = static_cast<std::size_t>(v);
                    if (cfg.reduce_to && *cfg.reduce_to > cfg.scenario_count) {
                        cfg.reduce_to.reset();
                    }
                    break;
                }
                const auto rep = run_solve(cfg, log);
                cell.instance = rep.instance;
                cell.status = "ok";
                cell.objective = rep.result.objective();
                cell.routes = rep.result.solution.routes.size();
            }
            catch (const UnservableCustomer& e) {
                cell.status = "infeasible";
                cell.message = e.what();
            }
            catch (const std::exception& e) {
                cell.status = "error";
                cell.message = e.what();
            }
            if (log != nullptr && cell.status != "ok") {
                *log << "cell instance=" << cell.instance << " value=" << v << " status=" << cell.status << " ("
                     << cell.message << ")\n";
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_sweep(std::ostream& out, SweepAxis axis, const std::vector<SweepCell>& cells)
{
    out << "axis,value,instance,status,objective,routes\n";
    for (const auto& c : cells) {
        out << to_string(axis) << ',' << format_number(c.value, 4) << ',' << c.instance << ',' << c.status << ','
            << fixed6(c.objective) << ',' << c.routes << '\n';
    }
}

void write_inspection(std::ostream& out, const ScenarioSet& set)
{
    out << "i,j,mean,std,min,max\n";
    if (set.scenarios.empty()) {
        return;
    }
    const auto n = static_cast<NodeId>(set.scenarios.front().n);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            double mean = 0.0, lo = kInfeasible, hi = -kInfeasible;
            for (std::size_t s = 0; s < set.size(); ++s) {
                const double e = set.scenarios[s](i, j);
                mean += set.probabilities[s] * e;
                lo = std::min(lo, e);
                hi = std::max(hi, e);
            }
            double var = 0.0;
            for (std::size_t s = 0; s < set.size(); ++s) {
                const double d = set.scenarios[s](i, j) - mean;
                var += set.probabilities[s] * d * d;
            }
            out << i << ',' << j << ',' << fixed6(mean) << ',' << fixed6(std::sqrt(var)) << ',' << fixed6(lo) << ','
                << fixed6(hi) << '\n';
        }
    }
}

} // namespace sevrp
