// sevrp: command-line front end for the threshold-policy EVRP toolkit.

#include "sevrp/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>

using namespace sevrp;

namespace {

using Settings = std::vector<std::pair<std::string, std::string>>;

struct Common {
    Settings flags;
    std::string config_file;
};

const std::map<std::string, std::string>& setting_help()
{
    static const std::map<std::string, std::string> help{
        {"instance", "instance file (.json canonical, .xml benchmark); relative paths also tried under "
                     "$SEVRP_INSTANCE_DIR"},
        {"scenario-file", "read scenarios from a file instead of generating them"},
        {"distribution", "uniform | truncated-normal | truncated-exponential"},
        {"scenarios", "number of generated scenarios (1 = nominal consumption)"},
        {"reduce-to", "reduce the scenario set to this many by forward selection"},
        {"symmetric", "mirror e_ij onto e_ji when generating"},
        {"seed", "master seed"},
        {"threshold", "Q^T as a fraction of Q^max"},
        {"goal", "Q^G as a fraction of Q^max"},
        {"q-max", "battery capacity used when importing benchmark files"},
        {"speed", "override vehicle speed"},
        {"i-max", "ILS iterations"},
        {"gamma", "first-stage filter factor"},
        {"time-limit", "ILS wall-clock limit in seconds"},
        {"sp-time-limit", "set-partitioning time limit in seconds"},
        {"use-ndcs", "restrict detours to non-dominated stations"},
        {"use-filters", "screen moves before full evaluation"},
        {"first-improvement", "take the first improving move instead of the best"},
        {"vnd-order", "comma-separated neighborhood names"},
    };
    return help;
}

void add_settings(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_file, "key = value settings file; flags override it");
    for (const auto& key : setting_keys()) {
        cmd->add_option_function<std::string>(
            "--" + key, [&c, key](const std::string& v) { c.flags.emplace_back(key, v); }, setting_help().at(key));
    }
}

RunConfig build_config(const Common& c)
{
    RunConfig cfg;
    if (!c.config_file.empty()) {
        std::ifstream in(c.config_file);
        if (!in) {
            throw std::runtime_error("cannot open config file " + c.config_file);
        }
        for (const auto& [k, v] : read_settings(in)) {
            apply_setting(cfg, k, v);
        }
    }
    for (const auto& [k, v] : c.flags) {
        apply_setting(cfg, k, v);
    }
    cfg.check();
    return cfg;
}

// "-" or empty means stdout.
std::unique_ptr<std::ostream, void (*)(std::ostream*)> open_out(const std::string& path)
{
    if (path.empty() || path == "-") {
        return {&std::cout, [](std::ostream*) {}};
    }
    auto* f = new std::ofstream(path);
    if (!*f) {
        delete f;
        throw std::runtime_error("cannot write " + path);
    }
    return {f, [](std::ostream* p) { delete p; }};
}

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        out.push_back(std::stod(part));
    }
    if (out.empty()) {
        throw std::invalid_argument("no sweep values given");
    }
    return out;
}

Route parse_route(const std::string& text)
{
    Route r;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        r.push_back(std::stoi(part));
    }
    return r;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Electric vehicle routing under uncertain consumption with a threshold recharge policy"};
    app.require_subcommand(1);

    // solve
    Common solve_c;
    std::string summary_path, solution_path, log_path;
    bool quiet = false;
    auto* solve = app.add_subcommand("solve", "run ILS with set partitioning on one instance");
    add_settings(solve, solve_c);
    solve->add_option("--summary", summary_path, "summary CSV (default stdout)");
    solve->add_option("--solution", solution_path, "solution JSON with per-scenario traces");
    solve->add_option("--log", log_path, "progress log (default stderr)");
    solve->add_flag("--quiet", quiet, "no progress log");

    // scenarios
    auto* scen = app.add_subcommand("scenarios", "generate, reduce or inspect scenario files");
    scen->require_subcommand(1);
    Common gen_c;
    std::string gen_out;
    auto* gen = scen->add_subcommand("generate", "sample consumption scenarios for an instance");
    add_settings(gen, gen_c);
    gen->add_option("--out", gen_out, "scenario file")->required();
    std::string red_in, red_out;
    std::size_t red_to = 0;
    auto* red = scen->add_subcommand("reduce", "fast forward selection down to m scenarios");
    red->add_option("--in", red_in, "scenario file")->required();
    red->add_option("--to", red_to, "number of kept scenarios")->required();
    red->add_option("--out", red_out, "reduced scenario file");
    std::string insp_in;
    auto* insp = scen->add_subcommand("inspect", "per-arc moments as CSV");
    insp->add_option("--in", insp_in, "scenario file")->required();

    // measures
    Common meas_c;
    std::string meas_out;
    auto* meas = app.add_subcommand("measures", "RP, WS, EVPI, EVP, EEV and VSS");
    add_settings(meas, meas_c);
    meas->add_option("--out", meas_out, "CSV output (default stdout)");

    // sweep
    Common sweep_c;
    std::string axis_text, values_text, sweep_out;
    std::vector<std::string> sweep_instances;
    auto* sweep = app.add_subcommand("sweep", "one solve per parameter value and instance");
    add_settings(sweep, sweep_c);
    sweep->add_option("--axis", axis_text, "q_threshold | q_goal | scenario_count")->required();
    sweep->add_option("--values", values_text, "comma-separated values (fractions or counts)")->required();
    sweep->add_option("--instances", sweep_instances, "instance files (default: --instance)");
    sweep->add_option("--out", sweep_out, "CSV output (default stdout)");

    // evaluate-route
    Common eval_c;
    std::string route_text, trace_path;
    auto* evalr = app.add_subcommand("evaluate-route", "expected duration of one fixed customer sequence");
    add_settings(evalr, eval_c);
    evalr->add_option("--route", route_text, "customer ids, comma-separated")->required();
    evalr->add_option("--trace", trace_path, "write per-scenario traces as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            const auto cfg = build_config(solve_c);
            const auto inst = load_configured_instance(cfg);
            const auto set = configured_scenarios(cfg, inst);
            std::unique_ptr<std::ofstream> log_file;
            std::ostream* log = quiet ? nullptr : &std::cerr;
            if (!log_path.empty()) {
                log_file = std::make_unique<std::ofstream>(log_path);
                log = log_file.get();
            }
            const auto rep = run_solve(cfg, inst, set, log);
            auto out = open_out(summary_path);
            write_summary_header(*out);
            write_summary_row(*out, rep);
            if (!solution_path.empty()) {
                auto sol = open_out(solution_path);
                write_solution(*sol, inst, set, rep, cfg.use_ndcs);
            }
        }
        else if (gen->parsed()) {
            const auto cfg = build_config(gen_c);
            const auto inst = load_configured_instance(cfg);
            auto out = open_out(gen_out);
            save_scenarios(*out, configured_scenarios(cfg, inst));
        }
        else if (red->parsed()) {
            std::ifstream in(red_in);
            if (!in) {
                throw std::runtime_error("cannot open scenario file " + red_in);
            }
            const auto set = load_scenarios(in);
            const auto r = reduce_ffs(set, red_to);
            nlohmann::json doc;
            doc["kept_indices"] = r.kept_indices;
            doc["probabilities"] = r.reduced.probabilities;
            doc["transport_distance"] = r.transport_distance;
            std::cout << doc.dump(2) << "\n";
            if (!red_out.empty()) {
                auto out = open_out(red_out);
                save_scenarios(*out, r.reduced);
            }
        }
        else if (insp->parsed()) {
            std::ifstream in(insp_in);
            if (!in) {
                throw std::runtime_error("cannot open scenario file " + insp_in);
            }
            write_inspection(std::cout, load_scenarios(in));
        }
        else if (meas->parsed()) {
            const auto cfg = build_config(meas_c);
            const auto inst = load_configured_instance(cfg);
            const auto set = configured_scenarios(cfg, inst);
            const auto report = compute_measures(inst, set, configured_search(cfg), cfg.sp_time_limit);
            for (const auto& w : report.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            auto out = open_out(meas_out);
            write_measures_header(*out);
            write_measures_row(*out, inst.name(), report);
        }
        else if (sweep->parsed()) {
            RunConfig cfg = build_config(sweep_c);
            std::vector<std::filesystem::path> paths(sweep_instances.begin(), sweep_instances.end());
            if (paths.empty()) {
                if (cfg.instance.empty()) {
                    throw std::invalid_argument("sweep needs --instances or --instance");
                }
                paths.push_back(cfg.instance);
            }
            const auto axis = sweep_axis_from_string(axis_text);
            const auto cells = run_sweep(cfg, paths, axis, parse_values(values_text), &std::cerr);
            auto out = open_out(sweep_out);
            write_sweep(*out, axis, cells);
            const bool all_ran =
                std::none_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.status == "error"; });
            return all_ran ? 0 : 1;
        }
        else if (evalr->parsed()) {
            const auto cfg = build_config(eval_c);
            const auto inst = load_configured_instance(cfg);
            const auto set = configured_scenarios(cfg, inst);
            const Route route = parse_route(route_text);
            check_route(inst, route);
            const NdcsTable ndcs = cfg.use_ndcs ? precompute_ndcs(inst) : NdcsTable{};
            EvalOptions opt;
            opt.ndcs = cfg.use_ndcs ? &ndcs : nullptr;
            opt.record_traces = !trace_path.empty();
            const auto ev = evaluate_route(route, inst, set, opt);
            std::cout << "expected_duration=" << format_number(ev.expected_duration, 6) << "\n";
            if (!trace_path.empty()) {
                auto out = open_out(trace_path);
                write_evaluation(*out, route, ev);
            }
        }
    }
    catch (const InstanceError& e) {
        std::cerr << "sevrp: error: " << e.what() << "\n";
        for (const auto& d : e.diagnostics()) {
            std::cerr << "  [" << d.invariant << "] " << d.entity << ": " << d.detail << "\n";
        }
        return 1;
    }
    catch (const std::exception& e) {
        std::cerr << "sevrp: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
