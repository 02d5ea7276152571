// hopdesign: run system optimizations, minimum-mass grids and optimizer
// self-tests from the command line.
//
// Exit codes: 0 success, 1 self-test failure, 2 configuration error,
// 3 runtime failure.

#include "hopdesign/cots.hpp"
#include "hopdesign/io.hpp"
#include "hopdesign/parameters.hpp"
#include "hopdesign/selftest.hpp"
#include "hopdesign/sysopt.hpp"
#include "hopdesign/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace hopdesign;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

struct CommonOptions {
    std::string inventory;
    std::string out;
    std::string params;
};

struct Input {
    std::string role;
    std::string path;
    std::string digest;
};

/// Reads a file and remembers its digest for the manifest.
std::string read_input(std::vector<Input>& inputs, const std::string& role, const std::string& path) {
    auto content = io::read_file(path, role);
    inputs.push_back({role, path, text::fnv1a64(content)});
    return content;
}

std::string resolve_inventory(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("HOPDESIGN_INVENTORY"); env && *env) return env;
    throw io::ConfigError("--inventory", "required (or set HOPDESIGN_INVENTORY)");
}

cots::Inventory load_inventory(std::vector<Input>& inputs, const std::string& path) {
    const auto content = read_input(inputs, "inventory", path);
    try {
        return cots::Inventory::parse(content, path);
    } catch (const cots::InventoryError& e) {
        throw io::ConfigError("inventory", e.what());
    }
}

ModelParameters load_params(std::vector<Input>& inputs, const std::string& path) {
    if (path.empty()) return {};
    const auto content = read_input(inputs, "params", path);
    try {
        return parse_parameters(content, {}, path);
    } catch (const ParameterError& e) {
        throw io::ConfigError("params", e.what());
    }
}

void prepare_out(const std::string& out) {
    if (out.empty()) throw io::ConfigError("--out", "required");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw io::ConfigError("--out", "cannot create directory '" + out + "': " + ec.message());
}

void write_manifest(const std::string& out, const std::string& command, const std::vector<Input>& inputs,
                    std::uint64_t seed, double wall_time, nlohmann::json extra) {
    nlohmann::json m;
    m["schema_version"] = io::manifest_schema_version;
    m["command"] = command;
    m["tool_version"] = HOPDESIGN_VERSION;
    m["seed"] = seed;
    m["wall_time_s"] = wall_time;
    m["created_utc"] = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
    nlohmann::json in = nlohmann::json::object();
    for (const auto& i : inputs) in[i.role] = {{"path", i.path}, {"fnv1a64", i.digest}};
    m["inputs"] = in;
    for (auto& [k, v] : extra.items()) m[k] = v;
    io::write_file((fs::path(out) / "manifest.json").string(), m.dump(2) + "\n");
}

int run_optimize(const CommonOptions& common, const std::string& mission_path, const std::string& bounds_path,
                 const std::string& weights_path, std::uint64_t seed, unsigned threads, std::size_t generations,
                 std::size_t population, const std::string& command_line) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Input> inputs;
    if (mission_path.empty()) throw io::ConfigError("--mission", "required");
    const auto inventory_path = resolve_inventory(common.inventory);
    prepare_out(common.out);

    const auto mission = io::parse_mission(read_input(inputs, "mission", mission_path), "mission");
    const auto inventory = load_inventory(inputs, inventory_path);
    const auto params = load_params(inputs, common.params);
    sysopt::RunSettings settings;
    settings.extra = mission.extra;
    if (!bounds_path.empty()) settings.bounds = io::parse_bounds(read_input(inputs, "bounds", bounds_path));
    if (!weights_path.empty()) settings.weights = io::parse_weights(read_input(inputs, "weights", weights_path));
    settings.ga.seed = seed;
    settings.ga.threads = threads;
    settings.ga.max_generations = generations;
    settings.ga.population_size = population;
    settings.ga.offspring_size = population;

    sysopt::ParetoFront front;
    try {
        front = sysopt::run_system_optimization(mission.mission, inventory, params, settings);
    } catch (const std::invalid_argument& e) {
        throw io::ConfigError("configuration", e.what());
    }

    io::write_file((fs::path(common.out) / "pareto_front.csv").string(), io::pareto_csv(front));
    io::write_file((fs::path(common.out) / "selection_history.csv").string(), io::history_csv(front.history));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::size_t feasible = 0;
    for (const auto& ind : front.members) feasible += ind.violation == 0.0;
    write_manifest(common.out, command_line, inputs, seed, wall,
                   {{"population_size", population},
                    {"generations", generations},
                    {"threads", threads},
                    {"front_size", front.members.size()},
                    {"front_feasible", feasible},
                    {"outputs",
                     {{"pareto_front.csv", io::pareto_schema_version},
                      {"selection_history.csv", io::history_schema_version}}}});
    std::cout << "front: " << front.members.size() << " members (" << feasible << " feasible), written to "
              << common.out << "\n";
    return exit_ok;
}

int run_compare(const CommonOptions& common, const std::string& grid_path, const std::string& command_line) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Input> inputs;
    if (grid_path.empty()) throw io::ConfigError("--grid", "required");
    const auto inventory_path = resolve_inventory(common.inventory);
    prepare_out(common.out);
    const auto grid = io::parse_grid(read_input(inputs, "grid", grid_path));
    const auto inventory = load_inventory(inputs, inventory_path);
    const auto params = load_params(inputs, common.params);
    try {
        disciplines::avionics_select(grid.setup.avionics, inventory);
    } catch (const std::out_of_range& e) {
        throw io::ConfigError("grid.avionics", e.what());
    }

    std::vector<io::CompareRow> rows;
    for (double d : grid.distances)
        for (double t : grid.durations)
            for (auto prop : {disciplines::Propellant::h2_o2, disciplines::Propellant::rp1_h2o2,
                              disciplines::Propellant::steam})
                for (auto pt : {disciplines::PowerType::battery, disciplines::PowerType::fuel_cell})
                    rows.push_back({d, t, prop, pt,
                                    sysopt::comparative_mass_min({prop, pt}, d, t, inventory, params, grid.setup)});
    io::write_file((fs::path(common.out) / "compare.csv").string(), io::compare_csv(rows));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(common.out, command_line, inputs, 0, wall,
                   {{"rows", rows.size()}, {"outputs", {{"compare.csv", io::compare_schema_version}}}});
    std::cout << "compare: " << rows.size() << " rows written to " << common.out << "\n";
    return exit_ok;
}

int run_validate(const std::string& suite) {
    const auto& all = selftest::suites();
    const auto it = all.find(suite);
    if (it == all.end()) {
        std::string names;
        for (const auto& [name, fn] : all) names += (names.empty() ? "" : ", ") + name;
        throw io::ConfigError("--suite", "unknown suite '" + suite + "'; available: " + names);
    }
    return selftest::report(it->second(), std::cout) ? exit_ok : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective design of small spherical hopping robots"};
    app.set_version_flag("--version", HOPDESIGN_VERSION);
    app.require_subcommand(1);

    std::string command_line;
    for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

    CommonOptions common;
    std::string mission, bounds, weights, grid, suite;
    std::uint64_t seed = 1;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::size_t generations = 100, population = 100;

    auto* opt = app.add_subcommand("optimize", "Pareto search over the 12-variable design space");
    opt->add_option("--mission", mission, "mission JSON file")->required();
    opt->add_option("--inventory", common.inventory, "COTS inventory CSV (default: $HOPDESIGN_INVENTORY)");
    opt->add_option("--out", common.out, "output directory")->required();
    opt->add_option("--params", common.params, "model parameter overrides");
    opt->add_option("--bounds", bounds, "bounds JSON file");
    opt->add_option("--weights", weights, "objective weights JSON file");
    opt->add_option("--seed", seed, "random seed")->capture_default_str();
    opt->add_option("--threads", threads, "evaluation worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    opt->add_option("--generations", generations, "number of generations")->capture_default_str()->check(CLI::PositiveNumber);
    opt->add_option("--population", population, "population size")->capture_default_str()->check(CLI::Range(2, 100000));

    auto* cmp = app.add_subcommand("compare", "minimum-mass grid over distance and duration");
    cmp->add_option("--grid", grid, "grid JSON file with distances_m and durations_hr")->required();
    cmp->add_option("--inventory", common.inventory, "COTS inventory CSV (default: $HOPDESIGN_INVENTORY)");
    cmp->add_option("--out", common.out, "output directory")->required();
    cmp->add_option("--params", common.params, "model parameter overrides");

    auto* val = app.add_subcommand("validate", "optimizer self-tests");
    val->add_option("--suite", suite, "sorting, sqp, zdt1 or schaffer")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*opt)
            return run_optimize(common, mission, bounds, weights, seed, threads, generations, population, command_line);
        if (*cmp) return run_compare(common, grid, command_line);
        if (*val) return run_validate(suite);
    } catch (const io::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        if (e.field().rfind("--", 0) == 0) std::cerr << "\n" << (*opt ? opt : *cmp ? cmp : val)->help();
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_config;
}
