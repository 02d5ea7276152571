#pragma once

// Configuration readers (mission, bounds, weights, comparative grid) and
// the CSV/JSON writers for run outputs. Readers raise ConfigError naming
// the offending field.
//
// Mission file:
//   {
//     "robot_count": 1,
//     "phases": [
//       {"distance_m": 1000, "duration_hr": 5,
//        "environment": {"preset": "moon/surface",       // optional base record
//                        "gravity": 1.62, "ambient_K": 340, "dose_rad_yr": 100,
//                        "soil": {"cohesion_pa": 170, "friction_angle_deg": 35, "sinkage_exponent": 1},
//                        "obstacle_height_m": 0.15, "sky_K": 3}}
//     ],
//     "extra_constraints": {"min_clock_mhz": 100, "min_storage_gb": 1, "min_battery_capacity_wh": 5}
//   }
// Without a preset, gravity, ambient_K and dose_rad_yr are required.

#include "disciplines.hpp"
#include "sysopt.hpp"
#include "text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopdesign::io {

using nlohmann::json;

inline constexpr const char* pareto_schema_version = "1";
inline constexpr const char* history_schema_version = "1";
inline constexpr const char* compare_schema_version = "1";
inline constexpr const char* manifest_schema_version = "1";

class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

inline std::string read_file(const std::string& path, const std::string& field = "file") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(field, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline json parse_json(const std::string& content, const std::string& field) {
    try {
        return json::parse(content);
    } catch (const json::parse_error& e) {
        throw ConfigError(field, std::string("invalid JSON: ") + e.what());
    }
}

namespace detail {

inline const json* member(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline double number(const json& obj, const std::string& key, const std::string& path) {
    const json* v = member(obj, key);
    if (!v) throw ConfigError(path + "." + key, "required field is missing");
    if (!v->is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v->get<double>();
}

inline double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
    return member(obj, key) ? number(obj, key, path) : fallback;
}

inline void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw ConfigError(path + "." + k, "unknown field");
    }
}

inline std::array<double, 2> pair(const json& obj, const std::string& key, const std::string& path,
                                  std::array<double, 2> fallback) {
    const json* v = member(obj, key);
    if (!v) return fallback;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
        throw ConfigError(path + "." + key, "expected [lower, upper]");
    return {(*v)[0].get<double>(), (*v)[1].get<double>()};
}

}  // namespace detail

inline disciplines::Environment parse_environment(const json& j, const std::string& path) {
    using detail::number;
    using detail::number_or;
    detail::only_keys(j, {"preset", "gravity", "ambient_K", "dose_rad_yr", "soil", "obstacle_height_m", "sky_K"}, path);
    disciplines::Environment env;
    const bool preset = detail::member(j, "preset") != nullptr;
    if (preset) {
        const auto& p = j.at("preset");
        if (!p.is_string()) throw ConfigError(path + ".preset", "expected \"body/setting\"");
        const auto name = p.get<std::string>();
        const auto slash = name.find('/');
        try {
            env = disciplines::environment_lookup(name.substr(0, slash),
                                                  slash == std::string::npos ? "" : name.substr(slash + 1));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ".preset", e.what());
        }
    }
    env.gravity = preset ? number_or(j, "gravity", path, env.gravity) : number(j, "gravity", path);
    env.ambient_temperature =
        preset ? number_or(j, "ambient_K", path, env.ambient_temperature) : number(j, "ambient_K", path);
    env.dose_rate = preset ? number_or(j, "dose_rad_yr", path, env.dose_rate) : number(j, "dose_rad_yr", path);
    env.obstacle_height = number_or(j, "obstacle_height_m", path, preset ? env.obstacle_height : 0.0);
    env.sky_temperature = number_or(j, "sky_K", path, preset ? env.sky_temperature : 3.0);
    if (const json* soil = detail::member(j, "soil")) {
        const auto sp = path + ".soil";
        detail::only_keys(*soil, {"cohesion_pa", "friction_angle_deg", "sinkage_exponent"}, sp);
        env.soil.cohesion = number_or(*soil, "cohesion_pa", sp, env.soil.cohesion);
        env.soil.friction_angle = number_or(*soil, "friction_angle_deg", sp, env.soil.friction_angle);
        env.soil.sinkage_exponent = number_or(*soil, "sinkage_exponent", sp, env.soil.sinkage_exponent);
    }
    try {
        env.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return env;
}

struct MissionConfig {
    disciplines::MissionSpec mission;
    sysopt::ExtraConstraints extra;
};

inline MissionConfig parse_mission(const std::string& content, const std::string& field = "mission") {
    const json j = parse_json(content, field);
    detail::only_keys(j, {"name", "description", "robot_count", "phases", "extra_constraints"}, field);
    MissionConfig cfg;
    if (const json* rc = detail::member(j, "robot_count")) {
        if (!rc->is_number_integer() || rc->get<long long>() < 1)
            throw ConfigError(field + ".robot_count", "expected a positive integer");
        cfg.mission.robot_count = static_cast<int>(rc->get<long long>());
    }
    const json* phases = detail::member(j, "phases");
    if (!phases || !phases->is_array() || phases->empty())
        throw ConfigError(field + ".phases", "expected a non-empty array");
    for (std::size_t i = 0; i < phases->size(); ++i) {
        const auto path = field + ".phases[" + std::to_string(i) + "]";
        const json& p = (*phases)[i];
        detail::only_keys(p, {"name", "distance_m", "duration_hr", "environment"}, path);
        disciplines::Phase ph;
        ph.distance = detail::number(p, "distance_m", path);
        ph.duration = detail::number(p, "duration_hr", path);
        if (!(ph.distance > 0.0)) throw ConfigError(path + ".distance_m", "must be positive");
        if (!(ph.duration > 0.0)) throw ConfigError(path + ".duration_hr", "must be positive");
        const json* env = detail::member(p, "environment");
        if (!env) throw ConfigError(path + ".environment", "required field is missing");
        ph.environment = parse_environment(*env, path + ".environment");
        cfg.mission.phases.push_back(ph);
    }
    if (const json* ex = detail::member(j, "extra_constraints")) {
        const auto path = field + ".extra_constraints";
        detail::only_keys(*ex, {"min_clock_mhz", "min_storage_gb", "min_battery_capacity_wh"}, path);
        if (detail::member(*ex, "min_clock_mhz")) cfg.extra.min_clock_mhz = detail::number(*ex, "min_clock_mhz", path);
        if (detail::member(*ex, "min_storage_gb"))
            cfg.extra.min_storage_gb = detail::number(*ex, "min_storage_gb", path);
        if (detail::member(*ex, "min_battery_capacity_wh"))
            cfg.extra.min_battery_capacity_wh = detail::number(*ex, "min_battery_capacity_wh", path);
    }
    return cfg;
}

/// {"mass_kg": [lo, hi], "radius_m": [lo, hi], "power_w": [lo, hi]}; missing pairs keep defaults.
inline sysopt::SystemBounds parse_bounds(const std::string& content, const std::string& field = "bounds") {
    const json j = parse_json(content, field);
    detail::only_keys(j, {"mass_kg", "radius_m", "power_w"}, field);
    sysopt::SystemBounds b;
    b.mass = detail::pair(j, "mass_kg", field, b.mass);
    b.radius = detail::pair(j, "radius_m", field, b.radius);
    b.power = detail::pair(j, "power_w", field, b.power);
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
    return b;
}

/// {"a1": .., "a2": .., "a3": .., "a4": ..}; missing weights keep defaults.
inline sysopt::ObjectiveWeights parse_weights(const std::string& content, const std::string& field = "weights") {
    const json j = parse_json(content, field);
    detail::only_keys(j, {"a1", "a2", "a3", "a4"}, field);
    sysopt::ObjectiveWeights w;
    w.a1 = detail::number_or(j, "a1", field, w.a1);
    w.a2 = detail::number_or(j, "a2", field, w.a2);
    w.a3 = detail::number_or(j, "a3", field, w.a3);
    w.a4 = detail::number_or(j, "a4", field, w.a4);
    try {
        w.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
    return w;
}

struct GridConfig {
    std::vector<double> distances;  // m
    std::vector<double> durations;  // hr
    sysopt::ComparativeSetup setup;
};

/// {"distances_m": [...], "durations_hr": [...], "environment": {...},
///  "avionics": {"c_ID": 1, ...}, "reserve": {"mass_kg": 1, "volume_m3": 1e-5, "power_w": 10}}
inline GridConfig parse_grid(const std::string& content, const std::string& field = "grid") {
    const json j = parse_json(content, field);
    detail::only_keys(j, {"distances_m", "durations_hr", "environment", "avionics", "reserve", "robot_count"}, field);
    GridConfig g;
    auto axis = [&](const char* key) {
        const json* v = detail::member(j, key);
        if (!v || !v->is_array() || v->empty()) throw ConfigError(field + "." + key, "expected a non-empty array");
        std::vector<double> out;
        for (const auto& e : *v) {
            if (!e.is_number() || !(e.get<double>() > 0.0))
                throw ConfigError(field + "." + key, "entries must be positive numbers");
            out.push_back(e.get<double>());
        }
        if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end())
            throw ConfigError(field + "." + key, "entries must be strictly increasing");
        return out;
    };
    g.distances = axis("distances_m");
    g.durations = axis("durations_hr");
    if (const json* env = detail::member(j, "environment")) g.setup.environment = parse_environment(*env, field + ".environment");
    if (const json* av = detail::member(j, "avionics")) {
        const auto path = field + ".avionics";
        detail::only_keys(*av, {"c_ID", "p_ID", "b_ID", "t_ID", "a_ID"}, path);
        auto id = [&](const char* key, int fallback) {
            const json* v = detail::member(*av, key);
            if (!v) return fallback;
            if (!v->is_number_integer() || v->get<long long>() < 1)
                throw ConfigError(path + "." + key, "expected a positive integer");
            return static_cast<int>(v->get<long long>());
        };
        g.setup.avionics = {id("c_ID", 1), id("p_ID", 1), id("b_ID", 1), id("t_ID", 1), id("a_ID", 1)};
    }
    if (const json* rs = detail::member(j, "reserve")) {
        const auto path = field + ".reserve";
        detail::only_keys(*rs, {"mass_kg", "volume_m3", "power_w"}, path);
        g.setup.reserve.mass = detail::number_or(*rs, "mass_kg", path, g.setup.reserve.mass);
        g.setup.reserve.volume = detail::number_or(*rs, "volume_m3", path, g.setup.reserve.volume);
        g.setup.reserve.power = detail::number_or(*rs, "power_w", path, g.setup.reserve.power);
    }
    if (const json* rc = detail::member(j, "robot_count")) {
        if (!rc->is_number_integer() || rc->get<long long>() < 1)
            throw ConfigError(field + ".robot_count", "expected a positive integer");
        g.setup.robot_count = static_cast<int>(rc->get<long long>());
    }
    return g;
}

// ---------------------------------------------------------------- CSV writers

inline std::vector<std::string> pareto_columns() {
    std::vector<std::string> cols{"m_kg",  "r_m",  "P_w",  "ms_ID", "sd_1", "sd_2", "ps_ID", "c_ID",
                                  "p_ID",  "b_ID", "t_ID", "a_ID",  "F1",   "F2",   "F3",    "F4",
                                  "omega"};
    for (const char* d : sysopt::discipline_names())
        for (const char* q : {"mass_kg", "volume_m3", "power_w"}) cols.push_back(std::string(d) + "_" + q);
    for (const char* q : {"payload_mass_kg", "payload_volume_m3", "payload_power_w"}) cols.push_back(q);
    return cols;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    return out + "\n";
}

/// One row per front member, in front order.
inline std::string pareto_csv(const sysopt::ParetoFront& front) {
    using text::format_double;
    std::string out = csv_row(pareto_columns());
    for (std::size_t i = 0; i < front.members.size(); ++i) {
        const auto& ind = front.members[i];
        const auto& rec = front.records[i];
        std::vector<std::string> cells;
        for (double v : ind.x.values) cells.push_back(format_double(v));
        for (double v : ind.objectives) cells.push_back(format_double(v));
        cells.push_back(format_double(ind.violation));
        for (const auto& b : rec.analysis.budgets) {
            cells.push_back(format_double(b.mass));
            cells.push_back(format_double(b.volume));
            cells.push_back(format_double(b.power));
        }
        cells.push_back(format_double(rec.payload.mass));
        cells.push_back(format_double(rec.payload.volume));
        cells.push_back(format_double(rec.payload.power));
        out += csv_row(cells);
    }
    return out;
}

inline std::string history_csv(const std::vector<sysopt::OptionCount>& table) {
    std::string out = "generation,option,count\n";
    for (const auto& row : table)
        out += std::to_string(row.generation) + "," + row.option + "," + std::to_string(row.count) + "\n";
    return out;
}

struct CompareRow {
    double distance, duration;
    disciplines::Propellant propellant;
    disciplines::PowerType power_type;
    sysopt::ComparativeResult result;
};

inline std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::string out = "distance_m,duration_hr,propellant,power_type,total_mass_kg,radius_m\n";
    for (const auto& r : rows) {
        out += text::format_double(r.distance) + "," + text::format_double(r.duration) + "," +
               disciplines::to_string(r.propellant) + "," + disciplines::to_string(r.power_type) + ",";
        out += r.result.feasible ? text::format_double(r.result.mass) + "," + text::format_double(r.result.radius)
                                 : std::string("INFEASIBLE,");
        out += "\n";
    }
    return out;
}

}  // namespace hopdesign::io
