#pragma once

// Environment records and the seven subsystem sizing models: mobility,
// power, thermal, shielding, communication, avionics and shell. Every model
// is a pure function of its inputs and the parameter table, returning a
// mass/volume/power budget plus named coupling outputs.

#include "cots.hpp"
#include "parameters.hpp"
#include "sqp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopdesign::disciplines {

inline constexpr double standard_gravity = 9.80665;      // m/s^2
inline constexpr double stefan_boltzmann = 5.670374419e-8;  // W/(m^2 K^4)
inline constexpr double speed_of_light = 299792458.0;    // m/s
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double hours_per_year = 8766.0;

inline double sphere_area(double r) { return 4.0 * std::numbers::pi * r * r; }
inline double sphere_volume(double r) { return 4.0 / 3.0 * std::numbers::pi * r * r * r; }

// ---------------------------------------------------------------- environment

struct Soil {
    double cohesion = 170.0;       // Pa
    double friction_angle = 35.0;  // deg
    double sinkage_exponent = 1.0;
    bool operator==(const Soil&) const = default;
};

struct Environment {
    double gravity = 1.62;               // m/s^2
    double ambient_temperature = 340.0;  // K
    double dose_rate = 100.0;            // rad/yr
    Soil soil;
    double obstacle_height = 0.0;  // m, tallest step on the traverse
    double sky_temperature = 3.0;  // K, radiator sink

    bool operator==(const Environment&) const = default;

    void validate() const {
        if (!(gravity > 0.0)) throw std::invalid_argument("environment: gravity must be positive");
        if (!(ambient_temperature > 0.0))
            throw std::invalid_argument("environment: ambient temperature must be positive");
        if (!(dose_rate >= 0.0)) throw std::invalid_argument("environment: dose rate must be nonnegative");
        if (!(obstacle_height >= 0.0)) throw std::invalid_argument("environment: obstacle height must be nonnegative");
        if (!(sky_temperature >= 0.0)) throw std::invalid_argument("environment: sky temperature must be nonnegative");
        if (!(soil.friction_angle > 0.0 && soil.friction_angle < 90.0))
            throw std::invalid_argument("environment: soil friction angle must lie in (0, 90) deg");
        if (!(soil.cohesion >= 0.0 && soil.sinkage_exponent >= 0.0))
            throw std::invalid_argument("environment: soil cohesion and sinkage exponent must be nonnegative");
    }
};

enum class Body { moon, mars };
enum class Setting { surface, subsurface };

inline const char* to_string(Body b) { return b == Body::moon ? "moon" : "mars"; }
inline const char* to_string(Setting s) { return s == Setting::surface ? "surface" : "subsurface"; }

struct EnvironmentEntry {
    Body body;
    Setting setting;
    Environment environment;
};

/// Built-in settings. Subsurface entries see no sky, so the radiator sink
/// is the cave wall at ambient temperature.
inline const std::vector<EnvironmentEntry>& environment_table() {
    static const std::vector<EnvironmentEntry> table{
        {Body::moon, Setting::surface, {1.62, 340.0, 100.0, {170.0, 35.0, 1.0}, 0.15, 3.0}},
        {Body::moon, Setting::subsurface, {1.62, 250.0, 0.0, {170.0, 35.0, 1.0}, 0.5, 250.0}},
        {Body::mars, Setting::surface, {3.71, 210.0, 8.0, {500.0, 30.0, 0.8}, 0.2, 150.0}},
        {Body::mars, Setting::subsurface, {3.71, 220.0, 0.0, {500.0, 30.0, 0.8}, 0.5, 220.0}},
    };
    return table;
}

inline std::string available_settings() {
    std::string out;
    for (const auto& e : environment_table())
        out += std::string(out.empty() ? "" : ", ") + to_string(e.body) + "/" + to_string(e.setting);
    return out;
}

inline Environment environment_lookup(Body body, Setting setting) {
    for (const auto& e : environment_table())
        if (e.body == body && e.setting == setting) return e.environment;
    throw std::invalid_argument("unknown environment; available: " + available_settings());
}

inline Environment environment_lookup(std::string_view body, std::string_view setting) {
    for (const auto& e : environment_table())
        if (body == to_string(e.body) && setting == to_string(e.setting)) return e.environment;
    throw std::invalid_argument("unknown environment '" + std::string(body) + "/" + std::string(setting) +
                                "'; available: " + available_settings());
}

// ---------------------------------------------------------------- mission

struct Phase {
    double distance = 0.0;  // m
    double duration = 0.0;  // hr
    Environment environment;
    bool operator==(const Phase&) const = default;
};

struct MissionSpec {
    std::vector<Phase> phases;
    int robot_count = 1;

    double total_distance() const {
        double s = 0.0;
        for (const auto& p : phases) s += p.distance;
        return s;
    }
    double total_duration() const {
        double s = 0.0;
        for (const auto& p : phases) s += p.duration;
        return s;
    }
    double longest_leg() const {
        double s = 0.0;
        for (const auto& p : phases) s = std::max(s, p.distance);
        return s;
    }

    void validate() const {
        if (phases.empty()) throw std::invalid_argument("mission: at least one phase is required");
        if (robot_count < 1) throw std::invalid_argument("mission: robot_count must be a positive integer");
        for (std::size_t i = 0; i < phases.size(); ++i) {
            const auto where = "mission: phases[" + std::to_string(i) + "]";
            if (!(phases[i].distance > 0.0)) throw std::invalid_argument(where + ".distance_m must be positive");
            if (!(phases[i].duration > 0.0)) throw std::invalid_argument(where + ".duration_hr must be positive");
            try {
                phases[i].environment.validate();
            } catch (const std::invalid_argument& e) {
                throw std::invalid_argument(where + "." + e.what());
            }
        }
    }
};

inline MissionSpec single_phase(double distance, double duration, const Environment& env, int robots = 1) {
    return MissionSpec{{Phase{distance, duration, env}}, robots};
}

// ---------------------------------------------------------------- budget

struct DisciplineBudget {
    double mass = 0.0;    // kg
    double volume = 0.0;  // m^3
    double power = 0.0;   // W
    std::map<std::string, double> couplings;
    bool feasible = true;
    std::string reason;

    double coupling(const std::string& key, double fallback = 0.0) const {
        const auto it = couplings.find(key);
        return it == couplings.end() ? fallback : it->second;
    }

    void fail(const std::string& why) {
        feasible = false;
        reason += (reason.empty() ? "" : "; ") + why;
    }
};

// ---------------------------------------------------------------- mobility

enum class MobilityMode { hopping = 1, rolling = 2, wheeled = 3 };
enum class HopSubtype { propulsive = 1, mechanical = 2, reaction_wheel = 3 };
enum class Propellant { h2_o2 = 1, rp1_h2o2 = 2, steam = 3 };

inline const char* to_string(MobilityMode m) {
    switch (m) {
        case MobilityMode::hopping: return "hopping";
        case MobilityMode::rolling: return "rolling";
        case MobilityMode::wheeled: return "wheeled";
    }
    return "?";
}
inline const char* to_string(HopSubtype h) {
    switch (h) {
        case HopSubtype::propulsive: return "propulsive";
        case HopSubtype::mechanical: return "mechanical";
        case HopSubtype::reaction_wheel: return "reaction_wheel";
    }
    return "?";
}
inline const char* to_string(Propellant p) {
    switch (p) {
        case Propellant::h2_o2: return "H2_O2";
        case Propellant::rp1_h2o2: return "RP1_H2O2";
        case Propellant::steam: return "steam";
    }
    return "?";
}

/// hop_subtype is read only for hopping; propellant only for propulsive hopping.
struct MobilityConfig {
    MobilityMode mode = MobilityMode::hopping;
    HopSubtype hop_subtype = HopSubtype::propulsive;
    Propellant propellant = Propellant::rp1_h2o2;
    bool operator==(const MobilityConfig&) const = default;
};

inline double specific_impulse(Propellant p, const ModelParameters& k) {
    switch (p) {
        case Propellant::h2_o2: return k.isp_h2_o2_s;
        case Propellant::rp1_h2o2: return k.isp_rp1_h2o2_s;
        case Propellant::steam: return k.isp_steam_s;
    }
    throw std::invalid_argument("unknown propellant");
}

inline double propellant_density(Propellant p, const ModelParameters& k) {
    switch (p) {
        case Propellant::h2_o2: return k.density_h2_o2;
        case Propellant::rp1_h2o2: return k.density_rp1_h2o2;
        case Propellant::steam: return k.density_steam;
    }
    throw std::invalid_argument("unknown propellant");
}

/// Ballistic 45 degree hop with a landing burn of equal size.
inline double hop_delta_v(double g, double hop_range) {
    if (!(g > 0.0) || !(hop_range >= 0.0)) throw std::invalid_argument("hop_delta_v: need g > 0 and range >= 0");
    return 2.0 * std::sqrt(g * hop_range);
}

inline double propellant_mass(double wet_mass, double delta_v_total, double isp) {
    if (!(wet_mass > 0.0) || !(isp > 0.0) || !(delta_v_total >= 0.0))
        throw std::invalid_argument("propellant_mass: need wet mass > 0, isp > 0, delta-v >= 0");
    return wet_mass * -std::expm1(-delta_v_total / (isp * standard_gravity));
}

/// Hop-range sizing problem for propulsive hopping. The robot covers each
/// phase in hops of range R; propellant falls with R while thruster mass
/// grows with it, and each phase's hop count must fit in its duration.
struct PropulsiveHopModel {
    std::vector<Phase> phases;
    Propellant propellant = Propellant::rp1_h2o2;
    double wet_mass = 1.0;
    ModelParameters k;

    bool cryogenic() const { return propellant == Propellant::h2_o2; }

    double boiloff_fraction() const {
        if (!cryogenic()) return 0.0;
        double f = 0.0;
        for (const auto& p : phases)
            f += k.cryo_boiloff_per_hr * p.environment.ambient_temperature / k.cryo_boiloff_reference_k * p.duration;
        return f;
    }

    double delta_v_total(double R) const {
        double dv = 0.0;
        for (const auto& p : phases) dv += p.distance / R * hop_delta_v(p.environment.gravity, R);
        return dv;
    }

    /// Propellant loaded at launch, including what boils off.
    double loaded_propellant(double R) const {
        const double burned = propellant_mass(wet_mass, delta_v_total(R), specific_impulse(propellant, k));
        return burned / (1.0 - std::min(boiloff_fraction(), k.cryo_boiloff_limit));
    }

    double tank_mass(double R) const {
        const double frac = cryogenic() ? k.tank_fraction_cryogenic : k.tank_fraction_storable;
        return frac * loaded_propellant(R) + (cryogenic() ? k.cryogenic_tank_fixed_kg : 0.0);
    }

    /// Launch thrust for the strongest-gravity phase that has distance to cover.
    double thrust(double R) const {
        double g = 0.0;
        for (const auto& p : phases)
            if (p.distance > 0.0) g = std::max(g, p.environment.gravity);
        if (g == 0.0) return 0.0;
        return wet_mass * (std::sqrt(g * R) / k.hop_burn_time_s + g);
    }

    double thruster_mass(double R) const { return k.thruster_specific_mass * thrust(R); }

    double objective(double R) const { return loaded_propellant(R) + tank_mass(R) + thruster_mass(R); }

    double phase_time_s(const Phase& p, double R) const {
        return p.distance / R * (std::sqrt(2.0 * R / p.environment.gravity) + k.hop_dwell_s);
    }

    double active_time_s(double R) const {
        double t = 0.0;
        for (const auto& p : phases) t += phase_time_s(p, R);
        return t;
    }

    /// One row per phase with distance: time used over time available, minus 1.
    sqp::Vector time_constraints(double R) const {
        std::vector<double> rows;
        for (const auto& p : phases)
            if (p.distance > 0.0) rows.push_back(phase_time_s(p, R) / (3600.0 * p.duration) - 1.0);
        return Eigen::Map<const sqp::Vector>(rows.data(), static_cast<Eigen::Index>(rows.size()));
    }

    /// Hop range optimization in the scaled variable u = R / R_max.
    sqp::Nlp nlp() const {
        sqp::Nlp n;
        n.dimension = 1;
        const double rmax = k.hop_range_max_m;
        n.objective = [self = *this, rmax](const sqp::Vector& u) { return self.objective(u[0] * rmax); };
        n.inequality = [self = *this, rmax](const sqp::Vector& u) { return self.time_constraints(u[0] * rmax); };
        sqp::Vector lo(1), hi(1);
        lo << k.hop_range_min_m / rmax;
        hi << 1.0;
        return sqp::with_side_constraints(std::move(n), lo, hi);
    }
};

namespace detail {

inline DisciplineBudget propulsive_hopping(Propellant prop, const MissionSpec& mission, double m,
                                           const ModelParameters& k) {
    DisciplineBudget b;
    PropulsiveHopModel model{mission.phases, prop, m, k};
    const double rmax = k.hop_range_max_m;
    double R = rmax;
    bool converged = true;

    const double boil = model.boiloff_fraction();
    if (boil >= k.cryo_boiloff_limit) b.fail("cryogenic boil-off exceeds the tolerable fraction");

    const bool moving = mission.total_distance() > 0.0;
    if (moving) {
        const auto at_max = model.time_constraints(rmax);
        if (at_max.size() > 0 && at_max.maxCoeff() > 0.0) {
            b.fail("hop cadence cannot cover the distance in the time budget");
        } else if (b.feasible) {
            const auto problem = model.nlp();
            sqp::Vector u0(1);
            u0 << 1.0;
            const auto report = sqp::solve(problem, u0, {.tolerance = 1e-9, .max_iterations = 100});
            const double cand = report.solution.d[0] * rmax;
            const auto g = model.time_constraints(cand);
            const bool ok = std::isfinite(cand) && cand >= k.hop_range_min_m - 1e-9 && cand <= rmax + 1e-9 &&
                            (g.size() == 0 || g.maxCoeff() <= 1e-9);
            converged = report.converged;
            if (ok && model.objective(cand) <= model.objective(rmax)) R = std::clamp(cand, k.hop_range_min_m, rmax);
        }
    }

    const double loaded = moving ? model.loaded_propellant(R) : 0.0;
    const double tank = moving ? model.tank_mass(R) : (model.cryogenic() ? k.cryogenic_tank_fixed_kg : 0.0);
    const double thruster = moving ? model.thruster_mass(R) : 0.0;
    const double hardware = k.propulsion_fixed_kg + tank + thruster;
    const double active = moving ? model.active_time_s(R) : 0.0;

    b.mass = loaded + hardware;
    b.volume = loaded / propellant_density(prop, k) * k.tank_ullage + hardware / k.hardware_density;
    b.power = k.propulsive_valve_power_w + k.hopping_gnc_power_w;
    double steam_w = 0.0;
    if (prop == Propellant::steam && active > 0.0) steam_w = k.steam_vaporization_j_per_kg * loaded / active;
    b.power += steam_w;

    b.couplings = {{"hop_range_m", moving ? R : 0.0},
                   {"delta_v_mps", moving ? model.delta_v_total(R) : 0.0},
                   {"propellant_kg", loaded},
                   {"tank_kg", tank},
                   {"thruster_kg", thruster},
                   {"thrust_n", moving ? model.thrust(R) : 0.0},
                   {"boiloff_fraction", boil},
                   {"active_time_hr", active / 3600.0},
                   {"steam_heating_w", steam_w},
                   {"sizing_converged", converged ? 1.0 : 0.0}};
    return b;
}

inline DisciplineBudget mechanical_hopping(bool spring, const MissionSpec& mission, double m,
                                           const ModelParameters& k) {
    DisciplineBudget b;
    const double range = spring ? k.spring_hop_range_m : k.wheel_hop_range_m;
    const double cycle = spring ? k.spring_hop_cycle_s : k.wheel_hop_cycle_s;
    double energy_j = 0.0, hops = 0.0;
    for (const auto& p : mission.phases) {
        const double n = p.distance / range;
        hops += n;
        if (n * cycle > 3600.0 * p.duration) {
            b.fail("hop cadence cannot cover the distance in the time budget");
        }
        // launch energy at 45 degrees: v^2 = g R
        energy_j += n * 0.5 * m * p.environment.gravity * range;
    }
    b.mass = (spring ? k.spring_mechanism_kg : k.wheel_hop_mechanism_kg) + k.drive_mass_fraction * m;
    b.volume = b.mass / k.hardware_density;
    b.power = (spring ? k.spring_motor_power_w : k.wheel_hop_power_w) + k.hopping_gnc_power_w;
    b.couplings = {{"hop_range_m", range}, {"hops", hops}, {"launch_energy_wh", energy_j / 3600.0}};
    return b;
}

/// Rolling resistance grows with sinkage and falls with soil strength;
/// equals the base coefficient on reference soil (n = 1, phi = 30 deg).
inline double rolling_resistance(double base, const Soil& soil) {
    const double ref = std::tan(30.0 * std::numbers::pi / 180.0);
    return base * 0.5 * (1.0 + soil.sinkage_exponent) * ref / std::tan(soil.friction_angle * std::numbers::pi / 180.0);
}

inline DisciplineBudget driving(bool wheeled, const MissionSpec& mission, double m, double r,
                                const ModelParameters& k) {
    DisciplineBudget b;
    const double speed = wheeled ? k.wheeled_speed_mps : k.rolling_speed_mps;
    const double climb = (wheeled ? k.wheeled_climb_ratio : k.rolling_climb_ratio) * r;
    const double eff = wheeled ? k.wheeled_efficiency : k.rolling_efficiency;
    const double base = wheeled ? k.wheeled_crr : k.rolling_crr;
    double drive_w = 0.0, energy_j = 0.0;
    for (const auto& p : mission.phases) {
        if (p.distance > 0.0 && p.environment.obstacle_height > climb) b.fail("terrain obstacles exceed climb height");
        if (p.distance / speed > 3600.0 * p.duration) b.fail("drive speed cannot cover the distance in the time budget");
        const double force = rolling_resistance(base, p.environment.soil) * m * p.environment.gravity;
        drive_w = std::max(drive_w, force * speed / eff);
        energy_j += force * p.distance / eff;
    }
    b.mass = (wheeled ? k.wheeled_drive_kg : k.rolling_drive_kg) + k.drive_mass_fraction * m;
    b.volume = b.mass / k.hardware_density;
    b.power = drive_w + k.rover_gnc_power_w;
    b.couplings = {{"climb_height_m", climb}, {"drive_power_w", drive_w}, {"drive_energy_wh", energy_j / 3600.0}};
    return b;
}

}  // namespace detail

inline DisciplineBudget mobility_design(const MobilityConfig& config, const MissionSpec& mission, double m, double r,
                                        const ModelParameters& k = {}) {
    if (!(m > 0.0) || !(r > 0.0)) throw std::invalid_argument("mobility_design: m and r must be positive");
    DisciplineBudget b;
    switch (config.mode) {
        case MobilityMode::hopping:
            switch (config.hop_subtype) {
                case HopSubtype::propulsive: b = detail::propulsive_hopping(config.propellant, mission, m, k); break;
                case HopSubtype::mechanical: b = detail::mechanical_hopping(true, mission, m, k); break;
                case HopSubtype::reaction_wheel: b = detail::mechanical_hopping(false, mission, m, k); break;
            }
            break;
        case MobilityMode::rolling: b = detail::driving(false, mission, m, r, k); break;
        case MobilityMode::wheeled: b = detail::driving(true, mission, m, r, k); break;
    }
    if (b.mass >= m) b.fail("nonpositive remaining mass budget after mobility");
    return b;
}

// ---------------------------------------------------------------- power

enum class PowerType { battery = 1, fuel_cell = 2 };

inline const char* to_string(PowerType t) { return t == PowerType::battery ? "battery" : "fuel_cell"; }

/// Sizes storage for `energy` delivered at up to `peak_power`.
inline DisciplineBudget power_design(PowerType type, double energy, double peak_power, const ModelParameters& k = {}) {
    if (!(energy >= 0.0) || !(peak_power >= 0.0))
        throw std::invalid_argument("power_design: energy and peak power must be nonnegative");
    DisciplineBudget b;
    if (type == PowerType::battery) {
        const double stored = energy / (k.battery_depth_of_discharge * k.battery_efficiency);
        b.mass = k.battery_packaging_kg + stored / k.battery_specific_energy_wh_per_kg;
        b.volume = k.battery_packaging_m3 + stored / k.battery_energy_density_wh_per_m3;
        b.power = k.battery_management_power_w;
        b.couplings = {{"stored_energy_wh", stored}, {"waste_heat_w", 0.0}};
        if (stored > k.battery_max_energy_wh) b.fail("battery capacity exceeds the largest qualified pack");
    } else {
        const double stored = energy / k.fuel_cell_utilization;
        b.mass = k.fuel_cell_stack_kg + stored / k.fuel_cell_reactant_wh_per_kg;
        b.volume = k.fuel_cell_stack_m3 + stored / k.fuel_cell_reactant_wh_per_m3;
        b.power = k.fuel_cell_bop_power_w + k.fuel_cell_bop_fraction * peak_power;
        b.couplings = {{"stored_energy_wh", stored},
                       {"waste_heat_w", peak_power * (1.0 - k.fuel_cell_efficiency) / k.fuel_cell_efficiency}};
    }
    return b;
}

/// Energy above which the fuel cell is lighter than the battery.
inline double power_crossover_energy(const ModelParameters& k = {}) {
    const double sb = 1.0 / (k.battery_depth_of_discharge * k.battery_efficiency * k.battery_specific_energy_wh_per_kg);
    const double sf = 1.0 / (k.fuel_cell_utilization * k.fuel_cell_reactant_wh_per_kg);
    return (k.fuel_cell_stack_kg - k.battery_packaging_kg) / (sb - sf);
}

// ---------------------------------------------------------------- thermal

/// Net power a sphere radiates to a background at T_bg.
inline double radiated_power(double emittance, double r, double T, double T_bg) {
    return emittance * stefan_boltzmann * sphere_area(r) * (std::pow(T, 4) - std::pow(T_bg, 4));
}

inline double equilibrium_temperature(double ambient, double dissipated, double r, double emittance) {
    return std::pow(std::pow(ambient, 4) + dissipated / (emittance * stefan_boltzmann * sphere_area(r)), 0.25);
}

inline DisciplineBudget thermal_design(const Environment& env, double dissipated, double r,
                                       const ModelParameters& k = {}) {
    if (!(dissipated >= 0.0)) throw std::invalid_argument("thermal_design: dissipated power must be nonnegative");
    if (!(r > 0.0)) throw std::invalid_argument("thermal_design: r must be positive");
    DisciplineBudget b;
    const double Ta = env.ambient_temperature;
    const double T = equilibrium_temperature(Ta, dissipated, r, k.shell_emittance);
    const double residual = radiated_power(k.shell_emittance, r, T, Ta) - dissipated;

    const double heater =
        std::max(0.0, radiated_power(k.shell_emittance, r, k.set_point_low_k, Ta) - dissipated);
    const double excess = dissipated - radiated_power(k.shell_emittance, r, k.set_point_high_k, Ta);
    double area = 0.0;
    if (excess > 0.0) {
        const double flux = k.radiator_emittance * stefan_boltzmann *
                            (std::pow(k.set_point_high_k, 4) - std::pow(env.sky_temperature, 4));
        if (flux > 0.0)
            area = excess / flux;
        else
            b.fail("radiator sink is warmer than the upper set-point");
    }
    b.mass = k.thermal_base_kg + k.heater_kg + k.radiator_areal_mass * area;
    b.volume = k.thermal_base_m3;
    b.power = heater;
    b.couplings = {{"equilibrium_k", T},
                   {"balance_residual_w", residual},
                   {"heater_w", heater},
                   {"radiator_m2", area},
                   {"heat_to_reject_w", std::max(0.0, excess)}};
    return b;
}

/// Sizes for the worst phase: largest heater and largest radiator. The
/// coupling "heater_energy_wh" integrates each phase's heater over its duration.
inline DisciplineBudget thermal_design_mission(const MissionSpec& mission, double dissipated, double r,
                                               const ModelParameters& k = {}) {
    DisciplineBudget out;
    double area = 0.0, heater = 0.0, energy = 0.0, residual = 0.0;
    for (const auto& p : mission.phases) {
        const auto b = thermal_design(p.environment, dissipated, r, k);
        if (!b.feasible) out.fail(b.reason);
        area = std::max(area, b.coupling("radiator_m2"));
        heater = std::max(heater, b.power);
        energy += b.power * p.duration;
        residual = std::max(residual, std::abs(b.coupling("balance_residual_w")));
    }
    out.mass = k.thermal_base_kg + k.heater_kg + k.radiator_areal_mass * area;
    out.volume = k.thermal_base_m3;
    out.power = heater;
    out.couplings = {{"radiator_m2", area},
                     {"heater_w", heater},
                     {"heater_energy_wh", energy},
                     {"balance_residual_w", residual}};
    return out;
}

// ---------------------------------------------------------------- shielding

/// Thickness t with dose * exp(-t / t_char) = limit, or zero when the
/// unshielded dose is already within the limit.
inline double shield_thickness(double dose, double dose_limit, double char_thickness) {
    return dose > dose_limit ? char_thickness * std::log(dose / dose_limit) : 0.0;
}

inline DisciplineBudget shielding_for_dose(double dose, double dose_limit, double r, const ModelParameters& k) {
    DisciplineBudget b;
    const double t = shield_thickness(dose, dose_limit, k.shield_char_thickness_m);
    b.volume = sphere_area(r) * t;
    b.mass = b.volume * k.shield_density;
    b.couplings = {{"dose_rad", dose}, {"thickness_m", t}};
    return b;
}

inline DisciplineBudget shielding_design(const Environment& env, double duration, double dose_limit, double r,
                                         const ModelParameters& k = {}) {
    if (!(duration > 0.0) || !(dose_limit > 0.0))
        throw std::invalid_argument("shielding_design: duration and dose limit must be positive");
    return shielding_for_dose(env.dose_rate * duration / hours_per_year, dose_limit, r, k);
}

inline DisciplineBudget shielding_design_mission(const MissionSpec& mission, double r, const ModelParameters& k = {}) {
    double dose = 0.0;
    for (const auto& p : mission.phases) dose += p.environment.dose_rate * p.duration / hours_per_year;
    return shielding_for_dose(dose, k.dose_limit_rad, r, k);
}

// ---------------------------------------------------------------- communication

inline double resonant_frequency_mhz(double length) { return speed_of_light / (4.0 * length) / 1e6; }
inline double quarter_wave_length(double f_mhz) { return speed_of_light / (4.0 * f_mhz * 1e6); }

inline double band_center_mhz(const cots::CotsRecord& t) {
    return 0.5 * (t.spec("freq_low_mhz") + t.spec("freq_high_mhz"));
}

/// Received SNR minus the required SNR, in dB, for a direct link at `range`.
inline double link_margin_db(const cots::CotsRecord& t, double range, double f_mhz, const ModelParameters& k = {}) {
    const double lambda = speed_of_light / (f_mhz * 1e6);
    const double tx = k.rf_efficiency * t.power;
    const double path = std::pow(4.0 * std::numbers::pi * std::max(range, lambda) / lambda, 2);
    const double gain = std::pow(10.0, 2.0 * k.antenna_gain_dbi / 10.0);
    const double noise = boltzmann * k.noise_temperature_k * t.spec("bandwidth_mhz") * 1e6;
    return 10.0 * std::log10(tx * gain / path / noise) - k.required_snr_db;
}

/// Quarter-wave monopole cut for the band center, clipped to what the shell
/// can stow. The relay chain splits the range across robots.
inline DisciplineBudget comm_design(int robot_count, double range, const cots::CotsRecord& transceiver, double r,
                                    const ModelParameters& k = {}) {
    if (transceiver.category != cots::Category::transceiver)
        throw std::invalid_argument("comm_design: record is not a transceiver");
    if (robot_count < 1) throw std::invalid_argument("comm_design: robot_count must be positive");
    DisciplineBudget b;
    const double wanted = quarter_wave_length(band_center_mhz(transceiver));
    const double allowed = k.antenna_length_ratio * r;
    double length = wanted;
    if (wanted > allowed) {
        length = allowed;
        b.fail("antenna does not fit the shell");
    }
    const double f = resonant_frequency_mhz(length);
    const double hop_range = range / robot_count;
    const double margin = link_margin_db(transceiver, hop_range, f, k);
    if (margin < 0.0) b.fail("link does not close at range");
    b.mass = transceiver.mass + k.antenna_linear_mass * length;
    b.volume = transceiver.volume;
    b.power = transceiver.power;
    b.couplings = {{"antenna_length_m", length},
                   {"antenna_frequency_mhz", f},
                   {"link_margin_db", margin},
                   {"duty_cycle", std::min(1.0, k.comm_base_duty * robot_count)}};
    return b;
}

// ---------------------------------------------------------------- avionics

struct CotsIds {
    int computer = 1;
    int power_board = 1;
    int battery = 1;
    int transceiver = 1;
    int attitude_board = 1;
    bool operator==(const CotsIds&) const = default;
};

/// Computer, power board, COTS battery and attitude board. The transceiver
/// is carried by comm_design so that its draw is counted once.
inline DisciplineBudget avionics_select(const CotsIds& ids, const cots::Inventory& inv) {
    using cots::Category;
    const auto& c = inv.get(Category::computer, ids.computer);
    const auto& p = inv.get(Category::power_board, ids.power_board);
    const auto& bt = inv.get(Category::battery, ids.battery);
    const auto& a = inv.get(Category::attitude_board, ids.attitude_board);
    inv.get(Category::transceiver, ids.transceiver);
    DisciplineBudget b;
    for (const auto* rec : {&c, &p, &bt, &a}) {
        b.mass += rec->mass;
        b.volume += rec->volume;
        b.power += rec->power;
    }
    b.couplings = {{"clock_mhz", c.spec("clock_mhz")},
                   {"storage_gb", c.spec("storage_gb")},
                   {"battery_capacity_wh", bt.spec("capacity_wh")}};
    return b;
}

// ---------------------------------------------------------------- shell

struct ShellMaterial {
    double density = 2700.0;          // kg/m^3
    double min_thickness = 0.002;     // m
    double allowable_stress = 50e6;   // Pa

    static ShellMaterial from(const ModelParameters& k) {
        return {k.shell_density, k.shell_min_thickness_m, k.shell_allowable_stress_pa};
    }
};

struct ShellResult {
    DisciplineBudget budget;
    double thickness = 0.0;  // m
    double inertia = 0.0;    // kg m^2
};

/// Thin spherical shell. Gauge is the larger of the minimum and the landing
/// load carried as membrane stress over a great circle.
inline ShellResult shell_design(double r, const ShellMaterial& material, double robot_mass = 0.0,
                                double landing_g = 10.0) {
    if (!(r > 0.0)) throw std::invalid_argument("shell_design: r must be positive");
    ShellResult s;
    const double load = robot_mass * landing_g * standard_gravity;
    s.thickness = std::max(material.min_thickness, load / (2.0 * std::numbers::pi * r * material.allowable_stress));
    s.budget.mass = sphere_area(r) * s.thickness * material.density;
    s.inertia = 2.0 / 3.0 * s.budget.mass * r * r;
    s.budget.couplings = {{"thickness_m", s.thickness}, {"inertia_kgm2", s.inertia}};
    return s;
}

// ---------------------------------------------------------------- assembly

/// 1 iff every budget is feasible and the sums fit within m, the packable
/// volume and P. All inequalities are closed.
inline int assembly_index(std::span<const DisciplineBudget> budgets, double m, double r, double P,
                          double packing_fraction = 0.6) {
    double mass = 0.0, volume = 0.0, power = 0.0;
    for (const auto& b : budgets) {
        if (!b.feasible) return 0;
        mass += b.mass;
        volume += b.volume;
        power += b.power;
    }
    return volume <= packing_fraction * sphere_volume(r) && mass <= m && power <= P ? 1 : 0;
}

// ---------------------------------------------------------------- objectives

/// A scalar sizing objective of a discipline over its continuous inputs,
/// with a representative interior point. Used for derivative checks.
struct DisciplineObjective {
    std::string name;
    std::function<double(const sqp::Vector&)> f;
    sqp::Vector point;
};

inline std::vector<DisciplineObjective> discipline_objectives(const ModelParameters& k = {}) {
    using V = sqp::Vector;
    const auto surface = environment_lookup(Body::moon, Setting::surface);
    const auto cave = environment_lookup(Body::moon, Setting::subsurface);
    auto vec = [](std::initializer_list<double> xs) {
        V v(static_cast<Eigen::Index>(xs.size()));
        Eigen::Index i = 0;
        for (double x : xs) v[i++] = x;
        return v;
    };
    std::vector<DisciplineObjective> out;
    for (Propellant p : {Propellant::h2_o2, Propellant::rp1_h2o2, Propellant::steam}) {
        PropulsiveHopModel model{{Phase{1000.0, 5.0, surface}}, p, 4.0, k};
        out.push_back({std::string("mobility.hop_mass.") + to_string(p),
                       [model](const V& x) { return model.objective(x[0]); }, vec({37.0})});
        out.push_back({std::string("mobility.hop_mass_vs_wet_mass.") + to_string(p),
                       [model](const V& x) {
                           auto m2 = model;
                           m2.wet_mass = x[0];
                           return m2.objective(x[1]);
                       },
                       vec({4.0, 37.0})});
    }
    out.push_back({"mobility.propellant_mass",
                   [](const V& x) { return propellant_mass(x[0], x[1], x[2]); }, vec({5.0, 100.0, 320.0})});
    out.push_back({"mobility.rolling_drive_power",
                   [k, surface](const V& x) {
                       return detail::driving(false, single_phase(x[1], 10.0, surface), x[0], 0.2, k).power;
                   },
                   vec({3.0, 500.0})});
    for (PowerType t : {PowerType::battery, PowerType::fuel_cell})
        out.push_back({std::string("power.mass.") + to_string(t),
                       [k, t](const V& x) { return power_design(t, x[0], x[1], k).mass; }, vec({40.0, 15.0})});
    out.push_back({"thermal.mass.hot",
                   [k, surface](const V& x) { return thermal_design(surface, x[0], x[1], k).mass; },
                   vec({12.0, 0.14})});
    out.push_back({"thermal.heater.cold",
                   [k](const V& x) {
                       Environment cold{1.62, 120.0, 0.0, {}, 0.0, 3.0};
                       return thermal_design(cold, x[0], x[1], k).power;
                   },
                   vec({0.05, 0.14})});
    out.push_back({"thermal.equilibrium",
                   [k, cave](const V& x) { return thermal_design(cave, x[0], x[1], k).coupling("equilibrium_k"); },
                   vec({8.0, 0.12})});
    out.push_back({"shielding.mass",
                   [k, surface](const V& x) { return shielding_design(surface, x[0], k.dose_limit_rad, x[1], k).mass; },
                   vec({12.0, 0.15})});
    out.push_back({"shell.mass",
                   [k](const V& x) { return shell_design(x[0], ShellMaterial::from(k), x[1], 400.0).budget.mass; },
                   vec({0.12, 6.0})});
    out.push_back({"comm.antenna_frequency",
                   [](const V& x) { return resonant_frequency_mhz(x[0]); }, vec({0.171})});
    return out;
}

}  // namespace hopdesign::disciplines
