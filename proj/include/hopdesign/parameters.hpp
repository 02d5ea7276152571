#pragma once

// Every constant used by the discipline models, with units. The table below
// is the single source of truth; data/model_parameters.txt mirrors it and
// `load_parameters` applies overrides from any file in the same format:
//
//   key = value   # unit, description

#include "text.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopdesign {

struct ModelParameters {
    // propulsive hopping
    double isp_h2_o2_s = 450.0;
    double isp_rp1_h2o2_s = 320.0;
    double isp_steam_s = 180.0;
    double density_h2_o2 = 320.0;
    double density_rp1_h2o2 = 1300.0;
    double density_steam = 1000.0;
    double tank_fraction_storable = 0.15;
    double tank_fraction_cryogenic = 0.40;
    double cryogenic_tank_fixed_kg = 0.15;
    double tank_ullage = 1.10;
    double thruster_specific_mass = 0.004;
    double propulsion_fixed_kg = 0.10;
    double hop_burn_time_s = 0.5;
    double hop_dwell_s = 20.0;
    double hop_range_min_m = 1.0;
    double hop_range_max_m = 100.0;
    double cryo_boiloff_per_hr = 0.06;
    double cryo_boiloff_reference_k = 300.0;
    double cryo_boiloff_limit = 0.5;
    double steam_vaporization_j_per_kg = 2.6e6;
    double propulsive_valve_power_w = 1.5;
    double hopping_gnc_power_w = 5.0;
    double hardware_density = 2000.0;

    // mechanical and reaction-wheel hopping
    double spring_hop_range_m = 3.0;
    double spring_hop_cycle_s = 120.0;
    double spring_mechanism_kg = 0.35;
    double spring_motor_power_w = 3.0;
    double wheel_hop_range_m = 1.0;
    double wheel_hop_cycle_s = 90.0;
    double wheel_hop_mechanism_kg = 0.45;
    double wheel_hop_power_w = 4.0;

    // rolling and wheeled driving
    double rolling_speed_mps = 0.05;
    double rolling_climb_ratio = 0.2;
    double rolling_drive_kg = 0.25;
    double rolling_efficiency = 0.5;
    double rolling_crr = 0.10;
    double wheeled_speed_mps = 0.10;
    double wheeled_climb_ratio = 0.4;
    double wheeled_drive_kg = 0.50;
    double wheeled_efficiency = 0.6;
    double wheeled_crr = 0.05;
    double drive_mass_fraction = 0.05;
    double rover_gnc_power_w = 3.0;

    // power
    double battery_specific_energy_wh_per_kg = 150.0;
    double battery_energy_density_wh_per_m3 = 250e3;
    double battery_packaging_kg = 0.05;
    double battery_packaging_m3 = 2e-5;
    double battery_depth_of_discharge = 0.8;
    double battery_efficiency = 0.95;
    double battery_max_energy_wh = 150.0;
    double battery_management_power_w = 0.1;
    double fuel_cell_stack_kg = 0.5;
    double fuel_cell_stack_m3 = 4e-4;
    double fuel_cell_reactant_wh_per_kg = 1200.0;
    double fuel_cell_reactant_wh_per_m3 = 600e3;
    double fuel_cell_utilization = 0.95;
    double fuel_cell_efficiency = 0.6;
    double fuel_cell_bop_power_w = 0.5;
    double fuel_cell_bop_fraction = 0.05;

    // thermal
    double shell_emittance = 0.05;
    double radiator_emittance = 0.85;
    double radiator_areal_mass = 5.0;
    double thermal_base_kg = 0.05;
    double thermal_base_m3 = 2e-5;
    double heater_kg = 0.01;
    double set_point_low_k = 263.0;
    double set_point_high_k = 313.0;

    // radiation shielding
    double dose_limit_rad = 0.05;
    double shield_char_thickness_m = 0.002;
    double shield_density = 2700.0;

    // shell
    double shell_density = 2700.0;
    double shell_min_thickness_m = 0.002;
    double landing_deceleration_g = 10.0;
    double shell_allowable_stress_pa = 50e6;

    // communication
    double antenna_length_ratio = 1.8;
    double antenna_linear_mass = 0.05;
    double rf_efficiency = 0.25;
    double antenna_gain_dbi = 2.15;
    double required_snr_db = 10.0;
    double noise_temperature_k = 290.0;
    double comm_base_duty = 0.1;
    double comm_standby_fraction = 0.1;

    // assembly and coupling
    double packing_fraction = 0.6;
    double coupling_damping = 0.5;
    double coupling_max_iterations = 50.0;
    double coupling_tolerance_kg = 1e-6;
};

struct ParameterInfo {
    const char* key;
    double ModelParameters::*field;
    const char* unit;
    const char* description;
};

inline const std::vector<ParameterInfo>& parameter_table() {
    using P = ModelParameters;
    static const std::vector<ParameterInfo> table{
        {"isp_h2_o2_s", &P::isp_h2_o2_s, "s", "specific impulse, H2/O2"},
        {"isp_rp1_h2o2_s", &P::isp_rp1_h2o2_s, "s", "specific impulse, RP1/H2O2"},
        {"isp_steam_s", &P::isp_steam_s, "s", "specific impulse, steam"},
        {"density_h2_o2", &P::density_h2_o2, "kg/m3", "bulk propellant density, H2/O2"},
        {"density_rp1_h2o2", &P::density_rp1_h2o2, "kg/m3", "bulk propellant density, RP1/H2O2"},
        {"density_steam", &P::density_steam, "kg/m3", "water density"},
        {"tank_fraction_storable", &P::tank_fraction_storable, "-", "tank mass per loaded propellant mass"},
        {"tank_fraction_cryogenic", &P::tank_fraction_cryogenic, "-", "cryogenic tank mass per propellant mass"},
        {"cryogenic_tank_fixed_kg", &P::cryogenic_tank_fixed_kg, "kg", "insulation and venting hardware"},
        {"tank_ullage", &P::tank_ullage, "-", "tank volume per propellant volume"},
        {"thruster_specific_mass", &P::thruster_specific_mass, "kg/N", "thruster mass per newton of thrust"},
        {"propulsion_fixed_kg", &P::propulsion_fixed_kg, "kg", "valves, lines and igniter"},
        {"hop_burn_time_s", &P::hop_burn_time_s, "s", "launch burn duration"},
        {"hop_dwell_s", &P::hop_dwell_s, "s", "settle and plan time between hops"},
        {"hop_range_min_m", &P::hop_range_min_m, "m", "shortest hop"},
        {"hop_range_max_m", &P::hop_range_max_m, "m", "longest hop"},
        {"cryo_boiloff_per_hr", &P::cryo_boiloff_per_hr, "1/hr", "boil-off fraction per hour at the reference temperature"},
        {"cryo_boiloff_reference_k", &P::cryo_boiloff_reference_k, "K", "boil-off reference ambient temperature"},
        {"cryo_boiloff_limit", &P::cryo_boiloff_limit, "-", "largest tolerable boil-off fraction"},
        {"steam_vaporization_j_per_kg", &P::steam_vaporization_j_per_kg, "J/kg", "energy to raise steam"},
        {"propulsive_valve_power_w", &P::propulsive_valve_power_w, "W", "valve and igniter draw"},
        {"hopping_gnc_power_w", &P::hopping_gnc_power_w, "W", "hop guidance sensors and processing"},
        {"hardware_density", &P::hardware_density, "kg/m3", "mean density of mechanisms"},
        {"spring_hop_range_m", &P::spring_hop_range_m, "m", "spring hop range"},
        {"spring_hop_cycle_s", &P::spring_hop_cycle_s, "s", "spring rewind and hop cycle"},
        {"spring_mechanism_kg", &P::spring_mechanism_kg, "kg", "spring mechanism mass"},
        {"spring_motor_power_w", &P::spring_motor_power_w, "W", "spring rewind motor draw"},
        {"wheel_hop_range_m", &P::wheel_hop_range_m, "m", "reaction-wheel hop range"},
        {"wheel_hop_cycle_s", &P::wheel_hop_cycle_s, "s", "wheel spin-up and hop cycle"},
        {"wheel_hop_mechanism_kg", &P::wheel_hop_mechanism_kg, "kg", "flywheel and brake mass"},
        {"wheel_hop_power_w", &P::wheel_hop_power_w, "W", "flywheel motor draw"},
        {"rolling_speed_mps", &P::rolling_speed_mps, "m/s", "rolling traverse speed"},
        {"rolling_climb_ratio", &P::rolling_climb_ratio, "-", "climbable obstacle per shell radius, rolling"},
        {"rolling_drive_kg", &P::rolling_drive_kg, "kg", "pendulum drive mass"},
        {"rolling_efficiency", &P::rolling_efficiency, "-", "drive efficiency, rolling"},
        {"rolling_crr", &P::rolling_crr, "-", "rolling resistance on reference soil, rolling"},
        {"wheeled_speed_mps", &P::wheeled_speed_mps, "m/s", "wheeled traverse speed"},
        {"wheeled_climb_ratio", &P::wheeled_climb_ratio, "-", "climbable obstacle per shell radius, wheeled"},
        {"wheeled_drive_kg", &P::wheeled_drive_kg, "kg", "wheel and motor mass"},
        {"wheeled_efficiency", &P::wheeled_efficiency, "-", "drive efficiency, wheeled"},
        {"wheeled_crr", &P::wheeled_crr, "-", "rolling resistance on reference soil, wheeled"},
        {"drive_mass_fraction", &P::drive_mass_fraction, "-", "drive mass per kg of robot"},
        {"rover_gnc_power_w", &P::rover_gnc_power_w, "W", "driving guidance draw"},
        {"battery_specific_energy_wh_per_kg", &P::battery_specific_energy_wh_per_kg, "Wh/kg", "cell specific energy"},
        {"battery_energy_density_wh_per_m3", &P::battery_energy_density_wh_per_m3, "Wh/m3", "cell energy density"},
        {"battery_packaging_kg", &P::battery_packaging_kg, "kg", "pack housing and harness"},
        {"battery_packaging_m3", &P::battery_packaging_m3, "m3", "pack housing volume"},
        {"battery_depth_of_discharge", &P::battery_depth_of_discharge, "-", "usable fraction of capacity"},
        {"battery_efficiency", &P::battery_efficiency, "-", "discharge efficiency"},
        {"battery_max_energy_wh", &P::battery_max_energy_wh, "Wh", "largest pack that can be qualified"},
        {"battery_management_power_w", &P::battery_management_power_w, "W", "battery management draw"},
        {"fuel_cell_stack_kg", &P::fuel_cell_stack_kg, "kg", "stack and balance-of-plant floor"},
        {"fuel_cell_stack_m3", &P::fuel_cell_stack_m3, "m3", "stack volume"},
        {"fuel_cell_reactant_wh_per_kg", &P::fuel_cell_reactant_wh_per_kg, "Wh/kg", "reactant specific energy"},
        {"fuel_cell_reactant_wh_per_m3", &P::fuel_cell_reactant_wh_per_m3, "Wh/m3", "reactant energy density"},
        {"fuel_cell_utilization", &P::fuel_cell_utilization, "-", "usable fraction of reactants"},
        {"fuel_cell_efficiency", &P::fuel_cell_efficiency, "-", "electrical efficiency (rest is heat)"},
        {"fuel_cell_bop_power_w", &P::fuel_cell_bop_power_w, "W", "pump and controller floor"},
        {"fuel_cell_bop_fraction", &P::fuel_cell_bop_fraction, "-", "parasitic draw per delivered watt"},
        {"shell_emittance", &P::shell_emittance, "-", "shell infrared emittance"},
        {"radiator_emittance", &P::radiator_emittance, "-", "radiator infrared emittance"},
        {"radiator_areal_mass", &P::radiator_areal_mass, "kg/m2", "radiator panel mass"},
        {"thermal_base_kg", &P::thermal_base_kg, "kg", "sensors, straps and insulation"},
        {"thermal_base_m3", &P::thermal_base_m3, "m3", "thermal hardware volume"},
        {"heater_kg", &P::heater_kg, "kg", "heater and thermostat"},
        {"set_point_low_k", &P::set_point_low_k, "K", "lowest allowed internal temperature"},
        {"set_point_high_k", &P::set_point_high_k, "K", "highest allowed internal temperature"},
        {"dose_limit_rad", &P::dose_limit_rad, "rad", "mission dose the electronics may receive"},
        {"shield_char_thickness_m", &P::shield_char_thickness_m, "m", "attenuation length of the shield"},
        {"shield_density", &P::shield_density, "kg/m3", "shield material density"},
        {"shell_density", &P::shell_density, "kg/m3", "shell material density"},
        {"shell_min_thickness_m", &P::shell_min_thickness_m, "m", "minimum gauge"},
        {"landing_deceleration_g", &P::landing_deceleration_g, "g0", "design landing deceleration"},
        {"shell_allowable_stress_pa", &P::shell_allowable_stress_pa, "Pa", "allowable shell stress"},
        {"antenna_length_ratio", &P::antenna_length_ratio, "-", "longest antenna per shell radius"},
        {"antenna_linear_mass", &P::antenna_linear_mass, "kg/m", "antenna element mass"},
        {"rf_efficiency", &P::rf_efficiency, "-", "radiated power per watt drawn"},
        {"antenna_gain_dbi", &P::antenna_gain_dbi, "dBi", "gain at each end of the link"},
        {"required_snr_db", &P::required_snr_db, "dB", "signal-to-noise needed to close the link"},
        {"noise_temperature_k", &P::noise_temperature_k, "K", "receiver system noise temperature"},
        {"comm_base_duty", &P::comm_base_duty, "-", "transmit duty cycle per robot"},
        {"comm_standby_fraction", &P::comm_standby_fraction, "-", "receive draw per transmit draw"},
        {"packing_fraction", &P::packing_fraction, "-", "usable fraction of the sphere volume"},
        {"coupling_damping", &P::coupling_damping, "-", "relaxation factor of the coupling iteration"},
        {"coupling_max_iterations", &P::coupling_max_iterations, "-", "coupling iteration cap"},
        {"coupling_tolerance_kg", &P::coupling_tolerance_kg, "kg", "coupling convergence threshold on total mass"},
    };
    return table;
}

class ParameterError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Applies `key = value` lines on top of `base`. Unknown keys and
/// malformed values are errors naming the line.
inline ModelParameters parse_parameters(const std::string& content, ModelParameters base = {},
                                        const std::string& source = "<parameters>") {
    std::istringstream in(content);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto hash = line.find('#');
        const auto body = text::trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ParameterError(source + ":" + std::to_string(row) + ": expected 'key = value'");
        const auto key = text::trim(body.substr(0, eq));
        const auto value = text::parse_double(text::trim(body.substr(eq + 1)));
        if (!value) throw ParameterError(source + ":" + std::to_string(row) + ": bad number for '" + std::string(key) + "'");
        bool found = false;
        for (const auto& info : parameter_table())
            if (key == info.key) {
                base.*(info.field) = *value;
                found = true;
            }
        if (!found) throw ParameterError(source + ":" + std::to_string(row) + ": unknown parameter '" + std::string(key) + "'");
    }
    return base;
}

inline ModelParameters load_parameters(const std::string& path, ModelParameters base = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_parameters(ss.str(), base, path);
}

inline std::string format_parameters(const ModelParameters& p) {
    std::string out;
    for (const auto& info : parameter_table())
        out += std::string(info.key) + " = " + text::format_double(p.*(info.field)) + "   # " + info.unit + ", " +
               info.description + "\n";
    return out;
}

}  // namespace hopdesign
