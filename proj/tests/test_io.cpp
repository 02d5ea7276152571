#include "hopdesign/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace hopdesign;

namespace {

const std::string root = HOPDESIGN_SOURCE_ROOT;

std::string config_error_field(const std::function<void()>& f) {
    try {
        f();
    } catch (const io::ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Mission, PresetWithOverride) {
    const auto cfg = io::parse_mission(R"({
        "robot_count": 2,
        "phases": [{"distance_m": 500, "duration_hr": 2,
                    "environment": {"preset": "moon/surface", "ambient_K": 300, "soil": {"cohesion_pa": 200}}}],
        "extra_constraints": {"min_clock_mhz": 200}
    })");
    ASSERT_EQ(cfg.mission.phases.size(), 1u);
    const auto& env = cfg.mission.phases[0].environment;
    EXPECT_EQ(env.gravity, 1.62);
    EXPECT_EQ(env.ambient_temperature, 300.0);
    EXPECT_EQ(env.dose_rate, 100.0);
    EXPECT_EQ(env.soil.cohesion, 200.0);
    EXPECT_EQ(env.soil.friction_angle, 35.0);
    EXPECT_EQ(cfg.mission.robot_count, 2);
    EXPECT_EQ(cfg.extra.min_clock_mhz, 200.0);
    EXPECT_FALSE(cfg.extra.min_storage_gb.has_value());
}

TEST(Mission, ExplicitEnvironmentNeedsCoreFields) {
    const auto cfg = io::parse_mission(R"({"phases": [{"distance_m": 1, "duration_hr": 1,
        "environment": {"gravity": 3.71, "ambient_K": 210, "dose_rad_yr": 8}}]})");
    EXPECT_EQ(cfg.mission.phases[0].environment.gravity, 3.71);
    EXPECT_EQ(config_error_field([] {
                  io::parse_mission(R"({"phases": [{"distance_m": 1, "duration_hr": 1,
                      "environment": {"gravity": 3.71, "ambient_K": 210}}]})");
              }),
              "mission.phases[0].environment.dose_rad_yr");
}

TEST(Mission, ErrorsNameTheField) {
    EXPECT_EQ(config_error_field([] { io::parse_mission("{"); }), "mission");
    EXPECT_EQ(config_error_field([] { io::parse_mission(R"({"phases": []})"); }), "mission.phases");
    EXPECT_EQ(config_error_field([] {
                  io::parse_mission(R"({"phases": [{"distance_m": -1, "duration_hr": 1,
                      "environment": {"preset": "moon/surface"}}]})");
              }),
              "mission.phases[0].distance_m");
    EXPECT_EQ(config_error_field([] {
                  io::parse_mission(R"({"phases": [{"distance_m": 1, "duration_hr": "long",
                      "environment": {"preset": "moon/surface"}}]})");
              }),
              "mission.phases[0].duration_hr");
    EXPECT_EQ(config_error_field([] {
                  io::parse_mission(R"({"phases": [{"distance_m": 1, "duration_hr": 1,
                      "environment": {"preset": "pluto/surface"}}]})");
              }),
              "mission.phases[0].environment.preset");
    EXPECT_EQ(config_error_field([] {
                  io::parse_mission(R"({"phases": [{"distance_m": 1, "duration_hr": 1, "speed": 3,
                      "environment": {"preset": "moon/surface"}}]})");
              }),
              "mission.phases[0].speed");
    EXPECT_EQ(config_error_field([] {
                  io::parse_mission(R"({"robot_count": 0, "phases": [{"distance_m": 1, "duration_hr": 1,
                      "environment": {"preset": "moon/surface"}}]})");
              }),
              "mission.robot_count");
}

TEST(Mission, ShippedScenariosParse) {
    const auto s1 = io::parse_mission(io::read_file(root + "/scenarios/scenario1.json")).mission;
    EXPECT_EQ(s1.total_distance(), 1000.0);
    EXPECT_EQ(s1.total_duration(), 5.0);
    const auto s2 = io::parse_mission(io::read_file(root + "/scenarios/scenario2.json")).mission;
    ASSERT_EQ(s2.phases.size(), 3u);
    EXPECT_EQ(s2.phases[2].environment.dose_rate, 0.0);
    EXPECT_EQ(s2.phases[2].environment.ambient_temperature, 250.0);
    EXPECT_EQ(s2.longest_leg(), 2000.0);
    EXPECT_NO_THROW(io::parse_bounds(io::read_file(root + "/scenarios/bounds.json")));
    EXPECT_NO_THROW(io::parse_weights(io::read_file(root + "/scenarios/weights.json")));
    const auto grid = io::parse_grid(io::read_file(root + "/scenarios/comparative_grid.json"));
    EXPECT_EQ(grid.distances, (std::vector<double>{100, 1000, 4000}));
    EXPECT_EQ(grid.durations, (std::vector<double>{0.5, 5, 20}));
}

TEST(BoundsAndWeights, DefaultsAndValidation) {
    const auto b = io::parse_bounds(R"({"mass_kg": [2, 10]})");
    EXPECT_EQ(b.mass[0], 2.0);
    EXPECT_EQ(b.radius[1], 0.30);
    EXPECT_EQ(config_error_field([] { io::parse_bounds(R"({"mass_kg": [10, 2]})"); }), "bounds");
    EXPECT_EQ(config_error_field([] { io::parse_bounds(R"({"mass": [1, 2]})"); }), "bounds.mass");
    const auto w = io::parse_weights(R"({"a1": 0.25, "a2": 0.75})");
    EXPECT_EQ(w.a2, 0.75);
    EXPECT_EQ(w.a3, 0.5);
    EXPECT_EQ(config_error_field([] { io::parse_weights(R"({"a1": 0.9})"); }), "weights");
}

TEST(Grid, AxesMustIncrease) {
    EXPECT_EQ(config_error_field([] { io::parse_grid(R"({"distances_m": [10, 5], "durations_hr": [1]})"); }),
              "grid.distances_m");
    EXPECT_EQ(config_error_field([] { io::parse_grid(R"({"distances_m": [10], "durations_hr": []})"); }),
              "grid.durations_hr");
    EXPECT_EQ(config_error_field([] {
                  io::parse_grid(R"({"distances_m": [10], "durations_hr": [1], "avionics": {"c_ID": 0}})");
              }),
              "grid.avionics.c_ID");
    const auto g = io::parse_grid(R"({"distances_m": [10], "durations_hr": [1], "reserve": {"mass_kg": 2}})");
    EXPECT_EQ(g.setup.reserve.mass, 2.0);
    EXPECT_EQ(g.setup.reserve.power, 10.0);
}

TEST(Csv, CompareRows) {
    using disciplines::PowerType;
    using disciplines::Propellant;
    sysopt::ComparativeResult ok;
    ok.feasible = true;
    ok.mass = 2.5;
    ok.radius = 0.125;
    const std::vector<io::CompareRow> rows{{100, 0.5, Propellant::rp1_h2o2, PowerType::battery, ok},
                                           {100, 0.5, Propellant::steam, PowerType::fuel_cell, {}}};
    const auto l = lines(io::compare_csv(rows));
    ASSERT_EQ(l.size(), 3u);
    EXPECT_EQ(l[0], "distance_m,duration_hr,propellant,power_type,total_mass_kg,radius_m");
    EXPECT_EQ(l[1].rfind("100,0.5,RP1_H2O2,battery,2.5,0.125", 0), 0u) << l[1];
    EXPECT_EQ(l[2], "100,0.5,steam,fuel_cell,INFEASIBLE,");
}

TEST(Csv, HistoryAndParetoHeaders) {
    const std::vector<sysopt::OptionCount> table{{0, "mobility.hopping", 40}, {1, "power.battery", 7}};
    EXPECT_EQ(io::history_csv(table), "generation,option,count\n0,mobility.hopping,40\n1,power.battery,7\n");
    const auto cols = io::pareto_columns();
    EXPECT_EQ(cols.size(), 12u + 4u + 1u + 21u + 3u);
    EXPECT_EQ(cols[12], "F1");
    EXPECT_EQ(cols.back(), "payload_power_w");
    const sysopt::ParetoFront empty;
    EXPECT_EQ(lines(io::pareto_csv(empty)).size(), 1u);
}

TEST(Files, MissingFileIsConfigError) {
    EXPECT_EQ(config_error_field([] { io::read_file("/nonexistent/mission.json", "mission"); }), "mission");
}
