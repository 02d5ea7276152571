#pragma once

// System-level design problem: the 12-variable encoding, the coupled
// subsystem analysis, objectives F1..F4 with constraints G1..G5, the
// genetic-algorithm driver and the two-variable minimum-mass study.
//
// Design vector layout:
//   0 m [kg]   1 r [m]   2 P [W]
//   3 mobility mode   4 hop subtype   5 propellant   6 power type
//   7 computer   8 power board   9 battery   10 transceiver   11 attitude board

#include "cots.hpp"
#include "disciplines.hpp"
#include "indicators.hpp"
#include "nsga2.hpp"
#include "parameters.hpp"
#include "random.hpp"
#include "sqp.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hopdesign::sysopt {

using disciplines::CotsIds;
using disciplines::DisciplineBudget;
using disciplines::MissionSpec;
using disciplines::MobilityConfig;
using disciplines::MobilityMode;
using disciplines::HopSubtype;
using disciplines::PowerType;
using disciplines::Propellant;

inline constexpr std::size_t design_dimension = 12;

struct SystemBounds {
    std::array<double, 2> mass{1.0, 20.0};     // kg
    std::array<double, 2> radius{0.05, 0.30};  // m
    std::array<double, 2> power{5.0, 100.0};   // W

    void validate() const {
        if (!(mass[0] > 0.0 && mass[0] < mass[1])) throw std::invalid_argument("bounds.mass: need 0 < lower < upper");
        if (!(radius[0] > 0.0 && radius[0] < radius[1]))
            throw std::invalid_argument("bounds.radius: need 0 < lower < upper");
        if (!(power[0] > 0.0 && power[0] < power[1])) throw std::invalid_argument("bounds.power: need 0 < lower < upper");
    }
};

struct ObjectiveWeights {
    double a1 = 0.5, a2 = 0.5, a3 = 0.5, a4 = 0.5;

    void validate() const {
        for (double a : {a1, a2, a3, a4})
            if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("weights: each weight must lie in [0, 1]");
        if (std::abs(a1 + a2 - 1.0) > 1e-12) throw std::invalid_argument("weights: a1 + a2 must equal 1");
        if (std::abs(a3 + a4 - 1.0) > 1e-12) throw std::invalid_argument("weights: a3 + a4 must equal 1");
    }
};

/// Optional component requirements, each folded into the violation as a
/// relative shortfall.
struct ExtraConstraints {
    std::optional<double> min_clock_mhz;
    std::optional<double> min_storage_gb;
    std::optional<double> min_battery_capacity_wh;
};

struct Normalized {
    double m, r, P;
};

inline double unit_map(double v, const std::array<double, 2>& b, const char* name) {
    if (!(v >= b[0] && v <= b[1]))
        throw std::out_of_range(std::string("normalize: ") + name + " outside its bounds");
    return (v - b[0]) / (b[1] - b[0]);
}

inline Normalized normalize(double m, double r, double P, const SystemBounds& b) {
    return {unit_map(m, b.mass, "m"), unit_map(r, b.radius, "r"), unit_map(P, b.power, "P")};
}

inline std::array<double, 3> denormalize(const Normalized& n, const SystemBounds& b) {
    return {b.mass[0] + n.m * (b.mass[1] - b.mass[0]), b.radius[0] + n.r * (b.radius[1] - b.radius[0]),
            b.power[0] + n.P * (b.power[1] - b.power[0])};
}

struct SystemConfig {
    double m = 5.0;
    double r = 0.15;
    double P = 20.0;
    MobilityConfig mobility;
    PowerType power_type = PowerType::battery;
    CotsIds cots;
    bool operator==(const SystemConfig&) const = default;
};

namespace detail {

inline int enum_slot(double v, int hi, const char* name) {
    if (!(std::isfinite(v) && v == std::round(v) && v >= 1.0 && v <= hi))
        throw std::invalid_argument(std::string("decode: ") + name + " must be an integer in 1.." + std::to_string(hi));
    return static_cast<int>(v);
}

inline std::size_t category_count(const cots::Inventory* inv, cots::Category c) {
    return inv ? inv->count(c) : static_cast<std::size_t>(std::numeric_limits<int>::max());
}

}  // namespace detail

/// Inverse of encode. With an inventory, COTS ids are range-checked too.
inline SystemConfig decode(std::span<const double> x, const cots::Inventory* inv = nullptr) {
    using cots::Category;
    if (x.size() != design_dimension) throw std::invalid_argument("decode: expected 12 design variables");
    SystemConfig c;
    c.m = x[0];
    c.r = x[1];
    c.P = x[2];
    c.mobility.mode = static_cast<MobilityMode>(detail::enum_slot(x[3], 3, "ms_ID"));
    c.mobility.hop_subtype = static_cast<HopSubtype>(detail::enum_slot(x[4], 3, "sd_1"));
    c.mobility.propellant = static_cast<Propellant>(detail::enum_slot(x[5], 3, "sd_2"));
    c.power_type = static_cast<PowerType>(detail::enum_slot(x[6], 2, "ps_ID"));
    auto id = [&](std::size_t j, Category cat, const char* name) {
        return detail::enum_slot(x[j], static_cast<int>(detail::category_count(inv, cat)), name);
    };
    c.cots.computer = id(7, Category::computer, "c_ID");
    c.cots.power_board = id(8, Category::power_board, "p_ID");
    c.cots.battery = id(9, Category::battery, "b_ID");
    c.cots.transceiver = id(10, Category::transceiver, "t_ID");
    c.cots.attitude_board = id(11, Category::attitude_board, "a_ID");
    return c;
}

inline std::vector<double> encode(const SystemConfig& c) {
    return {c.m,
            c.r,
            c.P,
            static_cast<double>(c.mobility.mode),
            static_cast<double>(c.mobility.hop_subtype),
            static_cast<double>(c.mobility.propellant),
            static_cast<double>(c.power_type),
            static_cast<double>(c.cots.computer),
            static_cast<double>(c.cots.power_board),
            static_cast<double>(c.cots.battery),
            static_cast<double>(c.cots.transceiver),
            static_cast<double>(c.cots.attitude_board)};
}

inline nsga2::DesignSpace design_space(const SystemBounds& b, const cots::Inventory& inv) {
    using cots::Category;
    auto n = [&](Category c) { return static_cast<double>(inv.count(c)); };
    nsga2::DesignSpace s;
    s.lower = {b.mass[0], b.radius[0], b.power[0], 1, 1, 1, 1, 1, 1, 1, 1, 1};
    s.upper = {b.mass[1],
               b.radius[1],
               b.power[1],
               3,
               3,
               3,
               2,
               n(Category::computer),
               n(Category::power_board),
               n(Category::battery),
               n(Category::transceiver),
               n(Category::attitude_board)};
    s.integrality = {false, false, false, true, true, true, true, true, true, true, true, true};
    return s;
}

/// One uniformly drawn design: m, r, P over their bounds, then each
/// enumeration and COTS id over its range, in layout order.
inline std::vector<double> sample_design(const SystemBounds& b, const cots::Inventory& inv, Rng& rng) {
    const auto space = design_space(b, inv);
    std::vector<double> x(design_dimension);
    for (std::size_t j = 0; j < design_dimension; ++j)
        x[j] = space.integrality[j] ? static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(space.lower[j]),
                                                                           static_cast<std::int64_t>(space.upper[j])))
                                    : rng.uniform(space.lower[j], space.upper[j]);
    return x;
}

inline std::vector<std::vector<double>> init_population(std::size_t n, const SystemBounds& b,
                                                        const cots::Inventory& inv, Rng& rng) {
    if (n < 1) throw std::invalid_argument("init_population: n must be at least 1");
    std::vector<std::vector<double>> pop;
    pop.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pop.push_back(sample_design(b, inv, rng));
    return pop;
}

// ---------------------------------------------------------------- coupled analysis

inline const std::array<const char*, 7>& discipline_names() {
    static const std::array<const char*, 7> names{"shell",    "avionics", "comm",     "mobility",
                                                  "power",    "thermal",  "shielding"};
    return names;
}

struct Analysis {
    // In discipline_names() order.
    std::array<DisciplineBudget, 7> budgets;
    double shell_inertia = 0.0;
    double m_sys = 0.0, V_sys = 0.0, P_sys = 0.0;
    double power_available = 0.0;  // P used for sizing; equals the design P unless a reserve is imposed
    double energy_wh = 0.0;
    int coupling_iterations = 0;
    bool coupling_converged = false;
    double coupling_change = 0.0;  // |m_sys change| at the last iteration, kg

    const DisciplineBudget& budget(std::string_view name) const {
        for (std::size_t i = 0; i < budgets.size(); ++i)
            if (name == discipline_names()[i]) return budgets[i];
        throw std::out_of_range("no discipline named " + std::string(name));
    }
    bool all_feasible() const {
        for (const auto& b : budgets)
            if (!b.feasible) return false;
        return true;
    }
};

/// Runs every discipline and iterates the loop between power demand,
/// fuel-cell waste heat, heater power and stored energy to a fixed point.
/// With `power_reserve`, the available power is P_sys + reserve instead of
/// the configured P.
inline Analysis analyze(const SystemConfig& c, const MissionSpec& mission, const cots::Inventory& inv,
                        const ModelParameters& k, std::optional<double> power_reserve = std::nullopt) {
    using namespace disciplines;
    Analysis a;
    auto& [shell, avionics, comm, mobility, power, thermal, shielding] = a.budgets;

    const auto sr = shell_design(c.r, ShellMaterial::from(k), c.m, k.landing_deceleration_g);
    shell = sr.budget;
    a.shell_inertia = sr.inertia;
    avionics = avionics_select(c.cots, inv);
    comm = comm_design(mission.robot_count, mission.longest_leg(), inv.get(cots::Category::transceiver, c.cots.transceiver),
                       c.r, k);
    mobility = mobility_design(c.mobility, mission, c.m, c.r, k);
    shielding = shielding_design_mission(mission, c.r, k);

    const double fixed_w = avionics.power + comm.power + mobility.power;
    const double duration = mission.total_duration();
    const double damping = k.coupling_damping;
    const int max_iter = static_cast<int>(k.coupling_max_iterations);

    double P = power_reserve ? fixed_w + *power_reserve : c.P;
    double energy = P * duration;
    double previous = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= max_iter; ++it) {
        power = power_design(c.power_type, energy, P, k);
        const double heat = fixed_w + power.power + power.coupling("waste_heat_w");
        thermal = thermal_design_mission(mission, heat, c.r, k);
        const double base_w = fixed_w + power.power;
        const double p_sys = base_w + thermal.power;
        const double p_new = power_reserve ? p_sys + *power_reserve : c.P;
        const double payload_w = std::max(0.0, p_new - p_sys);
        const double e_new = (base_w + payload_w) * duration + thermal.coupling("heater_energy_wh");

        double m_sys = 0.0;
        for (const auto& b : a.budgets) m_sys += b.mass;
        a.coupling_iterations = it;
        a.coupling_change = std::abs(m_sys - previous);
        a.energy_wh = energy;
        a.power_available = P;
        if (a.coupling_change < k.coupling_tolerance_kg && std::abs(e_new - energy) <= 1e-9 * std::max(1.0, e_new) &&
            std::abs(p_new - P) <= 1e-9 * std::max(1.0, p_new)) {
            a.coupling_converged = true;
            break;
        }
        previous = m_sys;
        // first pass is undamped so that a loop without feedback settles at once
        const double w = it == 1 ? 1.0 : damping;
        energy += w * (e_new - energy);
        P += w * (p_new - P);
    }

    a.m_sys = a.V_sys = a.P_sys = 0.0;
    for (const auto& b : a.budgets) {
        a.m_sys += b.mass;
        a.V_sys += b.volume;
        a.P_sys += b.power;
    }
    return a;
}

// ---------------------------------------------------------------- evaluation

struct Payload {
    double mass = 0.0, volume = 0.0, power = 0.0;
};
struct Ratios {
    double m_r = 0.0, V_r = 0.0, P_r = 0.0;
};

inline const std::vector<std::string>& constraint_names() {
    static const std::vector<std::string> names{"G1_mass_ratio", "G2_volume_ratio", "G3_power_ratio",
                                                "G4_assembly",   "G5_bandwidth",    "min_clock",
                                                "min_storage",   "min_battery_capacity"};
    return names;
}

/// Violation assigned when the disciplines cannot be evaluated at all.
inline constexpr double failure_violation = 1e9;

struct EvaluationRecord {
    SystemConfig config;
    Analysis analysis;
    Payload payload;
    Ratios ratios;
    std::array<double, 4> objectives{1.0, 1.0, 1.0, 1.0};
    std::vector<double> constraints;  // g <= 0 form, constraint_names() order
    int index = 0;
    double violation = 0.0;
    std::string error;

    bool feasible() const { return violation == 0.0; }
};

/// Shortfall of the antenna resonance from the shrunk band, in band widths.
inline double bandwidth_violation(const cots::CotsRecord& t, double f_mhz) {
    if (cots::bandwidth_check(t, f_mhz)) return 0.0;
    const double half = 0.5 * t.spec("bandwidth_mhz");
    const double lo = t.spec("freq_low_mhz") + half, hi = t.spec("freq_high_mhz") - half;
    const double outside = f_mhz < lo ? lo - f_mhz : f_mhz - hi;
    return std::max(outside, 1e-12) / (t.spec("freq_high_mhz") - t.spec("freq_low_mhz"));
}

inline EvaluationRecord evaluate(std::span<const double> x, const MissionSpec& mission, const cots::Inventory& inv,
                                 const SystemBounds& bounds, const ObjectiveWeights& w,
                                 const ExtraConstraints& extra = {}, const ModelParameters& k = {}) {
    EvaluationRecord rec;
    try {
        rec.config = decode(x, &inv);
        const auto& c = rec.config;
        const auto n = normalize(c.m, c.r, c.P, bounds);
        rec.analysis = analyze(c, mission, inv, k);
        const auto& a = rec.analysis;

        const double V = disciplines::sphere_volume(c.r);
        rec.payload = {c.m - a.m_sys, V - a.V_sys, c.P - a.P_sys};
        rec.ratios = {rec.payload.mass / c.m, rec.payload.volume / V, rec.payload.power / c.P};
        rec.objectives = {w.a1 * n.m + w.a2 * n.r, 1.0 - (w.a3 * rec.ratios.m_r + w.a4 * rec.ratios.V_r), n.P,
                          1.0 - rec.ratios.P_r};

        rec.index = disciplines::assembly_index(a.budgets, c.m, c.r, c.P, k.packing_fraction);
        if (!a.coupling_converged) rec.index = 0;
        const auto& transceiver = inv.get(cots::Category::transceiver, c.cots.transceiver);
        const double f_r = a.budget("comm").coupling("antenna_frequency_mhz");
        const auto& av = a.budget("avionics");
        auto shortfall = [](const std::optional<double>& need, double have) {
            return need && *need > 0.0 ? (*need - have) / *need : 0.0;
        };
        rec.constraints = {-rec.ratios.m_r,
                           -rec.ratios.V_r,
                           -rec.ratios.P_r,
                           1.0 - rec.index,
                           bandwidth_violation(transceiver, f_r),
                           shortfall(extra.min_clock_mhz, av.coupling("clock_mhz")),
                           shortfall(extra.min_storage_gb, av.coupling("storage_gb")),
                           shortfall(extra.min_battery_capacity_wh, av.coupling("battery_capacity_wh"))};
        rec.violation = nsga2::violation_total(rec.constraints, {});
        for (double v : rec.objectives)
            if (!std::isfinite(v)) throw std::runtime_error("non-finite objective");
        if (!std::isfinite(rec.violation)) throw std::runtime_error("non-finite violation");
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.objectives = {1.0, 1.0, 1.0, 1.0};
        rec.constraints.assign(constraint_names().size(), 0.0);
        rec.violation = failure_violation;
        rec.index = 0;
    }
    return rec;
}

/// Adapter handing the system problem to the genetic algorithm.
struct SystemProblem {
    const MissionSpec* mission;
    const cots::Inventory* inventory;
    SystemBounds bounds;
    ObjectiveWeights weights;
    ExtraConstraints extra;
    ModelParameters params;

    nsga2::DesignSpace design_space() const { return sysopt::design_space(bounds, *inventory); }

    nsga2::Evaluation evaluate(std::span<const double> x) const {
        const auto rec = sysopt::evaluate(x, *mission, *inventory, bounds, weights, extra, params);
        return {{rec.objectives.begin(), rec.objectives.end()}, rec.violation};
    }

    std::vector<double> initialize(Rng& rng) const { return sample_design(bounds, *inventory, rng); }

    EvaluationRecord record(std::span<const double> x) const {
        return sysopt::evaluate(x, *mission, *inventory, bounds, weights, extra, params);
    }
};

// ---------------------------------------------------------------- selection history

struct OptionCount {
    std::size_t generation;
    std::string option;
    std::size_t count;
};

/// Option labels in table order: variable.value for ms_ID, sd_1, sd_2, ps_ID.
inline const std::vector<std::pair<std::size_t, std::vector<std::string>>>& tallied_options() {
    static const std::vector<std::pair<std::size_t, std::vector<std::string>>> opts{
        {3, {"mobility.hopping", "mobility.rolling", "mobility.wheeled"}},
        {4, {"hop_subtype.propulsive", "hop_subtype.mechanical", "hop_subtype.reaction_wheel"}},
        {5, {"propellant.H2_O2", "propellant.RP1_H2O2", "propellant.steam"}},
        {6, {"power.battery", "power.fuel_cell"}},
    };
    return opts;
}

/// Raw tallies of each categorical gene value in every parent population.
inline std::vector<OptionCount> selection_history(const std::vector<nsga2::Population>& history) {
    if (history.empty()) throw std::invalid_argument("selection_history: empty history");
    std::vector<OptionCount> out;
    for (std::size_t t = 0; t < history.size(); ++t)
        for (const auto& [slot, labels] : tallied_options()) {
            std::vector<std::size_t> counts(labels.size(), 0);
            for (const auto& ind : history[t]) {
                const auto v = static_cast<std::size_t>(ind.x.values[slot]);
                if (v >= 1 && v <= labels.size()) ++counts[v - 1];
            }
            for (std::size_t o = 0; o < labels.size(); ++o) out.push_back({t, labels[o], counts[o]});
        }
    return out;
}

inline std::size_t option_count(const std::vector<OptionCount>& table, std::size_t generation,
                                const std::string& option) {
    for (const auto& row : table)
        if (row.generation == generation && row.option == option) return row.count;
    throw std::out_of_range("no tally for " + option + " at generation " + std::to_string(generation));
}

// ---------------------------------------------------------------- driver

struct ParetoFront {
    std::vector<nsga2::Individual> members;
    std::vector<EvaluationRecord> records;  // one per member, same order
    std::vector<OptionCount> history;
    nsga2::EvolutionResult evolution;
};

struct RunSettings {
    SystemBounds bounds;
    ObjectiveWeights weights;
    ExtraConstraints extra;
    nsga2::GaParams ga;
};

inline ParetoFront run_system_optimization(const MissionSpec& mission, const cots::Inventory& inv,
                                           const ModelParameters& params, const RunSettings& s) {
    mission.validate();
    s.bounds.validate();
    s.weights.validate();
    const SystemProblem problem{&mission, &inv, s.bounds, s.weights, s.extra, params};
    ParetoFront front;
    front.evolution = nsga2::evolve(problem, s.ga);
    front.members = front.evolution.front;
    for (const auto& ind : front.members) front.records.push_back(problem.record(ind.x.values));
    front.history = selection_history(front.evolution.history);
    return front;
}

/// Hypervolume of the feasible non-dominated raw costs of each parent population.
inline std::vector<double> hypervolume_history(const std::vector<nsga2::Population>& history,
                                               const std::vector<double>& reference) {
    std::vector<double> out;
    for (const auto& pop : history) out.push_back(indicators::hypervolume(indicators::feasible_costs(pop), reference));
    return out;
}

// ---------------------------------------------------------------- minimum-mass study

struct PayloadReserve {
    double mass = 1.0;     // kg
    double volume = 1e-5;  // m^3
    double power = 10.0;   // W
};

struct ComparativeCombo {
    Propellant propellant = Propellant::rp1_h2o2;
    PowerType power_type = PowerType::battery;
};

struct ComparativeResult {
    bool feasible = false;
    double mass = 0.0;  // kg
    double radius = 0.0;
    double mass_residual = 0.0;  // m - m_T
    int starts_converged = 0;
    std::string message;
};

struct ComparativeSetup {
    disciplines::Environment environment = disciplines::environment_lookup(disciplines::Body::moon,
                                                                           disciplines::Setting::surface);
    CotsIds avionics;  // fixed components
    PayloadReserve reserve;
    SystemBounds bounds;
    int robot_count = 1;
};

/// Equality-constrained minimum-mass problem over (m, r): the design mass
/// must equal the summed subsystem mass plus the payload reserve, with
/// packing, antenna fit and battery capacity as smooth inequalities.
struct MassClosure {
    ComparativeCombo combo;
    MissionSpec mission;
    const cots::Inventory* inventory;
    ModelParameters params;
    ComparativeSetup setup;

    SystemConfig config(double m, double r) const {
        SystemConfig c;
        c.m = m;
        c.r = r;
        c.mobility = {MobilityMode::hopping, HopSubtype::propulsive, combo.propellant};
        c.power_type = combo.power_type;
        c.cots = setup.avionics;
        return c;
    }

    Analysis analysis(double m, double r) const {
        return analyze(config(m, r), mission, *inventory, params, setup.reserve.power);
    }

    double total_mass(const Analysis& a) const { return a.m_sys + setup.reserve.mass; }

    /// [packing in litres, antenna excess in m, battery fill fraction - 1]
    sqp::Vector inequalities(const Analysis& a, double r) const {
        const auto& t = inventory->get(cots::Category::transceiver, setup.avionics.transceiver);
        sqp::Vector g(3);
        g[0] = 1e3 * (a.V_sys + setup.reserve.volume - params.packing_fraction * disciplines::sphere_volume(r));
        g[1] = disciplines::quarter_wave_length(disciplines::band_center_mhz(t)) - params.antenna_length_ratio * r;
        g[2] = combo.power_type == PowerType::battery
                   ? a.budget("power").coupling("stored_energy_wh") / params.battery_max_energy_wh - 1.0
                   : -1.0;
        return g;
    }

    sqp::Nlp nlp() const {
        sqp::Nlp n;
        n.dimension = 2;
        n.objective = [](const sqp::Vector& d) { return d[0]; };
        n.equality = [self = *this](const sqp::Vector& d) {
            sqp::Vector h(1);
            h[0] = d[0] - self.total_mass(self.analysis(d[0], d[1]));
            return h;
        };
        n.inequality = [self = *this](const sqp::Vector& d) { return self.inequalities(self.analysis(d[0], d[1]), d[1]); };
        sqp::Vector lo(2), hi(2);
        lo << setup.bounds.mass[0], setup.bounds.radius[0];
        hi << setup.bounds.mass[1], setup.bounds.radius[1];
        return sqp::with_side_constraints(std::move(n), lo, hi);
    }

    /// Feasible when every discipline is, the closure and inequalities hold
    /// to 1e-6, and the assembly sums fit.
    bool acceptable(double m, double r, std::string* why = nullptr) const {
        const auto a = analysis(m, r);
        auto fail = [&](std::string s) {
            if (why) *why = std::move(s);
            return false;
        };
        for (std::size_t i = 0; i < a.budgets.size(); ++i) {
            if (i == 2 || i == 4) continue;  // antenna fit and battery size are checked below with tolerance
            if (!a.budgets[i].feasible) return fail(std::string(discipline_names()[i]) + ": " + a.budgets[i].reason);
        }
        if (!a.coupling_converged) return fail("coupling loop did not converge");
        if (std::abs(m - total_mass(a)) > 1e-6) return fail("mass closure not met");
        const auto g = inequalities(a, r);
        if (g.maxCoeff() > 1e-6) return fail("packing, antenna or battery limit exceeded");
        const auto& comm = a.budget("comm");
        if (comm.coupling("link_margin_db") < 0.0) return fail("link does not close");
        return true;
    }
};

inline ComparativeResult comparative_mass_min(const ComparativeCombo& combo, double distance, double duration,
                                              const cots::Inventory& inv, const ModelParameters& params = {},
                                              const ComparativeSetup& setup = {}) {
    MassClosure closure{combo, disciplines::single_phase(distance, duration, setup.environment, setup.robot_count),
                        &inv, params, setup};
    const auto problem = closure.nlp();
    ComparativeResult best;
    best.message = "no feasible point across starts";
    std::string last_reason;
    for (double r0 : {0.1, 0.2})
        for (double m0 : {2.0, 4.0, 8.0, 16.0}) {
            sqp::Vector d0(2);
            d0 << std::clamp(m0, setup.bounds.mass[0], setup.bounds.mass[1]),
                std::clamp(r0, setup.bounds.radius[0], setup.bounds.radius[1]);
            sqp::SqpReport report;
            try {
                report = sqp::solve(problem, d0, {.tolerance = 1e-8, .max_iterations = 150});
            } catch (const std::exception& e) {
                last_reason = e.what();
                continue;
            }
            if (!report.converged) {
                last_reason = report.message;
                continue;
            }
            ++best.starts_converged;
            const double m = report.solution.d[0], r = report.solution.d[1];
            if (!closure.acceptable(m, r, &last_reason)) continue;
            const bool better = !best.feasible || m < best.mass - 1e-9 ||
                                (std::abs(m - best.mass) <= 1e-9 && r < best.radius);
            if (better) {
                best.feasible = true;
                best.mass = m;
                best.radius = r;
                best.mass_residual = m - closure.total_mass(closure.analysis(m, r));
                best.message = "converged";
            }
        }
    if (!best.feasible && !last_reason.empty()) best.message += " (last: " + last_reason + ")";
    return best;
}

}  // namespace hopdesign::sysopt
