#pragma once

// Self-test suites run by `hopdesign validate`. Each suite prints one line
// per check and reports whether all of them passed.

#include "benchmarks.hpp"
#include "indicators.hpp"
#include "nsga2.hpp"
#include "random.hpp"
#include "sqp.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace hopdesign::selftest {

// ---------------------------------------------------------------------------
// Reference implementations used as oracles

/// Peels fronts by repeated all-pairs scans: a member belongs to the current
/// front when nothing still unassigned dominates it.
inline std::vector<std::vector<std::size_t>> brute_force_fronts(const std::vector<std::vector<double>>& costs) {
    auto dom = [](const std::vector<double>& a, const std::vector<double>& b) {
        bool strict = false;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k] > b[k]) return false;
            strict = strict || a[k] < b[k];
        }
        return strict;
    };
    std::vector<bool> assigned(costs.size(), false);
    std::vector<std::vector<std::size_t>> fronts;
    std::size_t left = costs.size();
    while (left > 0) {
        std::vector<std::size_t> front;
        for (std::size_t i = 0; i < costs.size(); ++i) {
            if (assigned[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < costs.size() && !dominated; ++j)
                dominated = !assigned[j] && j != i && dom(costs[j], costs[i]);
            if (!dominated) front.push_back(i);
        }
        for (std::size_t i : front) assigned[i] = true;
        left -= front.size();
        fronts.push_back(std::move(front));
    }
    return fronts;
}

/// Crowding distance evaluated member by member: for each objective, the
/// nearest strictly-larger and strictly-smaller neighbours in a sorted
/// sequence of (value, index) pairs.
inline std::vector<double> reference_crowding(const std::vector<std::vector<double>>& f) {
    const std::size_t l = f.size();
    const double inf = std::numeric_limits<double>::infinity();
    if (l <= 2) return std::vector<double>(l, inf);
    std::vector<double> d(l, 0.0);
    for (std::size_t k = 0; k < f.front().size(); ++k) {
        std::vector<std::pair<double, std::size_t>> col;
        for (std::size_t i = 0; i < l; ++i) col.emplace_back(-f[i][k], i);
        std::sort(col.begin(), col.end());
        const double fmax = -col.front().first;
        const double fmin = -col.back().first;
        if (fmax == fmin) continue;
        for (std::size_t pos = 0; pos < l; ++pos) {
            const std::size_t i = col[pos].second;
            if (pos == 0 || pos == l - 1) {
                d[i] = inf;
                continue;
            }
            const double prev = -col[pos - 1].first;
            const double next = -col[pos + 1].first;
            d[i] += (prev - next) / (fmax - fmin);
        }
    }
    return d;
}

/// Random cost matrix with deliberate duplicates and coarse values so ties
/// occur.
inline std::vector<std::vector<double>> random_costs(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::vector<double>> costs(n, std::vector<double>(k));
    for (auto& c : costs)
        for (double& v : c) v = rng.coin(0.3) ? static_cast<double>(rng.uniform_int(0, 4)) : rng.uniform();
    if (n > 3) costs[n - 1] = costs[0];
    return costs;
}

// ---------------------------------------------------------------------------
// Suites

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

inline std::vector<Check> sorting_suite(std::size_t populations = 200, std::uint64_t seed = 2024) {
    Rng rng(seed);
    std::size_t partition_failures = 0;
    std::size_t crowding_failures = 0;
    double worst_crowding_error = 0.0;
    for (std::size_t p = 0; p < populations; ++p) {
        const std::size_t n = 1 + rng.index(50);
        const std::size_t k = 2 + rng.index(3);
        const auto costs = random_costs(rng, n, k);
        auto fast = nsga2::non_dominated_sort(costs).fronts;
        auto slow = brute_force_fronts(costs);
        for (auto& f : fast) std::sort(f.begin(), f.end());
        for (auto& f : slow) std::sort(f.begin(), f.end());
        if (fast != slow) ++partition_failures;

        for (const auto& front : fast) {
            std::vector<std::vector<double>> fc;
            for (std::size_t i : front) fc.push_back(costs[i]);
            const auto a = nsga2::crowding_distance(fc);
            const auto b = reference_crowding(fc);
            bool ok = a.size() == b.size();
            for (std::size_t i = 0; ok && i < a.size(); ++i) {
                if (std::isinf(a[i]) || std::isinf(b[i])) {
                    ok = std::isinf(a[i]) && std::isinf(b[i]);
                } else {
                    worst_crowding_error = std::max(worst_crowding_error, std::abs(a[i] - b[i]));
                    ok = std::abs(a[i] - b[i]) <= 1e-12;
                }
            }
            if (!ok) ++crowding_failures;
        }
    }
    return {
        {"partition matches all-pairs oracle", partition_failures == 0,
         std::to_string(partition_failures) + " of " + std::to_string(populations) + " populations differ"},
        {"crowding matches reference to 1e-12", crowding_failures == 0,
         "max abs error " + std::to_string(worst_crowding_error)},
    };
}

inline std::vector<Check> sqp_suite() {
    using sqp::Vector;
    std::vector<Check> out;

    {
        sqp::Nlp nlp;
        nlp.dimension = 2;
        nlp.objective = [](const Vector& x) { return x.squaredNorm(); };
        nlp.equality = [](const Vector& x) { return Vector::Constant(1, x[0] + x[1] - 1.0); };
        Vector d0(2);
        d0 << 3.0, -2.0;
        const auto rep = sqp::solve(nlp, d0);
        const bool ok = rep.converged && rep.kkt_residual_norm <= 1e-6 && rep.iterations <= 20 &&
                        std::abs(rep.solution.d[0] - 0.5) <= 1e-6 && std::abs(rep.solution.d[1] - 0.5) <= 1e-6;
        out.push_back({"equality-constrained quadratic", ok,
                       "d=(" + std::to_string(rep.solution.d[0]) + ", " + std::to_string(rep.solution.d[1]) +
                           "), iterations " + std::to_string(rep.iterations)});
    }
    {
        sqp::Nlp nlp;
        nlp.dimension = 1;
        nlp.objective = [](const Vector& x) { return (x[0] - 2.0) * (x[0] - 2.0); };
        nlp.inequality = [](const Vector& x) { return Vector::Constant(1, x[0] - 1.0); };
        const auto rep = sqp::solve(nlp, Vector::Zero(1));
        const bool ok = rep.converged && std::abs(rep.solution.d[0] - 1.0) <= 1e-6 &&
                        std::abs(rep.solution.mu[0] - 2.0) <= 1e-6;
        out.push_back({"bound-constrained quadratic", ok,
                       "x=" + std::to_string(rep.solution.d[0]) + ", mu=" + std::to_string(rep.solution.mu[0])});
    }
    {
        sqp::Nlp nlp;
        nlp.dimension = 2;
        nlp.objective = [](const Vector& x) {
            return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
        };
        Vector d0(2);
        d0 << -1.2, 1.0;
        sqp::SqpOptions options;
        options.max_iterations = 200;
        const auto rep = sqp::solve(nlp, d0, options);
        const bool ok = rep.converged && std::abs(rep.solution.d[0] - 1.0) <= 1e-4 &&
                        std::abs(rep.solution.d[1] - 1.0) <= 1e-4 && rep.iterations <= 200;
        out.push_back({"Rosenbrock", ok,
                       "d=(" + std::to_string(rep.solution.d[0]) + ", " + std::to_string(rep.solution.d[1]) +
                           "), iterations " + std::to_string(rep.iterations)});
    }
    return out;
}

inline std::vector<Check> zdt1_suite(std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5}, unsigned threads = 1) {
    std::vector<Check> out;
    for (std::uint64_t seed : seeds) {
        nsga2::GaParams params;
        params.population_size = 100;
        params.offspring_size = 100;
        params.max_generations = 250;
        params.seed = seed;
        params.threads = threads;
        const auto result = nsga2::evolve(benchmarks::Zdt1{}, params);
        const double distance = indicators::zdt1_mean_distance(result.front);
        out.push_back({"ZDT1 seed " + std::to_string(seed) + " mean front distance < 0.01", distance < 0.01,
                       "distance " + std::to_string(distance)});
    }
    return out;
}

inline std::vector<Check> schaffer_suite(std::uint64_t seed = 7) {
    nsga2::GaParams params;
    params.population_size = 60;
    params.offspring_size = 60;
    params.max_generations = 60;
    params.seed = seed;
    const auto result = nsga2::evolve(benchmarks::Schaffer{}, params);
    double worst = 0.0;
    for (const auto& ind : result.front) {
        const double x = ind.x.values[0];
        worst = std::max(worst, std::max(0.0, -x) + std::max(0.0, x - 2.0));
    }
    double lo = 2.0, hi = 0.0;
    for (const auto& ind : result.front) lo = std::min(lo, ind.x.values[0]), hi = std::max(hi, ind.x.values[0]);
    return {
        {"front lies in the optimal interval [0, 2]", worst <= 1e-3, "worst excursion " + std::to_string(worst)},
        {"front spans most of the optimal interval", lo <= 0.1 && hi >= 1.9,
         "span [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"},
    };
}

inline const std::map<std::string, std::function<std::vector<Check>()>>& suites() {
    static const std::map<std::string, std::function<std::vector<Check>()>> table{
        {"sorting", [] { return sorting_suite(); }},
        {"sqp", [] { return sqp_suite(); }},
        {"zdt1", [] { return zdt1_suite(); }},
        {"schaffer", [] { return schaffer_suite(); }},
    };
    return table;
}

inline bool report(const std::vector<Check>& checks, std::ostream& os) {
    bool all = true;
    for (const auto& c : checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) os << " (" << c.detail << ")";
        os << '\n';
        all = all && c.pass;
    }
    return all;
}

}  // namespace hopdesign::selftest
