#pragma once

// Elitist non-dominated sorting genetic algorithm for constrained
// multi-objective problems over mixed real/integer design vectors.
//
// Constraints are handled by the penalty transform: every objective is
// shifted by penalty * total_violation before any sorting, so the GA itself
// only ever compares penalized cost vectors.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hopdesign/random.hpp"

namespace hopdesign::nsga2 {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Bounds and integrality mask shared by every design vector of a problem.
struct DesignSpace {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<bool> integrality;

    std::size_t size() const { return lower.size(); }

    void validate() const {
        if (upper.size() != lower.size() || integrality.size() != lower.size())
            throw std::invalid_argument("design space: lower, upper and integrality lengths differ");
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (!(lower[j] <= upper[j]))
                throw std::invalid_argument("design space: lower > upper at index " + std::to_string(j));
            if (integrality[j] && (lower[j] != std::round(lower[j]) || upper[j] != std::round(upper[j])))
                throw std::invalid_argument("design space: integer variable with fractional bound at index " +
                                            std::to_string(j));
        }
    }

    /// Clamp to bounds, then round integer coordinates to the nearest integer.
    double repair(std::size_t j, double v) const {
        v = std::clamp(v, lower[j], upper[j]);
        if (integrality[j]) v = std::round(v);
        return v;
    }
};

struct DesignVector {
    std::vector<double> values;
    std::shared_ptr<const DesignSpace> space;

    std::size_t size() const { return values.size(); }
    double lower(std::size_t j) const { return space->lower[j]; }
    double upper(std::size_t j) const { return space->upper[j]; }
    bool is_integer(std::size_t j) const { return space->integrality[j]; }

    bool is_valid() const {
        if (!space || values.size() != space->size()) return false;
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (!(values[j] >= lower(j) && values[j] <= upper(j))) return false;
            if (is_integer(j) && values[j] != std::round(values[j])) return false;
        }
        return true;
    }
};

struct Individual {
    DesignVector x;
    std::vector<double> objectives;
    double violation = 0.0;
    std::vector<double> penalized;
    int rank = 0;
    double crowding = 0.0;
};

using Population = std::vector<Individual>;

inline Individual unevaluated(DesignVector x) {
    Individual ind;
    ind.x = std::move(x);
    return ind;
}

struct GaParams {
    std::size_t population_size = 100;
    std::size_t offspring_size = 100;
    std::size_t max_generations = 100;
    double blx_alpha = 0.5;
    double mutation_b = 5.0;
    double crossover_probability = 0.9;
    // Negative means 1/J (one expected mutation per design vector).
    double mutation_probability = -1.0;
    double penalty = 1e6;
    std::uint64_t seed = 1;
    // Worker threads for evaluation; never changes results.
    unsigned threads = 1;

    void validate() const {
        if (population_size < 4) throw std::invalid_argument("population_size must be >= 4");
        if (offspring_size < 1) throw std::invalid_argument("offspring_size must be >= 1");
        if (max_generations < 1) throw std::invalid_argument("max_generations must be >= 1");
        if (!(mutation_b > 0.0)) throw std::invalid_argument("mutation_b must be positive");
        if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
        if (!(crossover_probability >= 0.0 && crossover_probability <= 1.0))
            throw std::invalid_argument("crossover_probability must lie in [0,1]");
        if (mutation_probability > 1.0) throw std::invalid_argument("mutation_probability must lie in [0,1]");
    }

    double mutation_rate(std::size_t dimension) const {
        return mutation_probability >= 0.0 ? mutation_probability : 1.0 / static_cast<double>(dimension);
    }
};

struct FrontPartition {
    std::vector<std::vector<std::size_t>> fronts;
};

/// What a problem returns for one design vector.
struct Evaluation {
    std::vector<double> objectives;
    double violation = 0.0;
};

template <class P>
concept MultiObjectiveProblem = requires(const P& p, std::span<const double> x) {
    { p.design_space() } -> std::convertible_to<DesignSpace>;
    { p.evaluate(x) } -> std::convertible_to<Evaluation>;
};

template <class P>
concept CustomInitialization = requires(const P& p, Rng& rng) {
    { p.initialize(rng) } -> std::convertible_to<std::vector<double>>;
};

class EvaluationError : public std::runtime_error {
  public:
    EvaluationError(std::size_t generation, std::size_t index, const std::string& what)
        : std::runtime_error("evaluation failed at generation " + std::to_string(generation) + ", individual " +
                             std::to_string(index) + ": " + what),
          generation_(generation),
          index_(index) {}

    std::size_t generation() const { return generation_; }
    std::size_t index() const { return index_; }

  private:
    std::size_t generation_;
    std::size_t index_;
};

// ---------------------------------------------------------------------------
// Constraint handling

/// Total violation: positive parts of inequalities g <= 0 plus magnitudes of
/// equalities h = 0.
inline double violation_total(std::span<const double> g_values, std::span<const double> h_values) {
    double total = 0.0;
    for (double g : g_values)
        if (g > 0.0) total += std::abs(g);
    for (double h : h_values) total += std::abs(h);
    return total;
}

inline std::vector<double> penalize(std::span<const double> objectives, double violation, double penalty) {
    std::vector<double> out(objectives.begin(), objectives.end());
    if (violation == 0.0) return out;
    for (double& v : out) v += penalty * violation;
    return out;
}

// ---------------------------------------------------------------------------
// Sorting and density

inline bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dominates: cost vectors differ in length");
    bool strictly_better = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strictly_better = true;
    }
    return strictly_better;
}

/// Fast non-dominated sort on raw cost vectors. Fronts list indices in
/// ascending order.
inline FrontPartition non_dominated_sort(const std::vector<std::vector<double>>& costs) {
    FrontPartition out;
    const std::size_t n = costs.size();
    if (n == 0) return out;

    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(costs[i], costs[j])) {
                dominated_by_me[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(costs[j], costs[i])) {
                dominated_by_me[j].push_back(i);
                ++domination_count[i];
            }
        }
    }

    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (domination_count[i] == 0) current.push_back(i);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current)
            for (std::size_t j : dominated_by_me[i])
                if (--domination_count[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        out.fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return out;
}

/// Sorts a population on its penalized costs and writes each member's rank
/// (first front has rank 1).
inline FrontPartition non_dominated_sort(Population& population) {
    std::vector<std::vector<double>> costs;
    costs.reserve(population.size());
    for (const auto& ind : population) costs.push_back(ind.penalized);
    if (!costs.empty())
        for (const auto& c : costs)
            if (c.size() != costs.front().size())
                throw std::invalid_argument("non_dominated_sort: penalized costs differ in length");
    FrontPartition partition = non_dominated_sort(costs);
    for (std::size_t f = 0; f < partition.fronts.size(); ++f)
        for (std::size_t i : partition.fronts[f]) population[i].rank = static_cast<int>(f + 1);
    return partition;
}

/// Crowding distance of every member of one front. Boundary members of each
/// objective get +infinity; an objective on which the whole front ties adds
/// nothing.
inline std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front_costs) {
    const std::size_t l = front_costs.size();
    if (l <= 2) return std::vector<double>(l, infinity);
    const std::size_t k_count = front_costs.front().size();
    std::vector<double> d(l, 0.0);
    std::vector<std::size_t> order(l);
    for (std::size_t k = 0; k < k_count; ++k) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // worst (largest) first; index breaks ties so the result is deterministic
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (front_costs[a][k] != front_costs[b][k]) return front_costs[a][k] > front_costs[b][k];
            return a < b;
        });
        const double hi = front_costs[order.front()][k];
        const double lo = front_costs[order.back()][k];
        const double range = hi - lo;
        if (!(range > 0.0)) continue;
        d[order.front()] = infinity;
        d[order.back()] = infinity;
        for (std::size_t j = 1; j + 1 < l; ++j) {
            const double gap = front_costs[order[j - 1]][k] - front_costs[order[j + 1]][k];
            d[order[j]] += gap / range;
        }
    }
    return d;
}

inline void assign_crowding(Population& population, const FrontPartition& partition) {
    for (const auto& front : partition.fronts) {
        std::vector<std::vector<double>> costs;
        costs.reserve(front.size());
        for (std::size_t i : front) costs.push_back(population[i].penalized);
        const auto d = crowding_distance(costs);
        for (std::size_t m = 0; m < front.size(); ++m) population[front[m]].crowding = d[m];
    }
}

/// Strict crowded-comparison order: lower rank wins, then larger crowding.
inline bool crowded_better(const Individual& a, const Individual& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowding > b.crowding;
}

inline const Individual& crowded_tournament(const Individual& a, const Individual& b, Rng& rng) {
    if (crowded_better(a, b)) return a;
    if (crowded_better(b, a)) return b;
    return rng.coin() ? a : b;
}

// ---------------------------------------------------------------------------
// Variation operators

/// Blend crossover with explicit uniform draws, one per coordinate.
inline DesignVector blx_blend(const DesignVector& p1, const DesignVector& p2, double alpha, std::span<const double> u) {
    if (p1.size() != p2.size() || u.size() != p1.size())
        throw std::invalid_argument("blx_blend: parent and draw lengths differ");
    DesignVector child{std::vector<double>(p1.size()), p1.space};
    for (std::size_t j = 0; j < p1.size(); ++j) {
        const double gamma = (1.0 + 2.0 * alpha) * u[j] - alpha;
        const double v = (1.0 - gamma) * p1.values[j] + gamma * p2.values[j];
        child.values[j] = p1.space->repair(j, v);
    }
    return child;
}

inline DesignVector blx_crossover(const DesignVector& p1, const DesignVector& p2, double alpha, Rng& rng) {
    std::vector<double> u(p1.size());
    for (double& v : u) v = rng.uniform_closed();
    return blx_blend(p1, p2, alpha, u);
}

/// Non-uniform perturbation of one coordinate. direction is +1 or -1; the
/// magnitude collapses to zero as generation approaches max_generation.
inline double nonuniform_perturb(double value, double lower, double upper, double generation, double max_generation,
                                 double b, int direction, double u) {
    const double exponent = std::pow(1.0 - generation / max_generation, b);
    const double magnitude = (upper - lower) * (1.0 - std::pow(u, exponent));
    return value + static_cast<double>(direction) * magnitude;
}

inline DesignVector nonuniform_mutate(const DesignVector& x, std::size_t generation, const GaParams& params, Rng& rng) {
    if (generation > params.max_generations) throw std::invalid_argument("nonuniform_mutate: generation > max");
    DesignVector out = x;
    const double rate = params.mutation_rate(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!rng.coin(rate)) continue;
        const int direction = rng.coin() ? 1 : -1;
        const double u = rng.uniform_closed();
        const double v = nonuniform_perturb(x.values[j], x.lower(j), x.upper(j), static_cast<double>(generation),
                                            static_cast<double>(params.max_generations), params.mutation_b, direction,
                                            u);
        out.values[j] = x.space->repair(j, v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Survival

/// Next parent population from the combined one: whole fronts in rank order,
/// the last admitted front truncated by descending crowding distance.
inline Population survival_select(Population combined, std::size_t n) {
    if (combined.size() < n) throw std::invalid_argument("survival_select: fewer candidates than slots");
    const FrontPartition partition = non_dominated_sort(combined);
    assign_crowding(combined, partition);

    Population next;
    next.reserve(n);
    for (const auto& front : partition.fronts) {
        if (next.size() + front.size() <= n) {
            for (std::size_t i : front) next.push_back(combined[i]);
            if (next.size() == n) break;
            continue;
        }
        std::vector<std::size_t> last = front;
        std::stable_sort(last.begin(), last.end(),
                         [&](std::size_t a, std::size_t b) { return combined[a].crowding > combined[b].crowding; });
        for (std::size_t m = 0; next.size() < n; ++m) next.push_back(combined[last[m]]);
        break;
    }
    return next;
}

// ---------------------------------------------------------------------------
// Driver

struct EvolutionResult {
    Population front;
    // Parent population of every generation, index 0 being the initial one.
    std::vector<Population> history;
};

namespace detail {

template <MultiObjectiveProblem Problem>
void evaluate_all(const Problem& problem, Population& pop, std::size_t begin, const GaParams& params,
                  std::size_t generation) {
    const std::size_t count = pop.size() - begin;
    std::vector<std::exception_ptr> errors(count);

    auto work = [&](std::size_t m) {
        Individual& ind = pop[begin + m];
        try {
            Evaluation e = problem.evaluate(std::span<const double>(ind.x.values));
            if (!(e.violation >= 0.0)) throw std::runtime_error("negative or NaN constraint violation");
            ind.objectives = std::move(e.objectives);
            ind.violation = e.violation;
            ind.penalized = penalize(ind.objectives, ind.violation, params.penalty);
        } catch (...) {
            errors[m] = std::current_exception();
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(params.threads, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (std::size_t m = 0; m < count; ++m) work(m);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t m = next++; m < count; m = next++) work(m);
            });
    }

    for (std::size_t m = 0; m < count; ++m) {
        if (!errors[m]) continue;
        try {
            std::rethrow_exception(errors[m]);
        } catch (const std::exception& e) {
            throw EvaluationError(generation, begin + m, e.what());
        } catch (...) {
            throw EvaluationError(generation, begin + m, "unknown error");
        }
    }
}

inline void rank_and_crowd(Population& pop) {
    const auto partition = non_dominated_sort(pop);
    assign_crowding(pop, partition);
}

}  // namespace detail

template <MultiObjectiveProblem Problem>
DesignVector random_design(const Problem& problem, const std::shared_ptr<const DesignSpace>& space, Rng& rng) {
    if constexpr (CustomInitialization<Problem>) {
        DesignVector x{problem.initialize(rng), space};
        for (std::size_t j = 0; j < x.size(); ++j) x.values[j] = space->repair(j, x.values[j]);
        return x;
    } else {
        DesignVector x{std::vector<double>(space->size()), space};
        for (std::size_t j = 0; j < space->size(); ++j) {
            if (space->integrality[j])
                x.values[j] = static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(space->lower[j]),
                                                                  static_cast<std::int64_t>(space->upper[j])));
            else
                x.values[j] = rng.uniform(space->lower[j], space->upper[j]);
        }
        return x;
    }
}

/// Runs the full elitist loop for max_generations generations.
template <MultiObjectiveProblem Problem>
EvolutionResult evolve(const Problem& problem, const GaParams& params) {
    params.validate();
    auto space = std::make_shared<const DesignSpace>(problem.design_space());
    space->validate();
    if (space->size() == 0) throw std::invalid_argument("evolve: empty design space");

    Rng rng(params.seed);
    EvolutionResult result;

    Population parents;
    parents.reserve(params.population_size);
    for (std::size_t i = 0; i < params.population_size; ++i) parents.push_back(unevaluated(random_design(problem, space, rng)));
    detail::evaluate_all(problem, parents, 0, params, 0);
    detail::rank_and_crowd(parents);
    result.history.push_back(parents);

    for (std::size_t t = 0; t < params.max_generations; ++t) {
        Population combined = parents;
        combined.reserve(params.population_size + params.offspring_size);
        while (combined.size() < params.population_size + params.offspring_size) {
            // Draws are sequenced explicitly; argument evaluation order is unspecified.
            auto pick = [&]() -> const Individual& {
                const std::size_t i = rng.index(parents.size());
                const std::size_t j = rng.index(parents.size());
                return crowded_tournament(parents[i], parents[j], rng);
            };
            const Individual& a = pick();
            const Individual& b = pick();
            DesignVector c1 = a.x;
            DesignVector c2 = b.x;
            if (rng.coin(params.crossover_probability)) {
                c1 = blx_crossover(a.x, b.x, params.blx_alpha, rng);
                c2 = blx_crossover(b.x, a.x, params.blx_alpha, rng);
            }
            combined.push_back(unevaluated(nonuniform_mutate(c1, t, params, rng)));
            if (combined.size() < params.population_size + params.offspring_size)
                combined.push_back(unevaluated(nonuniform_mutate(c2, t, params, rng)));
        }
        detail::evaluate_all(problem, combined, params.population_size, params, t + 1);
        parents = survival_select(std::move(combined), params.population_size);
        detail::rank_and_crowd(parents);
        result.history.push_back(parents);
    }

    for (const auto& ind : parents)
        if (ind.rank == 1) result.front.push_back(ind);
    return result;
}

}  // namespace hopdesign::nsga2
