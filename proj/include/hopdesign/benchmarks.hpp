#pragma once

// Standard test problems for the genetic algorithm.

#include "nsga2.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace hopdesign::benchmarks {

/// ZDT1: convex front f2 = 1 - sqrt(f1) reached when x[1..] = 0.
struct Zdt1 {
    std::size_t n = 30;

    nsga2::DesignSpace design_space() const {
        return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), std::vector<bool>(n, false)};
    }

    nsga2::Evaluation evaluate(std::span<const double> x) const {
        double tail = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i) tail += x[i];
        const double g = 1.0 + 9.0 * tail / static_cast<double>(x.size() - 1);
        const double f1 = x[0];
        return {{f1, g * (1.0 - std::sqrt(f1 / g))}, 0.0};
    }
};

/// Schaffer's first problem: f1 = x^2, f2 = (x-2)^2, optimal x in [0, 2].
struct Schaffer {
    nsga2::DesignSpace design_space() const { return {{-10.0}, {10.0}, {false}}; }

    nsga2::Evaluation evaluate(std::span<const double> x) const {
        return {{x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0)}, 0.0};
    }
};

/// Two-objective problem with two linear inequalities cutting the box.
struct Constr {
    nsga2::DesignSpace design_space() const { return {{0.1, 0.0}, {1.0, 5.0}, {false, false}}; }

    static std::vector<double> constraints(std::span<const double> x) {
        return {6.0 - (x[1] + 9.0 * x[0]), 1.0 + x[1] - 9.0 * x[0]};
    }

    nsga2::Evaluation evaluate(std::span<const double> x) const {
        const auto g = constraints(x);
        return {{x[0], (1.0 + x[1]) / x[0]}, nsga2::violation_total(g, {})};
    }
};

struct Sphere {
    std::size_t n = 5;

    nsga2::DesignSpace design_space() const {
        return {std::vector<double>(n, -5.0), std::vector<double>(n, 5.0), std::vector<bool>(n, false)};
    }

    nsga2::Evaluation evaluate(std::span<const double> x) const {
        double s = 0.0;
        for (double v : x) s += v * v;
        return {{s}, 0.0};
    }
};

/// Every point violates g = 1 <= 0.
struct AlwaysInfeasible {
    nsga2::DesignSpace design_space() const { return {{0.0, 0.0}, {1.0, 1.0}, {false, false}}; }

    nsga2::Evaluation evaluate(std::span<const double> x) const {
        const double g[] = {1.0};
        return {{x[0], 1.0 - x[1]}, nsga2::violation_total(g, {})};
    }
};

}  // namespace hopdesign::benchmarks
