#pragma once

// Front quality measures.

#include "nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hopdesign::indicators {

namespace detail {

inline double hypervolume_2d(std::vector<std::vector<double>> pts, const std::vector<double>& ref) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
    double volume = 0.0;
    double best_y = ref[1];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        best_y = std::min(best_y, pts[i][1]);
        const double next_x = (i + 1 < pts.size()) ? pts[i + 1][0] : ref[0];
        volume += (next_x - pts[i][0]) * (ref[1] - best_y);
    }
    return volume;
}

// Slices along the last objective and recurses on the prefix of points
// below each slab.
inline double hypervolume_rec(std::vector<std::vector<double>> pts, const std::vector<double>& ref, std::size_t k) {
    if (pts.empty()) return 0.0;
    if (k == 1) {
        double lo = ref[0];
        for (const auto& p : pts) lo = std::min(lo, p[0]);
        return ref[0] - lo;
    }
    if (k == 2) return hypervolume_2d(std::move(pts), ref);
    std::sort(pts.begin(), pts.end(), [k](const auto& a, const auto& b) { return a[k - 1] < b[k - 1]; });
    double volume = 0.0;
    std::vector<std::vector<double>> slab;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        slab.push_back(pts[i]);
        const double next = (i + 1 < pts.size()) ? pts[i + 1][k - 1] : ref[k - 1];
        const double depth = next - pts[i][k - 1];
        if (depth > 0.0) volume += depth * hypervolume_rec(slab, ref, k - 1);
    }
    return volume;
}

}  // namespace detail

/// Exact hypervolume dominated by `points` and bounded by `reference`
/// (minimization). Points not strictly better than the reference in every
/// objective contribute nothing.
inline double hypervolume(const std::vector<std::vector<double>>& points, const std::vector<double>& reference) {
    std::vector<std::vector<double>> kept;
    for (const auto& p : points) {
        if (p.size() != reference.size()) throw std::invalid_argument("hypervolume: dimension mismatch");
        bool inside = true;
        for (std::size_t k = 0; k < p.size(); ++k) inside = inside && p[k] < reference[k];
        if (inside) kept.push_back(p);
    }
    if (kept.empty()) return 0.0;
    const auto partition = nsga2::non_dominated_sort(kept);
    std::vector<std::vector<double>> front;
    for (std::size_t i : partition.fronts.front()) front.push_back(kept[i]);
    std::sort(front.begin(), front.end());
    front.erase(std::unique(front.begin(), front.end()), front.end());
    return detail::hypervolume_rec(std::move(front), reference, reference.size());
}

/// Penalized costs of the feasible individuals of a population.
inline std::vector<std::vector<double>> feasible_costs(const nsga2::Population& pop) {
    std::vector<std::vector<double>> out;
    for (const auto& ind : pop)
        if (ind.violation == 0.0) out.push_back(ind.penalized);
    return out;
}

/// Euclidean distance from (f1, f2) to the curve f2 = 1 - sqrt(f1), f1 in [0, 1].
inline double distance_to_zdt1_front(double f1, double f2) {
    auto d2 = [&](double t) {
        const double a = t - f1;
        const double b = 1.0 - std::sqrt(t) - f2;
        return a * a + b * b;
    };
    constexpr int samples = 2000;
    int best = 0;
    double best_value = d2(0.0);
    for (int i = 1; i <= samples; ++i) {
        const double v = d2(static_cast<double>(i) / samples);
        if (v < best_value) best_value = v, best = i;
    }
    double lo = std::max(0.0, (best - 1.0) / samples);
    double hi = std::min(1.0, (best + 1.0) / samples);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100; ++it) {
        const double a = hi - phi * (hi - lo);
        const double b = lo + phi * (hi - lo);
        if (d2(a) < d2(b))
            hi = b;
        else
            lo = a;
    }
    return std::sqrt(std::min(best_value, d2(0.5 * (lo + hi))));
}

/// Mean distance of a two-objective front to the analytic ZDT1 front.
inline double zdt1_mean_distance(const nsga2::Population& front) {
    if (front.empty()) throw std::invalid_argument("zdt1_mean_distance: empty front");
    double sum = 0.0;
    for (const auto& ind : front) sum += distance_to_zdt1_front(ind.objectives[0], ind.objectives[1]);
    return sum / static_cast<double>(front.size());
}

}  // namespace hopdesign::indicators
