#pragma once

// Composite Gauss-Legendre rules on panel grids that are uniform in the background and
// geometrically graded toward selected points.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vdw/errors.hpp"
#include "vdw/tensor.hpp"

namespace vdw {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("Gauss-Legendre order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

struct Grid {
    std::vector<double> x;
    std::vector<double> w;
    int level = 0;
    std::size_t size() const { return x.size(); }
};

/// Point of rapid variation: panels shrink geometrically from `width` / 4 around `center`.
struct GradedPoint {
    double center;
    double width;
};

struct PanelLayout {
    double lower = -1.0;
    double upper = 1.0;
    double panel_width = 0.1;          // background width before subdivision
    double window_half_width = 0.0;    // graded region around each point
    std::vector<GradedPoint> graded;
};

/// Sorted panel edges for the layout at refinement level 0.
inline std::vector<double> panel_edges(const PanelLayout& layout) {
    if (!(layout.upper > layout.lower) || !(layout.panel_width > 0.0))
        throw DomainError("invalid panel layout");
    std::vector<double> edges;
    const auto count = static_cast<long>(std::ceil((layout.upper - layout.lower) / layout.panel_width));
    const double h = (layout.upper - layout.lower) / static_cast<double>(count);
    for (long i = 0; i <= count; ++i) edges.push_back(layout.lower + h * static_cast<double>(i));
    for (const auto& g : layout.graded) {
        if (!(g.width > 0.0)) continue;
        if (g.center <= layout.lower || g.center >= layout.upper) continue;
        edges.push_back(g.center);
        for (double d = 0.25 * g.width; d < layout.window_half_width; d *= 2.0) {
            if (g.center - d > layout.lower) edges.push_back(g.center - d);
            if (g.center + d < layout.upper) edges.push_back(g.center + d);
        }
    }
    std::sort(edges.begin(), edges.end());
    std::vector<double> unique;
    for (double e : edges)
        if (unique.empty() || e - unique.back() > 1e-14 * std::max(1.0, std::abs(e))) unique.push_back(e);
    return unique;
}

/// Composite rule: each level-0 panel is split into 2^level equal sub-panels.
inline Grid make_grid(const std::vector<double>& edges, const GaussRule& rule, int level) {
    Grid grid;
    grid.level = level;
    const int split = 1 << level;
    grid.x.reserve((edges.size() - 1) * static_cast<std::size_t>(split) * rule.nodes.size());
    grid.w.reserve(grid.x.capacity());
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double sub = (edges[p + 1] - edges[p]) / split;
        for (int s = 0; s < split; ++s) {
            const double a = edges[p] + sub * s;
            const double half = 0.5 * sub, mid = a + half;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                grid.x.push_back(mid + half * rule.nodes[q]);
                grid.w.push_back(half * rule.weights[q]);
            }
        }
    }
    return grid;
}

/// Neville extrapolation of samples (x_i, y_i) to x = 0. Returns the diagonal of the tableau;
/// the last entry uses all points.
template <class T>
std::vector<T> neville_to_zero(const std::vector<double>& x, const std::vector<T>& y) {
    const std::size_t n = x.size();
    std::vector<T> p(y);
    std::vector<T> diagonal;
    diagonal.push_back(y.front());
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = n - 1; i >= level; --i) {
            const double xi = x[i], xj = x[i - level];
            p[i] = (xj * p[i] - xi * p[i - 1]) / (xj - xi);
            if (i == level) break;
        }
        diagonal.push_back(p[level]);
    }
    // diagonal[k] is the degree-k extrapolant through points 0..k.
    return diagonal;
}

} // namespace vdw
