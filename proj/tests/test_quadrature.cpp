#include <gtest/gtest.h>

#include <functional>

#include "test_helpers.hpp"
#include "vdw/oracle.hpp"
#include "vdw/potentials.hpp"
#include "vdw/quadrature.hpp"

using namespace vdw;
using namespace vdw::testing;

TEST(GaussLegendre, ExactForPolynomials) {
    for (int n : {1, 4, 16, 33}) {
        const auto rule = gauss_legendre(n);
        double wsum = 0.0;
        for (double w : rule.weights) wsum += w;
        EXPECT_NEAR(wsum, 2.0, 1e-14);
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            EXPECT_NEAR(s, exact, 1e-13) << "n " << n << " degree " << deg;
        }
    }
    EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(PanelLayoutTest, GradedEdgesAreSortedAndContainCenters) {
    PanelLayout layout;
    layout.lower = -3.0;
    layout.upper = 3.0;
    layout.panel_width = 0.5;
    layout.window_half_width = 0.2;
    layout.graded = {{1.0, 1e-3}, {-1.2345, 1e-4}};
    const auto edges = panel_edges(layout);
    EXPECT_DOUBLE_EQ(edges.front(), -3.0);
    EXPECT_DOUBLE_EQ(edges.back(), 3.0);
    for (std::size_t i = 1; i < edges.size(); ++i) EXPECT_LT(edges[i - 1], edges[i]);
    EXPECT_NE(std::find(edges.begin(), edges.end(), 1.0), edges.end());
    EXPECT_NE(std::find(edges.begin(), edges.end(), -1.2345), edges.end());
    layout.upper = layout.lower;
    EXPECT_THROW(panel_edges(layout), DomainError);
}

TEST(CompositeGrid, RefinementConvergesOnOscillatoryIntegrand) {
    const std::vector<double> edges{0.0, 1.0, 2.0, 5.0};
    const auto rule = gauss_legendre(8);
    const double exact = (std::cos(0.0) - std::cos(20.0 * 5.0)) / 20.0;
    double prev_err = 1.0;
    for (int level = 0; level < 6; ++level) {
        const Grid g = make_grid(edges, rule, level);
        EXPECT_EQ(g.size(), 3u * (1u << level) * 8u);
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += g.w[i] * std::sin(20.0 * g.x[i]);
        const double err = std::abs(s - exact);
        if (level >= 2) {
            EXPECT_LE(err, prev_err + 1e-15);
        }
        prev_err = err;
    }
    EXPECT_LT(prev_err, 1e-12);
}

TEST(Neville, ExactForPolynomialData) {
    const std::vector<double> x{0.08, 0.04, 0.02, 0.01};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 - 2.0 * v + 5.0 * v * v - v * v * v);
    const auto d = neville_to_zero(x, y);
    ASSERT_EQ(d.size(), 4u);
    EXPECT_NEAR(d.back(), 3.0, 1e-13);
    EXPECT_NEAR(d[1], (x[0] * y[1] - x[1] * y[0]) / (x[0] - x[1]), 1e-13);
}

TEST(QuadratureSpecTest, ValidationRules) {
    QuadratureSpec s = default_quadrature_spec(0.01);
    EXPECT_NO_THROW(validate(s));
    EXPECT_DOUBLE_EQ(s.eta, 1e-5);
    ASSERT_EQ(s.eta_sequence.size(), 4u);
    EXPECT_DOUBLE_EQ(s.eta_sequence.front(), 8e-5);
    s.grid_points = 32;
    EXPECT_THROW(validate(s), DomainError);
    s = default_quadrature_spec(0.01);
    s.eta_sequence = {1e-3, 2e-3};
    EXPECT_THROW(validate(s), DomainError);
    s.eta_sequence = {1e-3, -1e-4};
    EXPECT_THROW(validate(s), DomainError);
    s = default_quadrature_spec(0.01);
    s.eta = 0.0;
    EXPECT_THROW(validate(s), DomainError);
}

// --- time average ---------------------------------------------------------------------------

namespace {
std::vector<std::pair<double, double>> sample(double t0, double dt, int n, const std::function<double(double)>& f) {
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i <= n; ++i) s.emplace_back(t0 + dt * i, f(t0 + dt * i));
    return s;
}
} // namespace

TEST(TimeAverage, CosineAveragesToZero) {
    const double d = 0.01, period = 2.0 * pi / d;
    const auto s = sample(3.0, period / 64.0, 64 * 6, [&](double t) { return std::cos(d * t); });
    EXPECT_LT(std::abs(time_average(s, 5.0 * period, d)), 1e-10);
}

TEST(TimeAverage, ConstantIsPreserved) {
    const double d = 0.02, period = 2.0 * pi / d;
    const auto s = sample(0.0, period / 10.0, 60, [](double) { return 4.25; });
    EXPECT_NEAR(time_average(s, 5.0 * period, d), 4.25, 1e-14);
}

TEST(TimeAverage, FarFieldSeriesGivesStationaryTerm) {
    AtomPair p;
    p.sep = Separation::along_z(40.0);
    const double period = 2.0 * pi / p.detuning();
    const auto s = sample(100.0, period / 64.0, 64 * 10, [&](double t) { return w_a_farfield(p, t); });
    EXPECT_LT(rel_diff(time_average(s, 10.0 * period, p.detuning()), w_a_quasistationary_farfield(p)), 1e-6);
}

TEST(TimeAverage, RejectsShortWindowsAndBadSampling) {
    const double d = 0.01, period = 2.0 * pi / d;
    const auto s = sample(0.0, period / 16.0, 16 * 6, [](double t) { return t; });
    EXPECT_THROW(time_average(s, 0.5 * period, d), DomainError);
    EXPECT_THROW(time_average(s, 10.0 * period, d), DomainError);  // not covered
    EXPECT_THROW(time_average(s, 5.0 * period, 0.0), DomainError);
    auto uneven = s;
    uneven[3].first += 1.0;
    EXPECT_THROW(time_average(uneven, 5.0 * period, d), DomainError);
}
