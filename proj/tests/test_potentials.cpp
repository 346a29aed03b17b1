#include <gtest/gtest.h>

#include <random>

#include "test_helpers.hpp"
#include "vdw/potentials.hpp"

using namespace vdw;
using namespace vdw::testing;

namespace {

AtomPair pair_at(double r, double omega_b = 0.99) {
    AtomPair p;
    p.omega_b = omega_b;
    p.sep = Separation::along_z(r);
    return p;
}

double u_aa(const AtomPair& p) {
    const CouplingU u(p);
    const auto a = alpha_tensor(p.sep);
    return u.contract(a, a).real();
}

} // namespace

// --- far field ------------------------------------------------------------------------------

TEST(FarField, CausalityIsExact) {
    for (double r : {3.0, 30.0, 300.0}) {
        const AtomPair p = pair_at(r);
        EXPECT_EQ(w_a_farfield(p, 0.9 * 2.0 * r), 0.0);
        EXPECT_EQ(w_b_farfield(p, 0.9 * r), 0.0);
        EXPECT_EQ(w_a_farfield(p, std::nextafter(2.0 * r, 0.0)), 0.0);
        EXPECT_NE(w_a_farfield(p, 2.0 * r), 0.0);  // closed interval at the threshold
        EXPECT_NE(w_b_farfield(p, r), 0.0);
    }
}

TEST(FarField, LongitudinalDipolesDecouple) {
    AtomPair p = pair_at(30.0);
    p.mu_a = {0.0, 0.0, 1.0};
    p.mu_b = {0.0, 0.0, 1.0};
    for (double t : {60.0, 100.0, 1000.0}) {
        EXPECT_EQ(w_a_farfield(p, t), 0.0);
        EXPECT_EQ(w_b_farfield(p, t), 0.0);
    }
}

// Reference values from tests/oracles/derive_values.py.
TEST(FarField, MatchesIndependentEvaluation) {
    const AtomPair p = pair_at(30.0);
    EXPECT_LT(rel_diff(w_a_farfield(p, 100.0), -0.00015744928629279298), 1e-12);
    EXPECT_LT(rel_diff(w_b_farfield(p, 100.0), 0.00017617092201258662), 1e-12);
}

TEST(FarField, GroundAtomBracketAtLightCone) {
    // At t = R the bracket reduces to k_A^2 (k_A^2 - k_B^2), which vanishes as k_B -> k_A.
    for (double wb : {0.99, 0.999, 0.9999}) {
        const AtomPair p = pair_at(30.0, wb);
        const double expected = u_aa(p) / (30.0 * 30.0) * (1.0 - wb * wb);
        EXPECT_LT(rel_diff(w_b_farfield(p, 30.0), expected), 1e-12);
        const double bracket = w_b_farfield(p, 30.0) / (u_aa(p) / (30.0 * 30.0));
        EXPECT_LT(bracket, 2.1 * p.detuning());
    }
}

TEST(FarField, RejectsNegativeTime) {
    EXPECT_THROW(w_a_farfield(pair_at(10.0), -1.0), DomainError);
    EXPECT_THROW(w_b_farfield(pair_at(10.0), -1.0), DomainError);
}

// --- quasistationary ------------------------------------------------------------------------

TEST(Quasistationary, MatchesIndependentContraction) {
    const AtomPair p = pair_at(2.0);
    EXPECT_LT(rel_diff(w_a_quasistationary(p), 0.057521657086529851), 1e-13);
    EXPECT_LT(rel_diff(w_b_quasistationary(p), 0.12863040892093662), 1e-13);
}

TEST(Quasistationary, BranchEquality) {
    std::mt19937_64 rng(99);
    for (int o = 0; o < 8; ++o) {
        AtomPair p;
        p.mu_a = random_unit(rng);
        p.mu_b = random_unit(rng);
        for (double kr = 0.1; kr <= 100.0; kr *= 1.37) {
            p.sep = Separation(kr * random_unit(rng));
            const auto a = w_a_quasistationary_branches(p);
            const auto b = w_b_quasistationary_branches(p);
            const double scale_a = std::abs(quasistationary_parts(p).re_re) + std::abs(quasistationary_parts(p).im_im);
            EXPECT_LT(std::abs(a.green - a.explicit_form), 1e-12 * scale_a) << "kR = " << kr;
            EXPECT_LT(rel_diff(b.green, b.explicit_form), 1e-12) << "kR = " << kr;
        }
    }
}

TEST(Quasistationary, SumAndDifferenceIdentities) {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 50; ++n) {
        AtomPair p;
        p.mu_a = random_unit(rng);
        p.mu_b = random_unit(rng);
        p.sep = Separation(std::uniform_real_distribution<double>(0.2, 80.0)(rng) * random_unit(rng));
        const auto parts = quasistationary_parts(p);
        const double sum = w_a_quasistationary(p) + w_b_quasistationary(p);
        const double diff = w_a_quasistationary(p) - w_b_quasistationary(p);
        EXPECT_LT(rel_diff(sum, 2.0 * parts.re_re), 1e-12);
        EXPECT_LT(rel_diff(diff, -2.0 * parts.im_im), 1e-12);
    }
}

TEST(Quasistationary, FlipsSignWithDetuning) {
    AtomPair p = pair_at(7.3);
    AtomPair q = p;
    q.omega_b = 1.01;
    EXPECT_LT(rel_diff(w_a_quasistationary(p), -w_a_quasistationary(q)), 1e-13);
    EXPECT_LT(rel_diff(w_b_quasistationary(p), -w_b_quasistationary(q)), 1e-13);
}

TEST(Quasistationary, GroundAtomPotentialIsMonotonicInSign) {
    for (double kr = 1.0; kr <= 100.0; kr += 0.05) EXPECT_GT(w_b_quasistationary(pair_at(kr)), 0.0) << kr;
    for (double kr = 1.0; kr <= 100.0; kr += 0.05) EXPECT_LT(w_b_quasistationary(pair_at(kr, 1.01)), 0.0) << kr;
}

// The full potential differs from its far-field term by a relative O(1/kR) correction,
// 2 tan(2kR) / kR for transverse dipoles at leading order.
TEST(Quasistationary, FarFieldTermIsTheLeadingOrder) {
    for (double kr : {50.0, 200.0, 1000.0, 5000.0}) {
        const AtomPair p = pair_at(kr);
        const double full = w_a_quasistationary(p), ff = w_a_quasistationary_farfield(p);
        const double bound = 2.0 * std::abs(std::tan(2.0 * kr)) / kr + 3.0 / (kr * kr);
        EXPECT_LT(rel_diff(full, ff), bound) << kr;
    }
    EXPECT_LT(rel_diff(w_a_quasistationary(pair_at(5000.0)), w_a_quasistationary_farfield(pair_at(5000.0))), 1e-3);
}

// --- identical atoms ------------------------------------------------------------------------

namespace {
ThreeLevelConfig ladder_at(double r) {
    ThreeLevelConfig c;
    c.sep = Separation::along_z(r);
    return c;
}
} // namespace

TEST(IdenticalAtoms, MatchesIndependentEvaluation) {
    const auto c = ladder_at(3.0);
    EXPECT_LT(rel_diff(shift_identical_e0(c), -0.1209367959957563), 1e-13);
    EXPECT_LT(rel_diff(shift_identical_eprime(c), -0.11504837927047937), 1e-13);
}

TEST(IdenticalAtoms, DifferenceIsImImContraction) {
    std::mt19937_64 rng(17);
    for (int n = 0; n < 40; ++n) {
        ThreeLevelConfig c;
        c.mu_minus = random_unit(rng);
        c.mu_plus = random_unit(rng);
        c.sep = Separation(std::uniform_real_distribution<double>(0.3, 100.0)(rng) * random_unit(rng));
        const double diff = shift_identical_e0(c) - shift_identical_eprime(c);
        EXPECT_LT(rel_diff(diff, identical_im_im(c)), 1e-12);
    }
}

TEST(IdenticalAtoms, FarFieldTrigIdentity) {
    for (double kr = 10.0; kr <= 100.0; kr += 0.37) {
        const auto c = ladder_at(kr);
        const double amp = identical_farfield_amplitude(c);
        const double resid = shift_identical_eprime_farfield(c) - 2.0 * shift_identical_e0_farfield(c) + amp;
        EXPECT_LT(std::abs(resid), 1e-10 * std::abs(amp)) << kr;
    }
}

TEST(IdenticalAtoms, FarFieldNodesAndSignChanges) {
    for (int n = 5; n < 30; ++n) {
        const double kr = pi / 2.0 + n * pi;
        const auto c = ladder_at(kr);
        EXPECT_LT(std::abs(shift_identical_e0_farfield(c)), 1e-28 + 1e-15 * std::abs(identical_farfield_amplitude(c)));
        const double before = shift_identical_eprime_farfield(ladder_at(kr + pi / 4.0 - 0.1));
        const double after = shift_identical_eprime_farfield(ladder_at(kr + pi / 4.0 + 0.1));
        EXPECT_LT(before * after, 0.0);
    }
}

// Full shift against the far-field form: relative corrections are O(tan(kR)/kR).
TEST(IdenticalAtoms, FarFieldFormIsTheLeadingOrder) {
    for (double kr : {40.0, 400.0, 40000.0}) {
        const auto c = ladder_at(kr);
        const double bound = 2.0 * std::abs(std::tan(kr)) / kr + 3.0 / (kr * kr);
        EXPECT_LT(rel_diff(shift_identical_e0(c), shift_identical_e0_farfield(c)), bound) << kr;
    }
    const auto far = ladder_at(40000.0);
    EXPECT_LT(rel_diff(shift_identical_e0(far), shift_identical_e0_farfield(far)), 1e-3);
}

// --- pulse excitation -----------------------------------------------------------------------

// Reference values from the delta-function reduction in tests/oracles/derive_values.py.
TEST(Pulse, MatchesIndependentTimeIntegrals) {
    EXPECT_LT(rel_diff(w_b_pulse(pair_at(2.0), PulseParams{0.1}, 40.0), 0.00637633374247572), 1e-10);
    EXPECT_LT(rel_diff(w_b_pulse(pair_at(10.0), PulseParams{0.1}, 60.0), 0.000498779909433101), 1e-10);
    EXPECT_LT(rel_diff(w_b_pulse(pair_at(3.0), PulseParams{0.015}, 230.0), 0.044575037599728), 1e-10);
    EXPECT_LT(rel_diff(w_a_pulse(pair_at(10.0), PulseParams{0.1}, 60.0), 0.00151822432985307), 1e-10);
    EXPECT_LT(rel_diff(w_a_pulse(pair_at(2.0), PulseParams{0.1}, 40.0), -0.0199556690354755), 1e-10);
}

TEST(Pulse, AdiabaticLimit) {
    AtomPair p = pair_at(10.0);
    p.gamma_a = 1e-9;
    const PulseParams pulse{1e-4 * p.detuning()};
    const double t = pulse.duration() + 123.0;
    EXPECT_LT(rel_diff(w_a_pulse(p, pulse, t), w_a_quasistationary(p) * std::exp(-p.gamma_a * t)), 1e-7);
    EXPECT_LT(rel_diff(w_b_pulse(p, pulse, t), w_b_quasistationary(p) * std::exp(-p.gamma_a * t)), 1e-7);
}

TEST(Pulse, IrreversibleTransferLimit) {
    AtomPair p = pair_at(10.0);
    const PulseParams pulse{0.1 * p.detuning()};
    const double t = pulse.duration() + 50.0;
    p.gamma_b = 50.0 / t;
    p.gamma_a = 1e-3 / t;
    const double adiabatic_a = w_a_quasistationary(p) * std::exp(-p.gamma_a * t);
    const double adiabatic_b = w_b_quasistationary(p) * std::exp(-p.gamma_a * t);
    const double bound = std::exp(-0.5 * p.gamma_b * t);
    EXPECT_LT(std::abs(w_a_pulse(p, pulse, t) - adiabatic_a), bound * std::abs(adiabatic_a));
    EXPECT_LT(std::abs(w_b_pulse(p, pulse, t) - adiabatic_b), bound * std::abs(adiabatic_b));
}

TEST(Pulse, CausalityAndPulseCompletion) {
    const AtomPair p = pair_at(10.0);
    const PulseParams pulse{0.1};  // duration 31.4
    EXPECT_EQ(w_a_pulse(p, pulse, 25.0), 0.0);  // after 2R, before the pulse ends
    EXPECT_EQ(w_b_pulse(p, pulse, 25.0), 0.0);
    EXPECT_EQ(w_a_pulse(p, PulseParams{1.0}, 19.0), 0.0);  // pulse over, before 2R
    EXPECT_EQ(w_b_pulse(p, PulseParams{1.0}, 9.0), 0.0);
    EXPECT_EQ(w_a_pulse_resonant(p, PulseParams{0.01}, 100.0), 0.0);
    EXPECT_NE(w_b_pulse(p, PulseParams{1.0}, 10.0), 0.0);
}

TEST(Pulse, ResonanceGuardRedirects) {
    const AtomPair p = pair_at(10.0);
    EXPECT_THROW(w_a_pulse(p, PulseParams{p.detuning()}, 500.0), ResonanceError);
    EXPECT_THROW(w_b_pulse(p, PulseParams{p.detuning() * (1.0 + 1e-8)}, 500.0), ResonanceError);
    EXPECT_NO_THROW(w_a_pulse(p, PulseParams{p.detuning() * (1.0 + 1e-4)}, 500.0));
}

TEST(Pulse, ResonantBranchIsTheLimitOfTheGeneralForm) {
    for (double wb : {0.99, 1.01}) {
        const AtomPair p = pair_at(10.0, wb);
        const double d = std::abs(p.detuning());
        const double t = 400.0;
        for (double eps : {1e-4, -1e-4}) {
            const PulseParams near{d * (1.0 + eps)};
            const PulseParams exact{d};
            EXPECT_LT(rel_diff(w_a_pulse(p, near, t), w_a_pulse_resonant(p, exact, t)), 2e-3);
            EXPECT_LT(rel_diff(w_b_pulse(p, near, t), w_b_pulse_resonant(p, exact, t)), 2e-3);
        }
    }
}

TEST(Pulse, ResonantBranchIsPeriodicWithoutDamping) {
    const AtomPair p = pair_at(10.0);
    const PulseParams pulse{p.detuning()};
    const double t = 400.0, period = 2.0 * pi / pulse.rabi;
    EXPECT_LT(rel_diff(w_a_pulse_resonant(p, pulse, t), w_a_pulse_resonant(p, pulse, t + period)), 1e-11);
    EXPECT_LT(rel_diff(w_b_pulse_resonant(p, pulse, t), w_b_pulse_resonant(p, pulse, t + period)), 1e-11);
}

TEST(Pulse, ResonantBranchAtSineNodeAndReImNode) {
    // Find kR where the Re G Im G contraction at k_B vanishes; with Omega t = m pi only the
    // adiabatic term remains.
    AtomPair p = pair_at(10.0);
    auto re_im = [&](double r) {
        const auto g = green_dyadic(Separation::along_z(r), p.k_b());
        const cplx s = g.sandwich(p.mu_a, p.mu_b);
        return s.real() * s.imag();
    };
    double lo = 10.0, hi = 10.0;
    while (re_im(lo) * re_im(hi + 0.01) > 0.0) hi += 0.01;
    hi += 0.01;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (re_im(lo) * re_im(mid) <= 0.0 ? hi : lo) = mid;
    }
    p.sep = Separation::along_z(0.5 * (lo + hi));
    const PulseParams pulse{p.detuning()};
    const double t = 20.0 * pi / pulse.rabi;  // Omega t = 20 pi, also >= 2R and >= pi / Omega
    EXPECT_LT(rel_diff(w_a_pulse_resonant(p, pulse, t), w_a_quasistationary(p)), 1e-9);
}

TEST(Pulse, AdiabaticScalingSlope) {
    const AtomPair p = pair_at(10.0);
    std::vector<double> xs, ys;
    // Omega / Delta = 1 / (2m): the pulse lasts m detuning periods, so the transient phase at
    // t = pi / Omega + s is the same at every grid point.
    for (int m : {5, 10, 20, 50, 100, 200, 500}) {
        const double ratio = 1.0 / (2.0 * m);
        const PulseParams pulse{ratio * p.detuning()};
        const double t = pulse.duration() + 40.0;
        xs.push_back(std::log(ratio));
        ys.push_back(std::log(std::abs(w_a_pulse(p, pulse, t) - w_a_quasistationary(p))));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    EXPECT_NEAR(sxy / sxx, 2.0, 0.05);
}

// --- force ----------------------------------------------------------------------------------

// Reference from tests/oracles/derive_values.py: -d/dR of U aa k^4 cos(2kR)/R^2 at R = 50.3.
TEST(Force, MatchesAnalyticDerivativeOfFarFieldTerm) {
    const AtomPair p = pair_at(50.3);
    const auto f = vdw_force(Atom::A, p, [](const AtomPair& q) { return w_a_quasistationary_farfield(q); }, 1e-3);
    EXPECT_LT(rel_diff(f.force[2], 4.44584058904806e-5), 1e-4);
    EXPECT_LT(std::abs(f.force[0]) + std::abs(f.force[1]), 1e-12 * std::abs(f.force[2]));
    const auto fb = vdw_force(Atom::B, p, [](const AtomPair& q) { return w_a_quasistationary_farfield(q); }, 1e-3);
    EXPECT_LT(rel_diff(fb.force[2], -f.force[2]), 1e-12);
}

TEST(Force, RadialForIsotropicallyAveragedDipoles) {
    // Independent average over orthogonal orientations of both dipoles; only radial dependence remains.
    const Vec3 r{1.3, -2.1, 4.4};
    auto averaged = [](const AtomPair& q) {
        double v = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                AtomPair a = q;
                a.mu_a = {0, 0, 0};
                a.mu_b = {0, 0, 0};
                a.mu_a[i] = 1.0;
                a.mu_b[j] = 1.0;
                v += w_b_quasistationary(a) / 9.0;
            }
        return v;
    };
    AtomPair p;
    p.sep = Separation(r);
    const auto f = vdw_force(Atom::A, p, averaged, 1e-4);
    const Vec3 u = p.sep.unit();
    const Vec3 perp = f.force - dot(f.force, u) * u;
    EXPECT_LT(norm(perp), 1e-7 * norm(f.force));
}

TEST(Force, ZeroBeforeLightCone) {
    const AtomPair p = pair_at(30.0);
    const auto f = vdw_force(Atom::A, p, [](const AtomPair& q) { return w_a_farfield(q, 40.0); }, 1e-3);
    EXPECT_EQ(norm(f.force), 0.0);
}

TEST(Force, RichardsonCheckFlagsBadStep) {
    const AtomPair p = pair_at(50.3);
    EXPECT_THROW(vdw_force(Atom::A, p, [](const AtomPair& q) { return w_a_quasistationary_farfield(q); }, 2.0),
                 ConvergenceError);
    EXPECT_THROW(vdw_force(Atom::A, p, [](const AtomPair& q) { return w_a_quasistationary(q); }, -1.0), DomainError);
}

// --- validation -----------------------------------------------------------------------------

TEST(Validation, Warnings) {
    AtomPair p = pair_at(3.0);
    EXPECT_FALSE(validate(p).any());
    EXPECT_TRUE(far_field_warning(p).has(Warning::not_far_field));
    p.omega_b = 0.5;
    EXPECT_TRUE(validate(p).has(Warning::not_quasiresonant));
    p.omega_b = 0.99;
    p.gamma_a = p.gamma_b = 0.01;
    EXPECT_TRUE(validate(p).has(Warning::detuning_vs_linewidth));
    EXPECT_TRUE(validate(PulseParams{0.5}, p).has(Warning::strong_pulse));
    ThreeLevelConfig c;
    c.omega_plus = 2.5;
    EXPECT_TRUE(validate(c).has(Warning::ladder_detuning));
    EXPECT_EQ(Warnings().to_string(), "-");
    EXPECT_EQ((Warnings(Warning::strong_pulse) | Warning::not_far_field).to_string(), "not_far_field|strong_pulse");
}

TEST(Validation, HardErrors) {
    AtomPair p;
    p.omega_b = p.omega_a;
    EXPECT_THROW(validate(p), DomainError);
    EXPECT_THROW(CouplingU{p}, DomainError);
    p.omega_b = -1.0;
    EXPECT_THROW(validate(p), DomainError);
    EXPECT_THROW(validate(PulseParams{0.0}, AtomPair{}), DomainError);
    ThreeLevelConfig c;
    c.omega_plus = 0.5;
    EXPECT_THROW(validate(c), DomainError);
}

TEST(CouplingTensor, SignFollowsDetuning) {
    AtomPair p;
    p.mu_a = {0.3, -0.2, 0.9};
    p.mu_b = {0.1, 0.7, -0.4};
    AtomPair q = p;
    q.omega_b = 1.01;
    const CouplingU u(p), v(q);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) EXPECT_DOUBLE_EQ(u(i, j, k, l), -v(i, j, k, l));
}

TEST(Potentials, OutputsFiniteOverRandomInputs) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int n = 0; n < 200; ++n) {
        AtomPair p;
        p.omega_b = 0.9 + 0.2 * uni(rng);
        if (p.omega_b == p.omega_a) continue;
        p.gamma_a = 1e-3 * uni(rng);
        p.gamma_b = 1e-3 * uni(rng);
        p.mu_a = random_unit(rng);
        p.mu_b = random_unit(rng);
        p.sep = Separation((0.5 + 50.0 * uni(rng)) * random_unit(rng));
        const double t = 200.0 * uni(rng);
        const PulseParams pulse{0.001 + 0.05 * uni(rng)};
        for (double v : {w_a_farfield(p, t), w_b_farfield(p, t), w_a_quasistationary(p), w_b_quasistationary(p)})
            EXPECT_TRUE(std::isfinite(v));
        if (std::abs(std::abs(pulse.rabi) - std::abs(p.detuning())) > 1e-3 * std::abs(p.detuning())) {
            EXPECT_TRUE(std::isfinite(w_a_pulse(p, pulse, t)));
            EXPECT_TRUE(std::isfinite(w_b_pulse(p, pulse, t)));
        }
    }
}
