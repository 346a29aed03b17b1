#pragma once

// Closed-form van der Waals potentials <W>/2, level shifts and phase-shift rates.
// All values are energies in natural units (hbar = c = eps0 = 1).

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "vdw/errors.hpp"
#include "vdw/params.hpp"
#include "vdw/tensor.hpp"

namespace vdw {

/// Heaviside step with theta(0) = 1.
inline double step(double x) { return x >= 0.0 ? 1.0 : 0.0; }

namespace detail {

inline void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("observation time must be finite and t >= 0");
}

/// U_ijpq contractions of the Green function at one or two frequencies.
struct GreenContractions {
    double re_re = 0.0;  // U Re G Re G
    double im_im = 0.0;  // U Im G Im G
    double re_im = 0.0;  // U Re G(first) Im G(second)
    double im_re = 0.0;  // U Im G(first) Re G(second)
};

inline GreenContractions contract_green(const CouplingU& u, const Separation& sep, double w1, double w2) {
    const ComplexDyadic g1 = green_dyadic(sep, w1);
    const ComplexDyadic g2 = green_dyadic(sep, w2);
    const ComplexDyadic re1 = g1.real_part(), im1 = g1.imag_part();
    const ComplexDyadic re2 = g2.real_part(), im2 = g2.imag_part();
    return {u.contract(re1, re2).real(), u.contract(im1, im2).real(), u.contract(re1, im2).real(),
            u.contract(im1, re2).real()};
}

inline double sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

} // namespace detail

// ---------------------------------------------------------------------------
// Far-field dynamical potentials after a sudden excitation of A.
// ---------------------------------------------------------------------------

/// <W_A(t)>/2 in the far field:
///   theta(t - 2R) U_ijpq a^ij a^pq / R^2 [k_A^4 cos(2 k_A R) - k_B^4 cos(2 k_B R + Delta t)].
inline double w_a_farfield(const AtomPair& pair, double t) {
    detail::require_time(t);
    validate(pair);
    const double r = pair.r();
    if (step(t - 2.0 * r) == 0.0) return 0.0;
    const CouplingU u(pair);
    const ComplexDyadic a = alpha_tensor(pair.sep);
    const double uaa = u.contract(a, a).real();
    const double ka = pair.k_a(), kb = pair.k_b();
    return uaa / (r * r) *
           (std::pow(ka, 4) * std::cos(2.0 * ka * r) - std::pow(kb, 4) * std::cos(2.0 * kb * r + pair.detuning() * t));
}

/// <W_B(t)>/2 in the far field:
///   theta(t - R) U_ijpq a^ij a^pq / R^2 [k_A^4 - k_B^2 k_A^2 cos(Delta (t - R))].
inline double w_b_farfield(const AtomPair& pair, double t) {
    detail::require_time(t);
    validate(pair);
    const double r = pair.r();
    if (step(t - r) == 0.0) return 0.0;
    const CouplingU u(pair);
    const ComplexDyadic a = alpha_tensor(pair.sep);
    const double uaa = u.contract(a, a).real();
    const double ka = pair.k_a(), kb = pair.k_b();
    return uaa / (r * r) * (std::pow(ka, 4) - kb * kb * ka * ka * std::cos(pair.detuning() * (t - r)));
}

// ---------------------------------------------------------------------------
// Quasistationary potentials. Each has a Green-function branch and an explicit
// trigonometric / inverse-power branch; the two must agree.
// ---------------------------------------------------------------------------

struct Branches {
    double green = 0.0;
    double explicit_form = 0.0;
};

namespace detail {

/// U-contractions of alpha and beta: aa, ab, bb.
struct ProjectorContractions {
    double aa, ab, bb;
};

inline ProjectorContractions contract_projectors(const CouplingU& u, const Separation& sep) {
    const ComplexDyadic a = alpha_tensor(sep), b = beta_tensor(sep);
    return {u.contract(a, a).real(), u.contract(a, b).real(), u.contract(b, b).real()};
}

} // namespace detail

inline Branches w_a_quasistationary_branches(const AtomPair& pair) {
    validate(pair);
    const CouplingU u(pair);
    const double ka = pair.k_a();
    const double pref = std::pow(4.0 * pi * ka * ka, 2);
    const auto g = detail::contract_green(u, pair.sep, ka, ka);

    const auto c = detail::contract_projectors(u, pair.sep);
    const double r = pair.r();
    const double kr2 = ka * ka * r * r;
    const double explicit_form =
        (c.bb - kr2 * (c.bb + 2.0 * c.ab) + kr2 * kr2 * c.aa) / std::pow(r, 6) * std::cos(2.0 * ka * r) +
        2.0 * ka / std::pow(r, 5) * (c.bb - kr2 * c.ab) * std::sin(2.0 * ka * r);
    return {pref * (g.re_re - g.im_im), explicit_form};
}

inline Branches w_b_quasistationary_branches(const AtomPair& pair) {
    validate(pair);
    const CouplingU u(pair);
    const double ka = pair.k_a();
    const double pref = std::pow(4.0 * pi * ka * ka, 2);
    const auto g = detail::contract_green(u, pair.sep, ka, ka);

    const auto c = detail::contract_projectors(u, pair.sep);
    const double r = pair.r();
    const double explicit_form =
        c.bb / std::pow(r, 6) + (c.bb - 2.0 * c.ab) * ka * ka / std::pow(r, 4) + c.aa * std::pow(ka, 4) / (r * r);
    return {pref * (g.re_re + g.im_im), explicit_form};
}

/// Quasistationary <W_A/2>_T = (4 pi k_A^2)^2 U [Re G Re G - Im G Im G] at omega_A.
inline double w_a_quasistationary(const AtomPair& pair) { return w_a_quasistationary_branches(pair).green; }

/// Quasistationary <W_B/2>_T = (4 pi k_A^2)^2 U [Re G Re G + Im G Im G] at omega_A.
inline double w_b_quasistationary(const AtomPair& pair) { return w_b_quasistationary_branches(pair).green; }

/// Time-independent far-field term of <W_A>/2, U aa k_A^4 cos(2 k_A R) / R^2.
inline double w_a_quasistationary_farfield(const AtomPair& pair) {
    validate(pair);
    const CouplingU u(pair);
    const ComplexDyadic a = alpha_tensor(pair.sep);
    const double r = pair.r(), ka = pair.k_a();
    return u.contract(a, a).real() * std::pow(ka, 4) * std::cos(2.0 * ka * r) / (r * r);
}

/// (4 pi k_A^2)^2 U Re G Re G and (4 pi k_A^2)^2 U Im G Im G at omega_A.
struct QuasistationaryParts {
    double re_re;
    double im_im;
};

inline QuasistationaryParts quasistationary_parts(const AtomPair& pair) {
    validate(pair);
    const CouplingU u(pair);
    const double ka = pair.k_a();
    const double pref = std::pow(4.0 * pi * ka * ka, 2);
    const auto g = detail::contract_green(u, pair.sep, ka, ka);
    return {pref * g.re_re, pref * g.im_im};
}

// ---------------------------------------------------------------------------
// Identical three-level atoms both in |0>.
// ---------------------------------------------------------------------------

namespace detail {

struct LadderContraction {
    double prefactor;  // -2 k^4 / Delta_{+-}
    double re;         // mu_- . Re G . mu_+
    double im;         // mu_- . Im G . mu_+
};

inline LadderContraction ladder_contraction(const ThreeLevelConfig& cfg) {
    validate(cfg);
    const double k = cfg.lower_gap();
    const ComplexDyadic g = green_dyadic(cfg.sep, k);
    const cplx s = g.sandwich(cfg.mu_minus, cfg.mu_plus);
    return {-2.0 * std::pow(k, 4) / cfg.delta_pm(), s.real(), s.imag()};
}

} // namespace detail

/// One-atom shift of level 0, equal to the vdW potential <W_0/2>_T:
///   -2 k^4 / Delta_{+-} mu_-^i mu_+^j mu_-^p mu_+^q Re G_ij Re G_pq, k = omega_0 - omega_-.
inline double shift_identical_e0(const ThreeLevelConfig& cfg) {
    const auto c = detail::ladder_contraction(cfg);
    return c.prefactor * c.re * c.re;
}

/// Two-atom phase-shift rate, same prefactor with [Re G Re G - Im G Im G].
inline double shift_identical_eprime(const ThreeLevelConfig& cfg) {
    const auto c = detail::ladder_contraction(cfg);
    return c.prefactor * (c.re * c.re - c.im * c.im);
}

/// The Im G Im G contraction with the ladder prefactor; e0 - eprime equals this.
inline double identical_im_im(const ThreeLevelConfig& cfg) {
    const auto c = detail::ladder_contraction(cfg);
    return c.prefactor * c.im * c.im;
}

/// U'_ijpq mu_-^i mu_+^j mu_-^p mu_+^q / R^2 with U' = -2 k^4 a_ij a_pq / ((4 pi)^2 Delta_{+-}).
inline double identical_farfield_amplitude(const ThreeLevelConfig& cfg) {
    validate(cfg);
    const double k = cfg.lower_gap();
    const double s = alpha_tensor(cfg.sep).sandwich(cfg.mu_minus, cfg.mu_plus).real();
    const double r = cfg.r();
    return -2.0 * std::pow(k, 4) / (16.0 * pi * pi * cfg.delta_pm()) * s * s / (r * r);
}

/// Far-field form of shift_identical_e0: amplitude * cos^2(k R).
inline double shift_identical_e0_farfield(const ThreeLevelConfig& cfg) {
    const double c = std::cos(cfg.lower_gap() * cfg.r());
    return identical_farfield_amplitude(cfg) * c * c;
}

/// Far-field form of shift_identical_eprime: amplitude * cos(2 k R).
inline double shift_identical_eprime_farfield(const ThreeLevelConfig& cfg) {
    return identical_farfield_amplitude(cfg) * std::cos(2.0 * cfg.lower_gap() * cfg.r());
}

// ---------------------------------------------------------------------------
// Potentials after excitation of A by a pi pulse of Rabi frequency Omega.
// ---------------------------------------------------------------------------

inline constexpr double default_resonance_guard = 1e-6;

namespace detail {

inline void require_off_resonance(const AtomPair& pair, const PulseParams& pulse, double guard) {
    const double d2 = pair.detuning() * pair.detuning();
    if (std::abs(d2 - pulse.rabi * pulse.rabi) < guard * d2)
        throw ResonanceError("|Omega| is within the resonance guard band of |Delta_AB|; use the resonant branch");
}

} // namespace detail

/// <W_A(t)>/2 for pulse excitation, off resonance (|Omega| != |Delta_AB|).
/// Zero for t < max(2R, pi/Omega).
inline double w_a_pulse(const AtomPair& pair, const PulseParams& pulse, double t,
                        double guard = default_resonance_guard) {
    detail::require_time(t);
    validate(pair);
    validate(pulse, pair);
    detail::require_off_resonance(pair, pulse, guard);
    const double tau = pulse.duration();
    if (step(t - 2.0 * pair.r()) * step(t - tau) == 0.0) return 0.0;

    const CouplingU u(pair);
    const double ka = pair.k_a(), kb = pair.k_b(), d = pair.detuning(), om = pulse.rabi;
    const auto ga = detail::contract_green(u, pair.sep, ka, ka);
    const auto gb = detail::contract_green(u, pair.sep, kb, kb);
    const double four_pi_sq = 16.0 * pi * pi;

    const double adiabatic = std::pow(ka, 4) * std::exp(-pair.gamma_a * t) * (ga.re_re - ga.im_im);
    const double c = std::cos(d * t) + std::cos(d * (t - tau));
    const double s = std::sin(d * t) + std::sin(d * (t - tau));
    const double transient = std::pow(kb, 4) * om * om * std::exp(-0.5 * (pair.gamma_a + pair.gamma_b) * t) /
                             (2.0 * (d * d - om * om)) * ((gb.re_re - gb.im_im) * c - 2.0 * gb.re_im * s);
    return four_pi_sq * (adiabatic + transient);
}

/// <W_A(t)>/2 for pulse excitation at |Omega/Delta_AB| -> 1.
/// Limit Omega/Delta -> +1; for Delta < 0 the cosine term changes sign.
inline double w_a_pulse_resonant(const AtomPair& pair, const PulseParams& pulse, double t) {
    detail::require_time(t);
    validate(pair);
    validate(pulse, pair);
    if (step(t - 2.0 * pair.r()) * step(t - pulse.duration()) == 0.0) return 0.0;

    const CouplingU u(pair);
    const double ka = pair.k_a(), kb = pair.k_b(), om = pulse.rabi;
    const auto ga = detail::contract_green(u, pair.sep, ka, ka);
    const auto gb = detail::contract_green(u, pair.sep, kb, kb);
    const double sgn = detail::sign(pair.detuning());

    const double adiabatic = std::pow(ka, 4) * std::exp(-pair.gamma_a * t) * (ga.re_re - ga.im_im);
    const double transient = -pi * std::pow(kb, 4) * std::exp(-0.5 * (pair.gamma_a + pair.gamma_b) * t) / 4.0 *
                             ((gb.re_re - gb.im_im) * std::sin(om * t) + sgn * 2.0 * gb.re_im * std::cos(om * t));
    return 16.0 * pi * pi * (adiabatic + transient);
}

/// <W_B(t)>/2 for pulse excitation, off resonance. Zero for t < max(R, pi/Omega).
inline double w_b_pulse(const AtomPair& pair, const PulseParams& pulse, double t,
                        double guard = default_resonance_guard) {
    detail::require_time(t);
    validate(pair);
    validate(pulse, pair);
    detail::require_off_resonance(pair, pulse, guard);
    const double tau = pulse.duration();
    if (step(t - pair.r()) * step(t - tau) == 0.0) return 0.0;

    const CouplingU u(pair);
    const double ka = pair.k_a(), kb = pair.k_b(), d = pair.detuning(), om = pulse.rabi;
    const auto ga = detail::contract_green(u, pair.sep, ka, ka);
    const auto gab = detail::contract_green(u, pair.sep, ka, kb);

    const double adiabatic = std::pow(ka, 4) * std::exp(-pair.gamma_a * t) * (ga.re_re + ga.im_im);
    const double c = std::cos(d * t) + std::cos(d * (t - tau));
    const double s = std::sin(d * t) + std::sin(d * (t - tau));
    const double transient = ka * ka * kb * kb * om * om * std::exp(-0.5 * (pair.gamma_a + pair.gamma_b) * t) /
                             (2.0 * (d * d - om * om)) *
                             ((gab.re_re + gab.im_im) * c - (gab.re_im - gab.im_re) * s);
    return 16.0 * pi * pi * (adiabatic + transient);
}

/// |Omega/Delta_AB| -> 1 limit of w_b_pulse, obtained the same way as the resonant W_A branch.
inline double w_b_pulse_resonant(const AtomPair& pair, const PulseParams& pulse, double t) {
    detail::require_time(t);
    validate(pair);
    validate(pulse, pair);
    if (step(t - pair.r()) * step(t - pulse.duration()) == 0.0) return 0.0;

    const CouplingU u(pair);
    const double ka = pair.k_a(), kb = pair.k_b(), om = pulse.rabi;
    const auto ga = detail::contract_green(u, pair.sep, ka, ka);
    const auto gab = detail::contract_green(u, pair.sep, ka, kb);
    const double sgn = detail::sign(pair.detuning());

    const double adiabatic = std::pow(ka, 4) * std::exp(-pair.gamma_a * t) * (ga.re_re + ga.im_im);
    const double transient = -pi * ka * ka * kb * kb * std::exp(-0.5 * (pair.gamma_a + pair.gamma_b) * t) / 4.0 *
                             ((gab.re_re + gab.im_im) * std::sin(om * t) +
                              sgn * (gab.re_im - gab.im_re) * std::cos(om * t));
    return 16.0 * pi * pi * (adiabatic + transient);
}

// ---------------------------------------------------------------------------
// Force from a potential by central differences.
// ---------------------------------------------------------------------------

enum class Atom { A, B };

struct ForceResult {
    Vec3 force{};                 // Richardson-extrapolated -grad V
    double richardson_rel_diff = 0.0;  // |D(h) - D(h/2)| / |D(h/2)|
};

inline constexpr double force_consistency_tolerance = 1e-3;

/// -grad of `potential` with respect to the position of the chosen atom. `potential` maps an
/// AtomPair to an energy; only the separation is varied. Since R = R_A - R_B, the gradient with
/// respect to R_B is minus the gradient with respect to R. Throws ConvergenceError when the
/// step-h and step-h/2 estimates disagree by more than force_consistency_tolerance.
template <class Potential>
ForceResult vdw_force(Atom which, const AtomPair& pair, Potential&& potential, double step_size) {
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw DomainError("force step must be positive");
    const Vec3 r0 = pair.sep.vector();

    auto gradient = [&](double h) {
        Vec3 g{};
        for (int i = 0; i < 3; ++i) {
            Vec3 rp = r0, rm = r0;
            rp[i] += h;
            rm[i] -= h;
            const double vp = potential(pair.with_separation(Separation(rp)));
            const double vm = potential(pair.with_separation(Separation(rm)));
            g[i] = (vp - vm) / (2.0 * h);
        }
        return g;
    };

    const Vec3 coarse = gradient(step_size);
    const Vec3 fine = gradient(0.5 * step_size);
    const double diff = norm(coarse - fine);
    const double scale = norm(fine);
    ForceResult out;
    out.richardson_rel_diff = scale > 0.0 ? diff / scale : (diff > 0.0 ? INFINITY : 0.0);
    if (out.richardson_rel_diff > force_consistency_tolerance)
        throw ConvergenceError("force step inconsistent: estimates at h and h/2 differ by " +
                               std::to_string(out.richardson_rel_diff) + " (relative)");
    const Vec3 extrapolated = (4.0 / 3.0) * fine - (1.0 / 3.0) * coarse;
    const double sgn = which == Atom::A ? -1.0 : 1.0;
    out.force = sgn * extrapolated;
    return out;
}

} // namespace vdw
