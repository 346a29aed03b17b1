#pragma once

// Independent evaluation of the integral representations of the potentials: time integrals are
// reduced in closed form per frequency node, then the two photon-frequency integrals are done on
// a composite Gauss-Legendre tensor grid with a smooth spectral cutoff.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "vdw/errors.hpp"
#include "vdw/params.hpp"
#include "vdw/potentials.hpp"
#include "vdw/quadrature.hpp"
#include "vdw/tensor.hpp"
#include "vdw/time_kernel.hpp"

namespace vdw {

struct QuadratureSpec {
    double eta = 1e-5;                  // smallest regulator in the default sequence
    double k_window = 20.0;             // graded half-width, in units of max(Gamma, eta, |Delta|)
    int grid_points = 64;               // minimum nodes per axis at level 0
    std::vector<double> eta_sequence;   // strictly decreasing; empty means {8, 4, 2, 1} * eta
    double cutoff_factor = 2.0;         // window plateau starts at cutoff_factor * max transition frequency
    double cutoff_transition = 12.0;    // window edge width, in units of 1 / (slowest phase length)
    double panel_wavelengths = 2.0;     // background panel width in units of 2 pi / (R + T)
    int panel_order = 16;
    double tolerance = 1e-4;            // successive-refinement relative change
    int max_refinements = 5;
    bool apply_causality_step = true;   // multiply by the explicit step factors
};

/// Default spec for a given detuning: eta = 1e-3 |Delta|.
inline QuadratureSpec default_quadrature_spec(double detuning) {
    QuadratureSpec s;
    s.eta = 1e-3 * std::abs(detuning);
    s.eta_sequence = {8.0 * s.eta, 4.0 * s.eta, 2.0 * s.eta, s.eta};
    return s;
}

inline void validate(const QuadratureSpec& s) {
    if (!(s.eta > 0.0)) throw DomainError("quadrature eta must be > 0");
    if (s.grid_points < 64) throw DomainError("quadrature grid_points must be >= 64");
    for (std::size_t i = 0; i < s.eta_sequence.size(); ++i) {
        if (!(s.eta_sequence[i] > 0.0)) throw DomainError("eta_sequence entries must be > 0");
        if (i > 0 && !(s.eta_sequence[i] < s.eta_sequence[i - 1]))
            throw DomainError("eta_sequence must be strictly decreasing");
    }
    if (!(s.k_window > 0.0)) throw DomainError("k_window must be > 0");
    if (!(s.cutoff_factor >= 1.5)) throw DomainError("cutoff_factor must be >= 1.5");
    if (!(s.cutoff_transition >= 4.0)) throw DomainError("cutoff_transition must be >= 4");
    if (!(s.panel_wavelengths > 0.0)) throw DomainError("panel_wavelengths must be > 0");
    if (s.panel_order < 4 || s.panel_order > 64) throw DomainError("panel_order must lie in [4, 64]");
    if (!(s.tolerance > 0.0)) throw DomainError("tolerance must be > 0");
    if (s.max_refinements < 1) throw DomainError("max_refinements must be >= 1");
}

inline std::vector<double> resolved_eta_sequence(const QuadratureSpec& s) {
    if (!s.eta_sequence.empty()) return s.eta_sequence;
    return {8.0 * s.eta, 4.0 * s.eta, 2.0 * s.eta, s.eta};
}

struct OracleReport {
    double value = 0.0;
    double eta_final = 0.0;       // smallest regulator used; 0 when the kernel needs none
    int refine_steps = 0;         // refinement level reached (maximum over the eta sequence)
    double imag_residual = 0.0;   // |Im| / |value| of the complex quantity before Re is taken
    std::vector<std::pair<double, double>> eta_table;  // (eta, Re value) before extrapolation
    std::vector<double> history;  // values at successive refinement levels (last eta)
    std::vector<std::size_t> nodes;  // nodes per axis at each level (last eta)
    bool converged = true;
    Warnings warnings;
};

// ---------------------------------------------------------------------------
// Spectral density f(k) = mu1 . k^2 Im G(k R) . mu2, extended to k < 0 as an odd function.
// ---------------------------------------------------------------------------

struct SpectralDensity {
    double a = 0.0;  // mu1 . alpha . mu2
    double b = 0.0;  // mu1 . beta . mu2
    double r = 1.0;

    /// Im[e^{ikR} (a k^2 + i b k / R - b / R^2)] / (4 pi R); valid for every real k.
    double operator()(double k) const {
        const double c = std::cos(k * r), s = std::sin(k * r);
        const double re = a * k * k - b / (r * r);
        const double im = b * k / r;
        return (s * re + c * im) / (4.0 * pi * r);
    }
};

inline SpectralDensity spectral_density(const Separation& sep, const Vec3& mu1, const Vec3& mu2) {
    return {alpha_tensor(sep).sandwich(mu1, mu2).real(), beta_tensor(sep).sandwich(mu1, mu2).real(),
            sep.magnitude()};
}

// ---------------------------------------------------------------------------
// Time kernels of the integral representations.
// ---------------------------------------------------------------------------

namespace kernels {

inline AffineRate rate(double re, double im, double w = 0.0, double wp = 0.0) { return {cplx(re, im), w, wp}; }

inline Segment seg(AffineRate r, LowerBound lo, UpperBound hi, Envelope env = Envelope::none) {
    return {r, env, lo, hi};
}

/// Ground-state-atom potential after a pi pulse. Two factors: the omega chain (t, t') and the
/// omega' segment t''. `sudden` drops the pulse regions and the damping.
inline TimeKernel w_b(const AtomPair& p, double rabi, bool sudden) {
    const cplx i(0.0, 1.0);
    const double ga = sudden ? 0.0 : p.gamma_a, gb = sudden ? 0.0 : p.gamma_b;
    const double wa = p.omega_a, wb = p.omega_b;
    const AffineRate obs1 = rate(-0.5 * gb, wb);
    const AffineRate rt = rate(0.5 * gb, -wb, 1.0);
    const AffineRate rtp = rate(-0.5 * ga, wa, -1.0);
    const AffineRate obs2 = rate(0.0, 0.0, 0.0, -1.0);
    const AffineRate rtpp = rate(-0.5 * ga, -wa, 0.0, 1.0);

    TimeKernel k;
    Factor f1, f2;
    if (sudden) {
        f1.nests.push_back({i, obs1,
                            {seg(rt, LowerBound::zero, UpperBound::observation),
                             seg(rtp, LowerBound::zero, UpperBound::enclosing)}});
        f2.nests.push_back({1.0, obs2, {seg(rtpp, LowerBound::zero, UpperBound::observation)}});
    } else {
        k.rabi = rabi;
        f1.nests.push_back({i, obs1,
                            {seg(rt, LowerBound::pulse_end, UpperBound::observation),
                             seg(rtp, LowerBound::pulse_end, UpperBound::enclosing)}});
        f1.nests.push_back({i, obs1,
                            {seg(rt, LowerBound::pulse_end, UpperBound::observation),
                             seg(rtp, LowerBound::zero, UpperBound::pulse_end, Envelope::sin_squared)}});
        f1.nests.push_back({i, obs1,
                            {seg(rt, LowerBound::zero, UpperBound::pulse_end),
                             seg(rtp, LowerBound::zero, UpperBound::enclosing, Envelope::sin_squared)}});
        f2.nests.push_back({1.0, obs2, {seg(rtpp, LowerBound::pulse_end, UpperBound::observation)}});
        f2.nests.push_back(
            {1.0, obs2, {seg(rtpp, LowerBound::zero, UpperBound::pulse_end, Envelope::sin_squared)}});
    }
    k.factors = {f1, f2};
    return k;
}

/// Excited-atom potential after a pi pulse: one chain t > t' > t'' split into four regions.
inline TimeKernel w_a(const AtomPair& p, double rabi, bool sudden) {
    const cplx i(0.0, 1.0);
    const double ga = sudden ? 0.0 : p.gamma_a, gb = sudden ? 0.0 : p.gamma_b;
    const double wa = p.omega_a, wb = p.omega_b;
    const AffineRate obs = rate(-0.5 * ga, wa, -1.0);
    const AffineRate rt = rate(-0.5 * gb, -wb, 1.0);
    const AffineRate rtp = rate(0.5 * gb, wb, 0.0, -1.0);
    const AffineRate rtpp = rate(-0.5 * ga, -wa, 0.0, 1.0);
    using L = LowerBound;
    using U = UpperBound;
    const auto s2 = Envelope::sin_squared;

    TimeKernel k;
    Factor f;
    if (sudden) {
        f.nests.push_back(
            {i, obs, {seg(rt, L::zero, U::observation), seg(rtp, L::zero, U::enclosing), seg(rtpp, L::zero, U::enclosing)}});
    } else {
        k.rabi = rabi;
        f.nests.push_back({i, obs,
                           {seg(rt, L::pulse_end, U::observation), seg(rtp, L::pulse_end, U::enclosing),
                            seg(rtpp, L::pulse_end, U::enclosing)}});
        f.nests.push_back({i, obs,
                           {seg(rt, L::pulse_end, U::observation), seg(rtp, L::pulse_end, U::enclosing),
                            seg(rtpp, L::zero, U::pulse_end, s2)}});
        f.nests.push_back({i, obs,
                           {seg(rt, L::pulse_end, U::observation), seg(rtp, L::zero, U::pulse_end),
                            seg(rtpp, L::zero, U::enclosing, s2)}});
        f.nests.push_back({i, obs,
                           {seg(rt, L::zero, U::pulse_end), seg(rtp, L::zero, U::enclosing),
                            seg(rtpp, L::zero, U::enclosing, s2)}});
    }
    k.factors = {f};
    return k;
}

/// Identical three-level atoms, diagram with both photons exchanged in sequence (adiabatic).
inline TimeKernel identical_sequential(const ThreeLevelConfig& c, double eta) {
    const cplx i(0.0, 1.0);
    const double w0 = c.omega_0, wm = c.omega_minus, wp = c.omega_plus;
    using L = LowerBound;
    using U = UpperBound;
    Factor f;
    f.nests.push_back({i, rate(0.0, w0 - wm, -1.0),
                       {seg(rate(eta, w0 - wp, 1.0), L::minus_infinity, U::observation),
                        seg(rate(eta, wp - w0, 0.0, -1.0), L::minus_infinity, U::enclosing),
                        seg(rate(eta, wm - w0, 0.0, 1.0), L::minus_infinity, U::enclosing)}});
    TimeKernel k;
    k.factors = {f};
    return k;
}

/// Identical three-level atoms, diagram with the omega' emission on the other branch (adiabatic).
inline TimeKernel identical_split(const ThreeLevelConfig& c, double eta) {
    const cplx i(0.0, 1.0);
    const double w0 = c.omega_0, wm = c.omega_minus, wp = c.omega_plus;
    using L = LowerBound;
    using U = UpperBound;
    Factor f1, f2;
    f1.nests.push_back({i, rate(0.0, wp + wm),
                        {seg(rate(eta, w0 - wp, 1.0), L::minus_infinity, U::observation),
                         seg(rate(eta, w0 - wm, -1.0), L::minus_infinity, U::enclosing)}});
    f2.nests.push_back({1.0, rate(0.0, -w0 - wm, 0.0, -1.0),
                        {seg(rate(eta, wm - w0, 0.0, 1.0), L::minus_infinity, U::observation)}});
    TimeKernel k;
    k.factors = {f1, f2};
    return k;
}

} // namespace kernels

// ---------------------------------------------------------------------------
// Pole kernels of the excited and ground-state potentials.
// ---------------------------------------------------------------------------

enum class PoleKind { excited, ground };

/// The two rational pole structures, direct and crossed, of one potential.
struct PoleKernelPair {
    PoleKind kind = PoleKind::excited;
    double k_a = 1.0;
    double delta = 0.01;
    double eta = 1e-5;

    /// Zero of the k factor: k_A + i eta.
    cplx pole_k() const { return {k_a, eta}; }
    /// Zero of the k' factor: k_A + i eta (excited) or k_A - i eta (ground).
    cplx pole_kprime() const { return {k_a, kind == PoleKind::excited ? eta : -eta}; }

    cplx direct(double k, double kp) const { return 1.0 / (delta * (k - pole_k()) * (kp - pole_kprime())); }
    cplx crossed(double k, double kp) const {
        return -1.0 / ((k + kp - delta) * (k - pole_k()) * (kp - pole_kprime()));
    }
    std::pair<cplx, cplx> operator()(double k, double kp) const { return {direct(k, kp), crossed(k, kp)}; }
};

inline PoleKernelPair make_pole_kernel(PoleKind kind, const AtomPair& pair, const QuadratureSpec& spec) {
    validate(pair);
    validate(spec);
    PoleKernelPair p{kind, pair.k_a(), pair.detuning(), spec.eta};
    const bool same_sign = (p.pole_k().imag() > 0.0) == (p.pole_kprime().imag() > 0.0);
    if (same_sign != (kind == PoleKind::excited)) throw KernelError("pole kernel imaginary parts inconsistent");
    return p;
}

inline PoleKernelPair pole_kernel_excited(const AtomPair& pair, const QuadratureSpec& spec) {
    return make_pole_kernel(PoleKind::excited, pair, spec);
}

inline PoleKernelPair pole_kernel_ground(const AtomPair& pair, const QuadratureSpec& spec) {
    return make_pole_kernel(PoleKind::ground, pair, spec);
}

enum class PoleTerm { direct, crossed };

/// Adiabatically switched time integral generating a pole kernel. Reduce it at T = 0 with
/// (omega, omega') = pole_generator_arguments(kind, k, k').
inline TimeKernel pole_generator(PoleKind kind, PoleTerm term, const AtomPair& pair, double eta) {
    using kernels::rate;
    using kernels::seg;
    using L = LowerBound;
    using U = UpperBound;
    const cplx i(0.0, 1.0);
    const double wa = pair.omega_a, wb = pair.omega_b;
    TimeKernel k;
    if (kind == PoleKind::excited) {
        Factor f;
        if (term == PoleTerm::direct) {
            f.nests.push_back({i, rate(0.0, wa, -1.0),
                               {seg(rate(eta, -wb, 1.0), L::minus_infinity, U::observation),
                                seg(rate(eta, wb, 0.0, -1.0), L::minus_infinity, U::enclosing),
                                seg(rate(eta, -wa, 0.0, 1.0), L::minus_infinity, U::enclosing)}});
        } else {
            f.nests.push_back({i, rate(0.0, wa, -1.0),
                               {seg(rate(eta, -wb, 0.0, -1.0), L::minus_infinity, U::observation),
                                seg(rate(eta, wb, 1.0), L::minus_infinity, U::enclosing),
                                seg(rate(eta, -wa, 0.0, 1.0), L::minus_infinity, U::enclosing)}});
        }
        k.factors = {f};
    } else {
        if (term == PoleTerm::direct) {
            Factor f1, f2;
            f1.nests.push_back({i, rate(0.0, wb),
                                {seg(rate(eta, -wb, 1.0), L::minus_infinity, U::observation),
                                 seg(rate(eta, wa, -1.0), L::minus_infinity, U::enclosing)}});
            f2.nests.push_back({1.0, rate(0.0, 0.0, 0.0, -1.0),
                                {seg(rate(eta, -wa, 0.0, 1.0), L::minus_infinity, U::observation)}});
            k.factors = {f1, f2};
        } else {
            Factor f;
            f.nests.push_back({i, rate(0.0, wb, 1.0),
                               {seg(rate(eta, -wb, 0.0, -1.0), L::minus_infinity, U::observation),
                                seg(rate(eta, wa, -1.0), L::minus_infinity, U::enclosing),
                                seg(rate(eta, -wa, 0.0, 1.0), L::minus_infinity, U::observation)}});
            k.factors = {f};
        }
    }
    return k;
}

/// Maps the pole-kernel variables (k, k') to the generator's (omega, omega').
inline std::pair<double, double> pole_generator_arguments(PoleKind kind, double k, double kp) {
    return kind == PoleKind::excited ? std::make_pair(k, kp) : std::make_pair(kp, k);
}

// ---------------------------------------------------------------------------
// Tensor-grid integration.
// ---------------------------------------------------------------------------

struct GridIntegral {
    cplx value;
    double magnitude;  // sum of |integrand * weight|; sets the scale for convergence tests
};

namespace detail {

/// Mixed factor whose omega dependence sits in the outermost segment and the observation phase.
/// The outermost time integral is done by Gauss-Legendre quadrature, which turns the double
/// frequency sum into a product of two single sums at every time node.
inline GridIntegral hybrid_outer_quadrature(const Factor& factor, double rabi, const Grid& grid,
                                            const std::vector<double>& fw, const std::vector<cplx>& a,
                                            const std::vector<cplx>& b, cplx c, double t) {
    const std::size_t n = grid.size();
    const double tau = rabi > 0.0 ? pi / rabi : 0.0;
    double k_max = 0.0;
    for (double x : grid.x) k_max = std::max(k_max, std::abs(x));
    const GaussRule rule = gauss_legendre(16);
    ReductionWorkspace ws;

    cplx total = 0.0;
    double magnitude = 0.0;
    for (const auto& nest : factor.nests) {
        const Segment& outer = nest.segments.front();
        const double lo = outer.lower == LowerBound::pulse_end ? tau : 0.0;
        const double hi = outer.upper == UpperBound::observation ? t : tau;
        if (!(hi > lo)) continue;
        const AffineRate& obs = nest.observation_rate;
        const AffineRate& r0 = outer.rate;

        const double fastest = (std::abs(r0.omega_coeff) + std::abs(r0.omegaprime_coeff) + 1.0) * k_max +
                               std::abs(r0.constant) + rabi;

        // Carry terms grouped by (power, rate - i beta omega', beta): the omega'-free part of the
        // rate is shared across nodes, so each time node needs one exponential per group.
        struct Group {
            int power;
            cplx base;
            int beta;
            std::vector<cplx> coef;
        };
        std::vector<Group> groups;
        for (std::size_t j = 0; j < n; ++j) {
            ws.carry.assign(1, ExpTerm{1.0, 0, 0.0});
            if (nest.segments.size() > 1)
                integrate_segments(nest, 1, static_cast<int>(nest.segments.size()) - 1, 0.0, grid.x[j], t, rabi, ws);
            for (const auto& term : ws.carry) {
                const int beta = static_cast<int>(std::lround(term.wp_coeff));
                const cplx base = term.rate - cplx(0.0, beta * grid.x[j]);
                Group* g = nullptr;
                for (auto& existing : groups)
                    if (existing.power == term.power && existing.beta == beta &&
                        std::abs(existing.base - base) < 1e-9 * (1.0 + std::abs(base)))
                        g = &existing;
                if (g == nullptr) {
                    groups.push_back({term.power, base, beta, std::vector<cplx>(n, 0.0)});
                    g = &groups.back();
                }
                g->coef[j] += term.coef * fw[j] * b[j];
            }
        }
        std::vector<double> b_abs(n, 0.0);
        for (const auto& g : groups)
            for (std::size_t j = 0; j < n; ++j) b_abs[j] += std::abs(g.coef[j]);

        const double panel = 2.0 * pi / fastest;
        const auto panels = static_cast<long>(std::ceil((hi - lo) / panel)) << grid.level;
        const double h = (hi - lo) / static_cast<double>(panels);
        const cplx pre = nest.prefactor * std::exp(obs.constant * t);
        double e_abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) e_abs += std::abs(fw[i] * a[i]);
        std::vector<cplx> group_scale(groups.size());
        for (long p = 0; p < panels; ++p) {
            const double mid = lo + h * (static_cast<double>(p) + 0.5);
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double s = mid + 0.5 * h * rule.nodes[q];
                const double ws_q = 0.5 * h * rule.weights[q];
                const double phase_w = obs.omega_coeff * t + r0.omega_coeff * s;
                const double phase_wp = obs.omegaprime_coeff * t + r0.omegaprime_coeff * s;
                for (std::size_t m = 0; m < groups.size(); ++m)
                    group_scale[m] = std::exp(groups[m].base * s) * std::pow(s, groups[m].power);
                cplx e = 0.0, f = 0.0;
                for (std::size_t i = 0; i < n; ++i) e += fw[i] * a[i] * std::polar(1.0, grid.x[i] * phase_w);
                double f_abs = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx u = std::polar(1.0, grid.x[j] * s);
                    const cplx u_inv = std::conj(u);
                    cplx cj = 0.0;
                    for (std::size_t m = 0; m < groups.size(); ++m) {
                        const Group& g = groups[m];
                        if (g.coef[j] == 0.0) continue;
                        cplx v = g.coef[j] * group_scale[m];
                        for (int k = 0; k < g.beta; ++k) v *= u;
                        for (int k = 0; k > g.beta; --k) v *= u_inv;
                        cj += v;
                    }
                    f += cj * std::polar(1.0, grid.x[j] * phase_wp);
                    f_abs += b_abs[j];
                }
                const cplx g = std::exp(r0.constant * s);
                total += ws_q * pre * g * e * f;
                magnitude += ws_q * std::abs(pre * g) * e_abs * f_abs;
            }
        }
    }
    return {c * total, std::abs(c) * magnitude};
}

/// Sum over i, j of fw_i fw_j K(x_i, x_j) for a time kernel at observation time t.
inline GridIntegral integrate_time_kernel(const TimeKernel& kernel, const Grid& grid, const std::vector<double>& fw,
                                          double t) {
    const std::size_t n = grid.size();
    ReductionWorkspace ws;
    std::vector<cplx> a(n, 1.0), b(n, 1.0);
    cplx c = 1.0;
    std::vector<const Factor*> mixed;

    auto factor_value = [&](const Factor& f, double w, double wp) {
        cplx s = 0.0;
        for (const auto& nest : f.nests) s += reduce_nest(nest, w, wp, t, kernel.rabi, ws);
        return s;
    };

    for (const auto& f : kernel.factors) {
        const bool dw = f.depends_on_omega(), dwp = f.depends_on_omegaprime();
        if (dw && dwp) {
            mixed.push_back(&f);
        } else if (dw) {
            for (std::size_t i = 0; i < n; ++i) a[i] *= factor_value(f, grid.x[i], 0.0);
        } else if (dwp) {
            for (std::size_t j = 0; j < n; ++j) b[j] *= factor_value(f, 0.0, grid.x[j]);
        } else {
            c *= factor_value(f, 0.0, 0.0);
        }
    }

    if (mixed.empty()) {
        cplx sa = 0.0, sb = 0.0;
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sa += fw[i] * a[i];
            ma += std::abs(fw[i] * a[i]);
        }
        for (std::size_t j = 0; j < n; ++j) {
            sb += fw[j] * b[j];
            mb += std::abs(fw[j] * b[j]);
        }
        return {c * sa * sb, std::abs(c) * ma * mb};
    }

    // Inner segments that do not involve omega are integrated once per omega' node.
    if (mixed.size() == 1) {
        bool outer_only = true;
        for (const auto& nest : mixed.front()->nests) {
            for (std::size_t s = 1; s < nest.segments.size(); ++s)
                if (nest.segments[s].rate.depends_on_omega()) outer_only = false;
            const auto& outer = nest.segments.front();
            if (outer.lower == LowerBound::minus_infinity || outer.envelope != Envelope::none) outer_only = false;
        }
        if (outer_only) return hybrid_outer_quadrature(*mixed.front(), kernel.rabi, grid, fw, a, b, c, t);
    }

    struct NestCache {
        const Nest* nest;
        int split;
        std::vector<std::size_t> offset;
        std::vector<ExpTerm> terms;
    };
    std::vector<std::vector<NestCache>> caches;
    for (const Factor* f : mixed) {
        std::vector<NestCache> fc;
        for (const auto& nest : f->nests) {
            NestCache nc{&nest, static_cast<int>(nest.segments.size()), {}, {}};
            while (nc.split > 0 && !nest.segments[static_cast<std::size_t>(nc.split - 1)].rate.depends_on_omega())
                --nc.split;
            nc.offset.reserve(n + 1);
            for (std::size_t j = 0; j < n; ++j) {
                nc.offset.push_back(nc.terms.size());
                ws.carry.assign(1, ExpTerm{1.0, 0, 0.0});
                integrate_segments(nest, nc.split, static_cast<int>(nest.segments.size()) - 1, 0.0, grid.x[j], t,
                                   kernel.rabi, ws);
                nc.terms.insert(nc.terms.end(), ws.carry.begin(), ws.carry.end());
            }
            nc.offset.push_back(nc.terms.size());
            fc.push_back(std::move(nc));
        }
        caches.push_back(std::move(fc));
    }

    cplx total = 0.0;
    double magnitude = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = grid.x[i];
        cplx row = 0.0;
        double row_mag = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double wp = grid.x[j];
            cplx prod = 1.0;
            for (const auto& fc : caches) {
                cplx s = 0.0;
                for (const auto& nc : fc) {
                    ws.carry.assign(nc.terms.begin() + static_cast<std::ptrdiff_t>(nc.offset[j]),
                                    nc.terms.begin() + static_cast<std::ptrdiff_t>(nc.offset[j + 1]));
                    integrate_segments(*nc.nest, 0, nc.split - 1, w, wp, t, kernel.rabi, ws);
                    s += finish_nest(*nc.nest, w, wp, t, ws);
                }
                prod *= s;
            }
            const cplx v = fw[j] * b[j] * prod;
            row += v;
            row_mag += std::abs(v);
        }
        total += fw[i] * a[i] * row;
        magnitude += std::abs(fw[i] * a[i]) * row_mag;
    }
    return {c * total, std::abs(c) * magnitude};
}

/// Sum over i, j of fw_i fw_j K(x_i, x_j) for an arbitrary callable kernel.
template <class Kernel>
GridIntegral integrate_callable(const Kernel& kernel, const Grid& grid, const std::vector<double>& fw) {
    cplx total = 0.0;
    double magnitude = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cplx row = 0.0;
        double row_mag = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const cplx v = fw[j] * kernel(grid.x[i], grid.x[j]);
            row += v;
            row_mag += std::abs(v);
        }
        total += fw[i] * row;
        magnitude += std::abs(fw[i]) * row_mag;
    }
    return {total, magnitude};
}

/// Frequency-axis plan for one evaluation.
struct AxisPlan {
    SpectralDensity density;
    double k_max = 1.0;       // largest transition frequency involved
    double length = 1.0;      // R + T, fastest oscillation of the integrand
    double slow_length = 1.0; // slowest non-zero oscillation, sets the cutoff transition width
    std::vector<double> graded_centers;
    double graded_width = 0.0;  // eta or 0
    double window = 0.0;      // graded half-width
};

/// Smooth window 0.5 [erf((k + K)/w) - erf((k - K)/w)]. Its Fourier transform decays as
/// exp(-(w x)^2 / 4), so oscillatory tails e^{ikx} are suppressed once w x >> 1.
struct SpectralWindow {
    double plateau;
    double width;
    double extent() const { return plateau + 5.0 * width; }
    double operator()(double k) const { return 0.5 * (std::erf((k + plateau) / width) - std::erf((k - plateau) / width)); }
};

inline SpectralWindow spectral_window(const AxisPlan& plan, const QuadratureSpec& spec) {
    const double w = spec.cutoff_transition / plan.slow_length;
    return {spec.cutoff_factor * plan.k_max + 5.0 * w, w};
}

inline std::vector<double> plan_edges(const AxisPlan& plan, const QuadratureSpec& spec) {
    const SpectralWindow win = spectral_window(plan, spec);
    PanelLayout layout;
    layout.lower = -win.extent();
    layout.upper = win.extent();
    layout.panel_width = spec.panel_wavelengths * 2.0 * pi / plan.length;
    const double min_panels = std::ceil(double(spec.grid_points) / spec.panel_order);
    layout.panel_width = std::min(layout.panel_width, (layout.upper - layout.lower) / min_panels);
    layout.window_half_width = plan.window;
    for (double c : plan.graded_centers) layout.graded.push_back({c, plan.graded_width});
    return panel_edges(layout);
}

inline std::vector<double> weighted_density(const AxisPlan& plan, const QuadratureSpec& spec, const Grid& grid) {
    const SpectralWindow win = spectral_window(plan, spec);
    std::vector<double> fw(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) fw[i] = grid.w[i] * plan.density(grid.x[i]) * win(grid.x[i]);
    return fw;
}

/// Slowest phase length of a finite-time integrand: R and the distances of t from the light-cone
/// thresholds, floored at R / 4 so that points next to a threshold stay affordable.
inline double slow_length(double r, double t, std::initializer_list<double> thresholds) {
    double l = r;
    for (double th : thresholds)
        if (t > 0.0) l = std::min(l, std::abs(t - th));
    return std::max(l, 0.25 * r);
}

struct RefinementResult {
    cplx value;
    double magnitude;
    int level;
    std::vector<double> history;
    std::vector<std::size_t> nodes;
};

/// Refines the grid until successive levels agree to spec.tolerance. `eval(grid, fw)` returns
/// a GridIntegral already scaled by the quantity's prefactor.
template <class Eval>
RefinementResult refine(const AxisPlan& plan, const QuadratureSpec& spec, Eval&& eval) {
    const auto edges = plan_edges(plan, spec);
    const GaussRule rule = gauss_legendre(spec.panel_order);
    RefinementResult out{};
    cplx previous = 0.0;
    for (int level = 0; level <= spec.max_refinements; ++level) {
        const Grid grid = make_grid(edges, rule, level);
        const auto fw = weighted_density(plan, spec, grid);
        const GridIntegral g = eval(grid, fw);
        out.history.push_back(g.value.real());
        out.nodes.push_back(grid.size());
        out.value = g.value;
        out.magnitude = g.magnitude;
        out.level = level;
        if (level > 0) {
            const double scale = std::max(std::abs(g.value), 1e-3 * g.magnitude);
            if (std::abs(g.value - previous) <= spec.tolerance * scale) return out;
        }
        previous = g.value;
    }
    throw ConvergenceError("oracle quadrature did not converge within " + std::to_string(spec.max_refinements) +
                           " refinements (last values " + std::to_string(out.history[out.history.size() - 2]) +
                           ", " + std::to_string(out.history.back()) + ")");
}

/// Runs `eval_at_eta(eta)` (returning a RefinementResult) over the eta sequence and extrapolates
/// the complex value to eta = 0.
template <class EvalAtEta>
OracleReport extrapolate_eta(const QuadratureSpec& spec, EvalAtEta&& eval_at_eta) {
    const auto etas = resolved_eta_sequence(spec);
    std::vector<cplx> values;
    OracleReport rep;
    double magnitude = 0.0;
    for (double eta : etas) {
        const RefinementResult r = eval_at_eta(eta);
        values.push_back(r.value);
        rep.eta_table.emplace_back(eta, r.value.real());
        rep.refine_steps = std::max(rep.refine_steps, r.level);
        rep.history = r.history;
        rep.nodes = r.nodes;
        magnitude = std::max(magnitude, r.magnitude);
    }
    const auto diagonal = neville_to_zero(etas, values);
    const cplx best = diagonal.back();
    if (diagonal.size() >= 2) {
        const double scale = std::max(std::abs(best), 1e-3 * magnitude);
        if (std::abs(best - diagonal[diagonal.size() - 2]) > 0.1 * spec.tolerance * scale) rep.converged = false;
    }
    rep.value = best.real();
    rep.imag_residual = std::abs(best) > 0.0 ? std::abs(best.imag()) / std::abs(best) : 0.0;
    rep.eta_final = etas.back();
    if (!rep.converged)
        throw ConvergenceError("eta extrapolation unstable: last two extrapolants differ by more than 0.1 tolerance");
    return rep;
}

inline OracleReport finite_time_report(const RefinementResult& r, cplx pre_re) {
    OracleReport rep;
    rep.value = pre_re.real();
    rep.imag_residual = std::abs(pre_re) > 0.0 ? std::abs(pre_re.imag()) / std::abs(pre_re) : 0.0;
    rep.refine_steps = r.level;
    rep.history = r.history;
    rep.nodes = r.nodes;
    rep.eta_final = 0.0;
    return rep;
}

inline Warnings dissipation_warning(const AtomPair& p, double t) {
    return (p.gamma_a + p.gamma_b) * t > 0.1 ? Warnings(Warning::dissipation) : Warnings();
}

/// Zero result for points excluded by the explicit step factors.
inline OracleReport step_zero(Warnings w) {
    OracleReport rep;
    rep.warnings = w;
    return rep;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Oracle quantities.
// ---------------------------------------------------------------------------

/// Ground-state-atom potential after a sudden excitation of A, from its integral representation.
/// Damping is not part of that representation; Gamma t > 0.1 only raises a warning.
inline OracleReport oracle_w_b_sudden(const AtomPair& pair, double t, const QuadratureSpec& spec) {
    detail::require_time(t);
    Warnings w = validate(pair) | detail::dissipation_warning(pair, t);
    validate(spec);
    if (spec.apply_causality_step && step(t - pair.r()) == 0.0) return detail::step_zero(w);

    const TimeKernel kernel = kernels::w_b(pair, 0.0, true);
    detail::AxisPlan plan{spectral_density(pair.sep, pair.mu_a, pair.mu_b), std::max(pair.omega_a, pair.omega_b),
                          pair.r() + t, detail::slow_length(pair.r(), t, {pair.r()}), {}, 0.0, 0.0};
    const double pref = 1.0 / (pi * pi);  // 1/(2 pi^2) times the two partner orderings
    const auto r = detail::refine(plan, spec, [&](const Grid& g, const std::vector<double>& fw) {
        const auto gi = detail::integrate_time_kernel(kernel, g, fw, t);
        return GridIntegral{pref * gi.value, pref * gi.magnitude};
    });
    auto rep = detail::finite_time_report(r, r.value);
    rep.warnings = w;
    return rep;
}

/// Excited-atom potential after a sudden excitation of A (pulse regions dropped, no damping).
inline OracleReport oracle_w_a_sudden(const AtomPair& pair, double t, const QuadratureSpec& spec) {
    detail::require_time(t);
    Warnings w = validate(pair) | detail::dissipation_warning(pair, t);
    validate(spec);
    if (spec.apply_causality_step && step(t - 2.0 * pair.r()) == 0.0) return detail::step_zero(w);

    const TimeKernel kernel = kernels::w_a(pair, 0.0, true);
    detail::AxisPlan plan{spectral_density(pair.sep, pair.mu_a, pair.mu_b), std::max(pair.omega_a, pair.omega_b),
                          pair.r() + t, detail::slow_length(pair.r(), t, {pair.r(), 2.0 * pair.r()}), {}, 0.0, 0.0};
    const double pref = 1.0 / (2.0 * pi * pi);
    const auto r = detail::refine(plan, spec, [&](const Grid& g, const std::vector<double>& fw) {
        const auto gi = detail::integrate_time_kernel(kernel, g, fw, t);
        // The conjugated partner term is the complex conjugate of the same grid sum.
        return GridIntegral{pref * (gi.value + std::conj(gi.value)), 2.0 * pref * gi.magnitude};
    });
    auto rep = detail::finite_time_report(r, r.value);
    rep.warnings = w;
    return rep;
}

enum class WhichAtom { A, B };

/// Potential of atom A or B after a pi pulse on A, from the time-decomposed integral.
inline OracleReport oracle_w_pulse(const AtomPair& pair, const PulseParams& pulse, double t, WhichAtom which,
                                   const QuadratureSpec& spec) {
    detail::require_time(t);
    Warnings w = validate(pair) | validate(pulse, pair);
    validate(spec);
    const double threshold = which == WhichAtom::A ? 2.0 * pair.r() : pair.r();
    const double tau = pulse.duration();
    if (step(t - tau) == 0.0) return detail::step_zero(w);
    if (spec.apply_causality_step && step(t - threshold) == 0.0) return detail::step_zero(w);

    const TimeKernel kernel =
        which == WhichAtom::A ? kernels::w_a(pair, pulse.rabi, false) : kernels::w_b(pair, pulse.rabi, false);
    detail::AxisPlan plan{spectral_density(pair.sep, pair.mu_a, pair.mu_b),
                          std::max(pair.omega_a, pair.omega_b) + pulse.rabi, pair.r() + t,
                          detail::slow_length(pair.r(), t,
                                              {pair.r(), 2.0 * pair.r(), tau, tau + pair.r(), tau + 2.0 * pair.r()}),
                          {}, 0.0, 0.0};
    const auto r = detail::refine(plan, spec, [&](const Grid& g, const std::vector<double>& fw) {
        const auto gi = detail::integrate_time_kernel(kernel, g, fw, t);
        if (which == WhichAtom::A) {
            const double pref = 1.0 / (2.0 * pi * pi);
            return GridIntegral{pref * (gi.value + std::conj(gi.value)), 2.0 * pref * gi.magnitude};
        }
        const double pref = 1.0 / (pi * pi);
        return GridIntegral{pref * gi.value, pref * gi.magnitude};
    });
    auto rep = detail::finite_time_report(r, r.value);
    rep.warnings = w;
    return rep;
}

enum class IdenticalShift { e0, eprime };

/// Level shift of |0> (e0) or two-atom phase-shift rate (eprime) of identical three-level atoms,
/// from the adiabatically switched integrals extrapolated to eta = 0.
inline OracleReport oracle_identical(const ThreeLevelConfig& cfg, IdenticalShift which, const QuadratureSpec& spec) {
    Warnings w = validate(cfg);
    validate(spec);
    const double k = cfg.lower_gap();
    detail::AxisPlan plan{spectral_density(cfg.sep, cfg.mu_minus, cfg.mu_plus), std::max(k, cfg.upper_gap()),
                          cfg.r(), cfg.r(), {k}, 0.0, 0.0};
    auto rep = detail::extrapolate_eta(spec, [&](double eta) {
        plan.graded_width = eta;
        plan.window = spec.k_window * std::max(eta, std::abs(cfg.delta_pm()));
        const TimeKernel seq = kernels::identical_sequential(cfg, eta);
        const TimeKernel split = kernels::identical_split(cfg, eta);
        return detail::refine(plan, spec, [&](const Grid& g, const std::vector<double>& fw) {
            const auto a = detail::integrate_time_kernel(seq, g, fw, 0.0);
            if (which == IdenticalShift::eprime) {
                const double pref = 2.0 / (pi * pi);
                return GridIntegral{pref * a.value, pref * a.magnitude};
            }
            const auto b = detail::integrate_time_kernel(split, g, fw, 0.0);
            const double pref = 1.0 / (pi * pi);
            return GridIntegral{pref * (a.value + b.value), pref * (a.magnitude + b.magnitude)};
        });
    });
    rep.warnings = w;
    return rep;
}

/// Coefficient of the Im G Im G product produced by a pole kernel, obtained by subtracting the
/// principal-value part from the quadrature of the direct kernel.
struct PoleSignReport {
    double imim_coefficient = 0.0;  // Re Q - P^2 / Delta
    double re_q = 0.0;              // Re of the extrapolated double integral
    double pv_squared = 0.0;        // P^2 / Delta, P the principal-value integral at k_A
    OracleReport q_report;
};

inline PoleSignReport oracle_pole_imim(const AtomPair& pair, PoleKind kind, const QuadratureSpec& spec) {
    validate(pair);
    validate(spec);
    detail::AxisPlan plan{spectral_density(pair.sep, pair.mu_a, pair.mu_b), pair.omega_a, pair.r(), pair.r(),
                          {pair.k_a()}, 0.0, 0.0};
    auto set_eta = [&](double eta) {
        plan.graded_width = eta;
        plan.window = spec.k_window * std::max({eta, std::abs(pair.detuning()), pair.gamma_a, pair.gamma_b});
    };

    PoleSignReport out;
    out.q_report = detail::extrapolate_eta(spec, [&](double eta) {
        set_eta(eta);
        QuadratureSpec s = spec;
        s.eta = eta;
        const PoleKernelPair pk = make_pole_kernel(kind, pair, s);
        return detail::refine(plan, spec, [&](const Grid& g, const std::vector<double>& fw) {
            return detail::integrate_callable([&](double k, double kp) { return pk.direct(k, kp); }, g, fw);
        });
    });
    const auto p_report = detail::extrapolate_eta(spec, [&](double eta) {
        set_eta(eta);
        return detail::refine(plan, spec, [&](const Grid& g, const std::vector<double>& fw) {
            cplx s = 0.0;
            double m = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const cplx v = fw[i] / (g.x[i] - cplx(pair.k_a(), eta));
                s += v.real();
                m += std::abs(v.real());
            }
            return GridIntegral{s, m};
        });
    });
    out.re_q = out.q_report.value;
    out.pv_squared = p_report.value * p_report.value / pair.detuning();
    out.imim_coefficient = out.re_q - out.pv_squared;
    return out;
}

// ---------------------------------------------------------------------------
// Quasistationary time average.
// ---------------------------------------------------------------------------

/// Mean of a uniformly sampled series over the whole number of periods 2 pi / |detuning| closest
/// to `window`, starting at the first sample. Trapezoidal rule, with linear interpolation at the
/// end of the last period.
inline double time_average(const std::vector<std::pair<double, double>>& samples, double window, double detuning) {
    if (detuning == 0.0 || !std::isfinite(detuning)) throw DomainError("time_average needs a non-zero detuning");
    const double period = 2.0 * pi / std::abs(detuning);
    if (!(window >= period)) throw DomainError("averaging window is shorter than one period 2 pi / |Delta|");
    if (samples.size() < 2) throw DomainError("time_average needs at least two samples");
    const double dt = samples[1].first - samples[0].first;
    if (!(dt > 0.0)) throw DomainError("samples must be strictly increasing in time");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (std::abs(samples[i].first - samples[i - 1].first - dt) > 1e-9 * dt)
            throw DomainError("samples must be uniformly spaced");

    const double periods = std::max(1.0, std::round(window / period));
    const double t0 = samples.front().first;
    const double t_end = t0 + periods * period;
    if (t_end > samples.back().first + 1e-9 * dt) throw DomainError("samples do not cover the averaging window");

    double integral = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double ta = samples[i - 1].first, tb = samples[i].first;
        const double va = samples[i - 1].second, vb = samples[i].second;
        if (ta >= t_end) break;
        if (tb <= t_end) {
            integral += 0.5 * (va + vb) * (tb - ta);
        } else {
            const double frac = (t_end - ta) / (tb - ta);
            const double vend = va + frac * (vb - va);
            integral += 0.5 * (va + vend) * (t_end - ta);
        }
    }
    return integral / (t_end - t0);
}

} // namespace vdw
