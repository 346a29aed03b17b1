#pragma once

// Nested time integrals of exponential integrands, reduced in closed form.
//
// A Nest is  prefactor * e^{rho_T T} * Int ds_0 e^{r_0 s_0} env_0(s_0) Int ds_1 e^{r_1 s_1} env_1(s_1) ...
// with segments listed outer to inner. Every rate is affine in the two photon frequencies
// (omega, omega'). A Factor is a sum of nests and a TimeKernel is a product of factors.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "vdw/errors.hpp"
#include "vdw/tensor.hpp"

namespace vdw {

/// constant + i (omega_coeff * omega + omegaprime_coeff * omega').
struct AffineRate {
    cplx constant{0.0, 0.0};
    double omega_coeff = 0.0;
    double omegaprime_coeff = 0.0;

    cplx at(double omega, double omega_prime) const {
        return {constant.real(), constant.imag() + omega_coeff * omega + omegaprime_coeff * omega_prime};
    }
    bool depends_on_omega() const { return omega_coeff != 0.0; }
    bool depends_on_omegaprime() const { return omegaprime_coeff != 0.0; }
};

enum class Envelope { none, sin_squared, cos_half, sin_half };
enum class LowerBound { minus_infinity, zero, pulse_end };
enum class UpperBound { enclosing, observation, pulse_end };

struct Segment {
    AffineRate rate;
    Envelope envelope = Envelope::none;
    LowerBound lower = LowerBound::zero;
    UpperBound upper = UpperBound::enclosing;
};

struct Nest {
    cplx prefactor{1.0, 0.0};
    AffineRate observation_rate;
    std::vector<Segment> segments;  // outer to inner

    bool depends_on_omega() const {
        if (observation_rate.depends_on_omega()) return true;
        for (const auto& s : segments)
            if (s.rate.depends_on_omega()) return true;
        return false;
    }
    bool depends_on_omegaprime() const {
        if (observation_rate.depends_on_omegaprime()) return true;
        for (const auto& s : segments)
            if (s.rate.depends_on_omegaprime()) return true;
        return false;
    }
};

struct Factor {
    std::vector<Nest> nests;

    bool depends_on_omega() const {
        for (const auto& n : nests)
            if (n.depends_on_omega()) return true;
        return false;
    }
    bool depends_on_omegaprime() const {
        for (const auto& n : nests)
            if (n.depends_on_omegaprime()) return true;
        return false;
    }
};

struct TimeKernel {
    std::vector<Factor> factors;
    double rabi = 0.0;  // Omega; pulse_end = pi / Omega
};

/// Rates closer than this (absolute, natural units) are treated as coincident.
inline constexpr double confluent_threshold = 1e-12;

/// Checks nesting and phase balance. Throws KernelError when malformed.
inline void validate(const TimeKernel& kernel) {
    if (kernel.factors.empty()) throw KernelError("time kernel has no factors");
    bool needs_pulse = false;
    for (const auto& f : kernel.factors) {
        if (f.nests.empty()) throw KernelError("time kernel factor has no nests");
        for (const auto& n : f.nests) {
            if (n.segments.empty()) throw KernelError("nest has no time segments");
            if (n.segments.front().upper == UpperBound::enclosing)
                throw KernelError("outermost segment cannot be bounded by an enclosing variable");
            double sum_w = n.observation_rate.omega_coeff;
            double sum_wp = n.observation_rate.omegaprime_coeff;
            for (const auto& s : n.segments) {
                sum_w += s.rate.omega_coeff;
                sum_wp += s.rate.omegaprime_coeff;
                if (s.envelope != Envelope::none || s.lower == LowerBound::pulse_end ||
                    s.upper == UpperBound::pulse_end)
                    needs_pulse = true;
                if (s.lower == LowerBound::pulse_end && s.upper == UpperBound::pulse_end)
                    throw KernelError("segment bounded by pulse_end on both sides");
            }
            // At t = t' = t'' = T the photon phases of the generating expression cancel.
            if (std::abs(sum_w) > 1e-12 || std::abs(sum_wp) > 1e-12)
                throw KernelError("nest is not phase balanced in omega / omega'");
        }
    }
    if (needs_pulse && !(kernel.rabi > 0.0)) throw KernelError("pulse bounds or envelopes require rabi > 0");
}

/// coef * s^power * e^{rate s}; wp_coeff is the omega' coefficient contained in Im(rate).
struct ExpTerm {
    cplx coef;
    int power;
    cplx rate;
    double wp_coeff = 0.0;
};

namespace detail {

struct EnvelopePart {
    cplx coef;
    cplx rate;
};

inline int envelope_parts(Envelope env, double rabi, EnvelopePart* out) {
    const cplx i(0.0, 1.0);
    switch (env) {
    case Envelope::none:
        out[0] = {1.0, 0.0};
        return 1;
    case Envelope::sin_squared:
        out[0] = {0.5, 0.0};
        out[1] = {-0.25, i * rabi};
        out[2] = {-0.25, -i * rabi};
        return 3;
    case Envelope::cos_half:
        out[0] = {0.5, 0.5 * i * rabi};
        out[1] = {0.5, -0.5 * i * rabi};
        return 2;
    case Envelope::sin_half:
        out[0] = {-0.5 * i, 0.5 * i * rabi};
        out[1] = {0.5 * i, -0.5 * i * rabi};
        return 2;
    }
    return 0;
}

inline double factorial_ratio(int m, int j) {
    double r = 1.0;
    for (int q = m - j + 1; q <= m; ++q) r *= q;
    return r;
}

/// Antiderivative of s^m e^{rho s} evaluated at s.
inline cplx antiderivative(int m, cplx rho, double s) {
    if (std::abs(rho) < confluent_threshold) return std::pow(s, m + 1) / double(m + 1);
    cplx acc = 0.0;
    cplx inv = 1.0 / rho;
    cplx inv_pow = inv;
    double sign = 1.0;
    for (int j = 0; j <= m; ++j) {
        acc += sign * factorial_ratio(m, j) * std::pow(s, m - j) * inv_pow;
        inv_pow *= inv;
        sign = -sign;
    }
    return std::exp(rho * s) * acc;
}

inline void merge_like_terms(std::vector<ExpTerm>& terms) {
    std::size_t out = 0;
    for (std::size_t a = 0; a < terms.size(); ++a) {
        bool merged = false;
        for (std::size_t b = 0; b < out; ++b) {
            if (terms[b].power == terms[a].power && std::abs(terms[b].rate - terms[a].rate) < confluent_threshold) {
                terms[b].coef += terms[a].coef;
                merged = true;
                break;
            }
        }
        if (!merged) terms[out++] = terms[a];
    }
    terms.resize(out);
}

} // namespace detail

/// Scratch space reused across reductions so the hot loop does not allocate.
struct ReductionWorkspace {
    std::vector<ExpTerm> carry;
    std::vector<ExpTerm> expanded;
};

/// Integrates `segments[first..last]` (inner to outer, `last` >= `first` in outer-to-inner
/// indexing, processed from index `last` down to `first`) given a carry already expressed in the
/// variable of segment `last`. On return `ws.carry` holds the result in the variable of segment
/// `first - 1` (or a single constant term when segment `first` has a constant upper bound).
inline void integrate_segments(const Nest& nest, int first, int last, double omega, double omega_prime, double t,
                               double rabi, ReductionWorkspace& ws) {
    const double tau = rabi > 0.0 ? pi / rabi : 0.0;
    detail::EnvelopePart parts[3];
    for (int idx = last; idx >= first; --idx) {
        const Segment& seg = nest.segments[static_cast<std::size_t>(idx)];
        const cplx r = seg.rate.at(omega, omega_prime);
        const int np = detail::envelope_parts(seg.envelope, rabi, parts);

        ws.expanded.clear();
        for (const auto& term : ws.carry)
            for (int e = 0; e < np; ++e)
                ws.expanded.push_back({term.coef * parts[e].coef, term.power, term.rate + r + parts[e].rate,
                                       term.wp_coeff + seg.rate.omegaprime_coeff});
        detail::merge_like_terms(ws.expanded);

        const bool symbolic = seg.upper == UpperBound::enclosing;
        const double upper = seg.upper == UpperBound::observation ? t : tau;
        const bool lower_inf = seg.lower == LowerBound::minus_infinity;
        const double lower = seg.lower == LowerBound::pulse_end ? tau : 0.0;

        ws.carry.clear();
        cplx constant = 0.0;
        for (const auto& term : ws.expanded) {
            const bool confluent = std::abs(term.rate) < confluent_threshold;
            if (symbolic) {
                if (confluent) {
                    ws.carry.push_back({term.coef / double(term.power + 1), term.power + 1, 0.0, term.wp_coeff});
                } else {
                    const cplx inv = 1.0 / term.rate;
                    cplx inv_pow = inv;
                    double sign = 1.0;
                    for (int j = 0; j <= term.power; ++j) {
                        ws.carry.push_back(
                            {term.coef * sign * detail::factorial_ratio(term.power, j) * inv_pow, term.power - j,
                             term.rate, term.wp_coeff});
                        inv_pow *= inv;
                        sign = -sign;
                    }
                }
            } else {
                constant += term.coef * detail::antiderivative(term.power, term.rate, upper);
            }
            if (lower_inf) {
                if (confluent || !(term.rate.real() > 0.0))
                    throw KernelError("integral from -infinity diverges: rate has non-positive real part");
            } else {
                constant -= term.coef * detail::antiderivative(term.power, term.rate, lower);
            }
        }
        if (constant != 0.0 || ws.carry.empty()) ws.carry.push_back({constant, 0, 0.0});
        detail::merge_like_terms(ws.carry);
    }
}

/// Multiplies the fully reduced carry by the prefactor and observation phase.
inline cplx finish_nest(const Nest& nest, double omega, double omega_prime, double t, const ReductionWorkspace& ws) {
    cplx sum = 0.0;
    for (const auto& term : ws.carry) {
        // After the outermost segment every term is constant; guard against malformed input.
        if (term.power != 0 || term.rate != 0.0) throw KernelError("outermost segment left a variable-dependent term");
        sum += term.coef;
    }
    return nest.prefactor * std::exp(nest.observation_rate.at(omega, omega_prime) * t) * sum;
}

inline cplx reduce_nest(const Nest& nest, double omega, double omega_prime, double t, double rabi,
                        ReductionWorkspace& ws) {
    ws.carry.assign(1, ExpTerm{1.0, 0, 0.0});
    integrate_segments(nest, 0, static_cast<int>(nest.segments.size()) - 1, omega, omega_prime, t, rabi, ws);
    return finish_nest(nest, omega, omega_prime, t, ws);
}

/// Exact value of the kernel's time integrals at (omega, omega', T).
inline cplx reduce_time_kernel(const TimeKernel& kernel, double omega, double omega_prime, double t) {
    validate(kernel);
    ReductionWorkspace ws;
    cplx product = 1.0;
    for (const auto& f : kernel.factors) {
        cplx sum = 0.0;
        for (const auto& n : f.nests) sum += reduce_nest(n, omega, omega_prime, t, kernel.rabi, ws);
        product *= sum;
    }
    return product;
}

} // namespace vdw
