#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "vdw/errors.hpp"
#include "vdw/tensor.hpp"

namespace vdw {

/// Regime flags. These never change a returned value; they tell the caller that a formula
/// is being evaluated outside the regime it was derived for.
enum class Warning : std::uint32_t {
    none = 0,
    detuning_vs_linewidth = 1u << 0,  // |Delta_AB| < 10 (Gamma_A + Gamma_B)/2
    not_far_field = 1u << 1,          // k R < 10 for a far-field expression
    strong_pulse = 1u << 2,           // Omega > 0.1 omega_A
    not_quasiresonant = 1u << 3,      // |Delta| > 0.1 of the transition frequency
    ladder_detuning = 1u << 4,        // |Delta_{+-}| > 0.1 of either ladder gap
    dissipation = 1u << 5,            // Gamma t > 0.1 where Gamma t << 1 is assumed
    near_resonant_pulse = 1u << 6,    // |Omega| close to |Delta_AB| in the off-resonant branch
};

class Warnings {
public:
    Warnings() = default;
    Warnings(Warning w) : bits_(static_cast<std::uint32_t>(w)) {}

    Warnings& operator|=(Warnings o) {
        bits_ |= o.bits_;
        return *this;
    }
    friend Warnings operator|(Warnings a, Warnings b) { return a |= b; }

    bool has(Warning w) const { return (bits_ & static_cast<std::uint32_t>(w)) != 0; }
    bool any() const { return bits_ != 0; }
    std::uint32_t bits() const { return bits_; }

    /// Pipe-separated flag names, or "-" when empty.
    std::string to_string() const {
        static constexpr struct {
            Warning flag;
            const char* name;
        } names[] = {
            {Warning::detuning_vs_linewidth, "detuning_vs_linewidth"},
            {Warning::not_far_field, "not_far_field"},
            {Warning::strong_pulse, "strong_pulse"},
            {Warning::not_quasiresonant, "not_quasiresonant"},
            {Warning::ladder_detuning, "ladder_detuning"},
            {Warning::dissipation, "dissipation"},
            {Warning::near_resonant_pulse, "near_resonant_pulse"},
        };
        std::string out;
        for (const auto& n : names) {
            if (!has(n.flag)) continue;
            if (!out.empty()) out += '|';
            out += n.name;
        }
        return out.empty() ? "-" : out;
    }

private:
    std::uint32_t bits_ = 0;
};

/// Two dissimilar two-level atoms: A (initially excited or pulsed) and B (ground).
struct AtomPair {
    double omega_a = 1.0;
    double omega_b = 0.99;
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    Vec3 mu_a{1.0, 0.0, 0.0};
    Vec3 mu_b{1.0, 0.0, 0.0};
    Separation sep = Separation::along_z(10.0);

    double detuning() const { return omega_a - omega_b; }
    double k_a() const { return omega_a; }
    double k_b() const { return omega_b; }
    double r() const { return sep.magnitude(); }

    AtomPair with_separation(const Separation& s) const {
        AtomPair p = *this;
        p.sep = s;
        return p;
    }
};

/// Throws DomainError on hard violations and returns regime warnings otherwise.
inline Warnings validate(const AtomPair& p) {
    if (!(p.omega_a > 0.0) || !(p.omega_b > 0.0) || !std::isfinite(p.omega_a) || !std::isfinite(p.omega_b))
        throw DomainError("atom transition frequencies must be finite and positive");
    if (!(p.gamma_a >= 0.0) || !(p.gamma_b >= 0.0))
        throw DomainError("linewidths must be non-negative");
    const double delta = p.detuning();
    if (delta == 0.0) throw DomainError("detuning Delta_AB must be non-zero");
    for (double c : p.mu_a)
        if (!std::isfinite(c)) throw DomainError("mu_a must be finite");
    for (double c : p.mu_b)
        if (!std::isfinite(c)) throw DomainError("mu_b must be finite");
    Warnings w;
    if (std::abs(delta) < 10.0 * 0.5 * (p.gamma_a + p.gamma_b)) w |= Warning::detuning_vs_linewidth;
    if (std::abs(delta) > 0.1 * std::min(p.omega_a, p.omega_b)) w |= Warning::not_quasiresonant;
    return w;
}

/// Far-field regime check, k R >= 10 for both atoms.
inline Warnings far_field_warning(const AtomPair& p) {
    const double kr = std::min(p.k_a(), p.k_b()) * p.r();
    return kr < 10.0 ? Warnings(Warning::not_far_field) : Warnings();
}

/// Resonant pi pulse on atom A. duration = pi / rabi.
struct PulseParams {
    double rabi = 0.1;

    double duration() const { return pi / rabi; }
};

inline Warnings validate(const PulseParams& pulse, const AtomPair& p) {
    if (!(pulse.rabi > 0.0) || !std::isfinite(pulse.rabi))
        throw DomainError("pulse Rabi frequency must be finite and positive");
    Warnings w;
    if (pulse.rabi > 0.1 * p.omega_a) w |= Warning::strong_pulse;
    return w;
}

/// Two identical three-level atoms |-> -> |0> -> |+>, both prepared in |0>.
struct ThreeLevelConfig {
    double omega_minus = 0.0;
    double omega_0 = 1.0;
    double omega_plus = 2.01;
    Vec3 mu_minus{1.0, 0.0, 0.0};  // <0|d|->
    Vec3 mu_plus{1.0, 0.0, 0.0};   // <0|d|+>
    Separation sep = Separation::along_z(3.0);

    double lower_gap() const { return omega_0 - omega_minus; }
    double upper_gap() const { return omega_plus - omega_0; }
    /// Delta_{+-} = (omega_+ - omega_0) - (omega_0 - omega_-).
    double delta_pm() const { return upper_gap() - lower_gap(); }
    double r() const { return sep.magnitude(); }

    ThreeLevelConfig with_separation(const Separation& s) const {
        ThreeLevelConfig c = *this;
        c.sep = s;
        return c;
    }
};

inline Warnings validate(const ThreeLevelConfig& c) {
    if (!(c.lower_gap() > 0.0) || !(c.upper_gap() > 0.0))
        throw DomainError("ladder energies must increase: omega_- < omega_0 < omega_+");
    if (c.delta_pm() == 0.0) throw DomainError("ladder detuning Delta_{+-} must be non-zero");
    Warnings w;
    if (std::abs(c.delta_pm()) > 0.1 * std::min(c.lower_gap(), c.upper_gap())) w |= Warning::ladder_detuning;
    return w;
}

/// Rank-4 coupling U_ijpq = mu^A_i mu^A_q mu^B_j mu^B_p / ((4 pi)^2 Delta_AB).
class CouplingU {
public:
    explicit CouplingU(const AtomPair& p) {
        const double delta = p.detuning();
        if (delta == 0.0) throw DomainError("coupling tensor diverges at zero detuning");
        const double scale = 1.0 / (16.0 * pi * pi * delta);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int q = 0; q < 3; ++q)
                    for (int r = 0; r < 3; ++r)
                        u_[index(i, j, q, r)] = scale * p.mu_a[i] * p.mu_a[r] * p.mu_b[j] * p.mu_b[q];
    }

    double operator()(int i, int j, int p, int q) const { return u_[index(i, j, p, q)]; }

    /// U_ijpq X_ij Y_pq.
    cplx contract(const ComplexDyadic& x, const ComplexDyadic& y) const {
        cplx s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (x(i, j) == 0.0) continue;
                cplx inner = 0.0;
                for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q) inner += u_[index(i, j, p, q)] * y(p, q);
                s += x(i, j) * inner;
            }
        return s;
    }

private:
    static constexpr int index(int i, int j, int p, int q) { return ((i * 3 + j) * 3 + p) * 3 + q; }
    std::array<double, 81> u_{};
};

} // namespace vdw
