#pragma once

// Small 3x3 complex tensor algebra and the free-space dyadic Green function.
// Natural units: hbar = c = eps0 = 1, so a frequency is also a wavenumber.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "vdw/errors.hpp"

namespace vdw {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr double pi = std::numbers::pi;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

/// Dense 3x3 complex tensor.
struct ComplexDyadic {
    std::array<std::array<cplx, 3>, 3> entries{};

    static ComplexDyadic identity() {
        ComplexDyadic d;
        for (int i = 0; i < 3; ++i) d.entries[i][i] = 1.0;
        return d;
    }

    static ComplexDyadic outer(const Vec3& a, const Vec3& b) {
        ComplexDyadic d;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) d.entries[i][j] = a[i] * b[j];
        return d;
    }

    cplx& operator()(int i, int j) { return entries[i][j]; }
    const cplx& operator()(int i, int j) const { return entries[i][j]; }

    ComplexDyadic& operator+=(const ComplexDyadic& o) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) entries[i][j] += o.entries[i][j];
        return *this;
    }
    ComplexDyadic& operator-=(const ComplexDyadic& o) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) entries[i][j] -= o.entries[i][j];
        return *this;
    }
    ComplexDyadic& operator*=(cplx s) {
        for (auto& row : entries)
            for (auto& e : row) e *= s;
        return *this;
    }

    friend ComplexDyadic operator+(ComplexDyadic a, const ComplexDyadic& b) { return a += b; }
    friend ComplexDyadic operator-(ComplexDyadic a, const ComplexDyadic& b) { return a -= b; }
    friend ComplexDyadic operator*(cplx s, ComplexDyadic a) { return a *= s; }
    friend ComplexDyadic operator*(ComplexDyadic a, cplx s) { return a *= s; }

    friend ComplexDyadic operator*(const ComplexDyadic& a, const ComplexDyadic& b) {
        ComplexDyadic c;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) c.entries[i][j] += a.entries[i][k] * b.entries[k][j];
        return c;
    }

    ComplexDyadic transpose() const {
        ComplexDyadic t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t.entries[i][j] = entries[j][i];
        return t;
    }

    cplx trace() const { return entries[0][0] + entries[1][1] + entries[2][2]; }

    ComplexDyadic real_part() const {
        ComplexDyadic r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.entries[i][j] = entries[i][j].real();
        return r;
    }
    ComplexDyadic imag_part() const {
        ComplexDyadic r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.entries[i][j] = entries[i][j].imag();
        return r;
    }

    bool is_symmetric() const {
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (entries[i][j] != entries[j][i]) return false;
        return true;
    }

    /// u . D . v without conjugation.
    cplx sandwich(const Vec3& u, const Vec3& v) const {
        cplx s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += u[i] * entries[i][j] * v[j];
        return s;
    }
};

/// Interatomic separation R = R_A - R_B. Coincident atoms are rejected.
class Separation {
public:
    explicit Separation(const Vec3& v) : vector_(v), magnitude_(norm(v)) {
        if (!(magnitude_ > 0.0) || !std::isfinite(magnitude_))
            throw DomainError("separation must have finite positive magnitude");
    }

    /// Separation of length r along z.
    static Separation along_z(double r) { return Separation({0.0, 0.0, r}); }

    const Vec3& vector() const { return vector_; }
    double magnitude() const { return magnitude_; }
    Vec3 unit() const { return (1.0 / magnitude_) * vector_; }

    /// Same direction, new magnitude.
    Separation with_magnitude(double r) const { return Separation(r * unit()); }

private:
    Vec3 vector_;
    double magnitude_;
};

/// alpha = I - R R / R^2, the projector transverse to R.
inline ComplexDyadic alpha_tensor(const Separation& sep) {
    const Vec3 u = sep.unit();
    ComplexDyadic a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a.entries[i][j] = (i == j ? 1.0 : 0.0) - u[i] * u[j];
    return a;
}

/// beta = I - 3 R R / R^2.
inline ComplexDyadic beta_tensor(const Separation& sep) {
    const Vec3 u = sep.unit();
    ComplexDyadic b;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b.entries[i][j] = (i == j ? 1.0 : 0.0) - 3.0 * (u[i] * u[j]);
    return b;
}

/// Free-space electric dyadic Green function at real frequency omega > 0 (k = omega):
///   G = (k e^{ikR} / 4 pi) [alpha/(kR) + i beta/(kR)^2 - beta/(kR)^3].
inline ComplexDyadic green_dyadic(const Separation& sep, double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("green_dyadic requires a finite frequency omega > 0");
    const double k = omega;
    const double x = k * sep.magnitude();
    const cplx pref = k * std::exp(cplx(0.0, x)) / (4.0 * pi);
    const cplx ca = pref / x;
    const cplx cb = pref * (cplx(0.0, 1.0) / (x * x) - 1.0 / (x * x * x));
    const Vec3 u = sep.unit();
    ComplexDyadic g;
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            const double delta = (i == j) ? 1.0 : 0.0;
            const double uu = u[i] * u[j];
            g.entries[i][j] = ca * (delta - uu) + cb * (delta - 3.0 * uu);
            g.entries[j][i] = g.entries[i][j];
        }
    }
    return g;
}

} // namespace vdw
