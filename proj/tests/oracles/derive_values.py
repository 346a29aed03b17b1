"""Independent reference values frozen into the C++ test suite.

Nothing here shares code with the library. The Green dyadic is obtained by symbolic
differentiation of the scalar Green function, and the potentials are contracted from it
entrywise. The pulse potentials are evaluated by collapsing both photon-frequency integrals
onto derivatives of delta functions at |s| = R, which leaves one- and two-dimensional time
integrals done by adaptive quadrature.

Run:  python3 tests/oracles/derive_values.py
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 30
I = mp.mpc(0, 1)


def green(kval, rvec):
    """G_ij = (delta_ij + d_i d_j / k^2) e^{ikr} / (4 pi r) at real k > 0."""
    x, y, z, k = sp.symbols("x y z k", real=True)
    r = sp.sqrt(x**2 + y**2 + z**2)
    phi = sp.exp(sp.I * k * r) / (4 * sp.pi * r)
    xs = (x, y, z)
    subs = {x: rvec[0], y: rvec[1], z: rvec[2], k: kval}
    g = mp.matrix(3, 3)
    for i in range(3):
        for j in range(3):
            e = (1 if i == j else 0) * phi + sp.diff(phi, xs[i], xs[j]) / k**2
            g[i, j] = mp.mpmathify(sp.N(e.subs(subs), 40))
    return g


def sandwich(m, u, v):
    return sum(u[i] * m[i, j] * v[j] for i in range(3) for j in range(3))


def re_m(m):
    return m.apply(mp.re)


def im_m(m):
    return m.apply(mp.im)


def banner(title):
    print("\n# " + title)


xhat = (1, 0, 0)

banner("green_dyadic, k = 1, R = 2 z")
g = green(1, (0, 0, 2))
for i in range(3):
    print(f"G[{i}][{i}] = {mp.nstr(g[i, i], 17)}")

banner("Im green_dyadic, k = 1, R = 1e-3 z (limit k / 6 pi = %s)" % mp.nstr(1 / (6 * mp.pi), 17))
g0 = green(1, (0, 0, mp.mpf("1e-3")))
for i in range(3):
    print(f"ImG[{i}][{i}] = {mp.nstr(mp.im(g0[i, i]), 17)}")

banner("far field, k_A = 1, k_B = 0.99, x dipoles, R = 30 z, t = 100")
ka, kb, R, t = mp.mpf(1), mp.mpf("0.99"), mp.mpf(30), mp.mpf(100)
d = ka - kb
u = 1 / (16 * mp.pi**2 * d)  # U contraction of alpha alpha for x dipoles with R along z
wa_ff = u / R**2 * (ka**4 * mp.cos(2 * ka * R) - kb**4 * mp.cos(2 * kb * R + d * t))
wb_ff = u / R**2 * (ka**4 - kb**2 * ka**2 * mp.cos(d * (t - R)))
print("w_a_farfield =", mp.nstr(wa_ff, 17))
print("w_b_farfield =", mp.nstr(wb_ff, 17))

banner("quasistationary, k_A = 1, Delta = 0.01, x dipoles, R = 2 z")
g = green(1, (0, 0, 2))
re_c = mp.re(sandwich(g, xhat, xhat))
im_c = mp.im(sandwich(g, xhat, xhat))
pref = (4 * mp.pi) ** 2 / (16 * mp.pi**2 * mp.mpf("0.01"))
print("w_a_qs =", mp.nstr(pref * (re_c**2 - im_c**2), 17))
print("w_b_qs =", mp.nstr(pref * (re_c**2 + im_c**2), 17))

banner("identical atoms, ladder (0, 1, 2.01), x dipoles, R = 3 z")
g = green(1, (0, 0, 3))
re_c = mp.re(sandwich(g, xhat, xhat))
im_c = mp.im(sandwich(g, xhat, xhat))
pref = -2 / mp.mpf("0.01")
print("e0 =", mp.nstr(pref * re_c**2, 17))
print("eprime =", mp.nstr(pref * (re_c**2 - im_c**2), 17))

banner("force on A from U aa k^4 cos(2kR)/R^2, k = 1, Delta = 0.01, x dipoles, R = 50.3 z")
Rs = sp.symbols("R", positive=True)
V = sp.cos(2 * Rs) / Rs**2 / (16 * sp.pi**2 * sp.Rational(1, 100))
F = -sp.diff(V, Rs)
print("F_A . Rhat =", mp.nstr(mp.mpmathify(sp.N(F.subs(Rs, sp.Rational(503, 10)), 40)), 17))


def pulse_b(R, Om, T, wa=mp.mpf(1), wb=mp.mpf("0.99")):
    """Pulse potential of B, x dipoles, R along z (a = 1, b = 1)."""
    R, Om, T = map(mp.mpf, (R, Om, T))
    tau = mp.pi / Om
    a = b = mp.mpf(1)
    env = lambda x: mp.sin(Om * x / 2) ** 2

    def h_apply(gf, s0, conj):
        d0 = gf(s0)
        d1 = mp.diff(gf, s0, 1)
        d2 = mp.diff(gf, s0, 2)
        sgn = -1 if conj else 1
        return -a * d2 - sgn * b / R * d1 - b / R**2 * d0

    def g1(s):
        ph = lambda tt: mp.exp(I * (T - tt) * wb) * mp.exp(I * wa * (tt - s))
        out = 0
        lo, hi = tau + s, T
        if hi > lo:
            out += mp.quad(ph, [lo, hi])
        lo, hi = max(tau, s), min(T, tau + s)
        if hi > lo:
            out += mp.quad(lambda tt: ph(tt) * env(tt - s), [lo, hi])
        lo, hi = s, tau
        if hi > lo:
            out += mp.quad(lambda tt: ph(tt) * env(tt - s), [lo, hi])
        return out

    def g2(s):
        tpp = T + s
        w = 1 if tpp > tau else env(tpp)
        return w * mp.exp(-I * wa * tpp)

    a1 = -h_apply(g1, R, True) / (4 * I * R)
    a2 = h_apply(g2, -R, False) / (4 * I * R)
    return mp.re(I * a1 * a2) / mp.pi**2


def pulse_a(R, Om, T, wa=mp.mpf(1), wb=mp.mpf("0.99")):
    """Pulse potential of A, x dipoles, R along z (a = 1, b = 1)."""
    mp.mp.dps = 25
    R, Om, T = map(mp.mpf, (R, Om, T))
    tau = mp.pi / Om
    a = b = mp.mpf(1)
    env = lambda x: 1 if x > tau else mp.sin(Om * x / 2) ** 2

    def G(s1, s2):
        lo, hi = -s2, T + s1
        if hi <= lo:
            return mp.mpc(0)
        f = lambda tp: mp.exp(I * wa * T) * mp.exp(-I * (T + s1 - tp) * wb) * mp.exp(-I * (tp + s2) * wa) * env(tp + s2)
        pts = [lo] + ([tau - s2] if lo < tau - s2 < hi else []) + [hi]
        return mp.quad(f, pts)

    co = {0: -b / R**2, 1: -b / R, 2: -a}
    tot = 0
    for n1 in range(3):
        for n2 in range(3):
            tot += co[n1] * co[n2] * mp.diff(G, (-R, -R), (n1, n2))
    q = I * tot / (4 * I * R) ** 2
    mp.mp.dps = 30
    return mp.re(q) / mp.pi**2


banner("pulse potentials, k_A = 1, k_B = 0.99, x dipoles, R along z, no damping")
for pt in [(2, "0.1", 40), (10, "0.1", 60), (3, "0.015", 230)]:
    print(f"w_b_pulse{pt} =", mp.nstr(pulse_b(*pt), 15))
for pt in [(10, "0.1", 60), (2, "0.1", 40)]:
    print(f"w_a_pulse{pt} =", mp.nstr(pulse_a(*pt), 15))
