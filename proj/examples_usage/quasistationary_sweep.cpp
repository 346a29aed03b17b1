// Quasistationary potentials of an excited atom A and a ground atom B across the near and far zones.
#include <cmath>
#include <cstdio>

#include "vdw/vdw.hpp"

int main() {
    vdw::AtomPair pair;  // omega_A = 1, omega_B = 0.99, parallel dipoles along x
    std::printf("%10s %16s %16s %16s\n", "kR", "w_a_qs", "w_b_qs", "w_a far field");
    for (double kr = 0.5; kr <= 64.0; kr *= 2.0) {
        const vdw::AtomPair p = pair.with_separation(vdw::Separation::along_z(kr));
        std::printf("%10.3g %16.8e %16.8e %16.8e\n", kr, vdw::w_a_quasistationary(p), vdw::w_b_quasistationary(p),
                    vdw::w_a_quasistationary_farfield(p));
    }

    const vdw::AtomPair p = pair.with_separation(vdw::Separation::along_z(25.0));
    const auto f = vdw::vdw_force(vdw::Atom::A, p, [](const vdw::AtomPair& q) { return vdw::w_a_quasistationary(q); },
                                  1e-3);
    std::printf("force on A at kR = 25: (%.6e, %.6e, %.6e)\n", f.force[0], f.force[1], f.force[2]);

    // The same separation in SI: omega_A = 3e15 rad/s, R = 1 um, 1 debye dipoles.
    vdw::AtomPair si;
    si.omega_a = vdw::units::frequency_to_natural(3.0e15);
    si.omega_b = vdw::units::frequency_to_natural(2.97e15);
    const double debye = vdw::units::dipole_to_natural(3.33564095198152e-30);
    si.mu_a = {debye, 0.0, 0.0};
    si.mu_b = {debye, 0.0, 0.0};
    si.sep = vdw::Separation::along_z(1e-6);
    std::printf("w_b_qs at 1 um: %.4e J\n", vdw::units::energy_to_si(vdw::w_b_quasistationary(si)));
}
