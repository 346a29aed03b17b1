// Potentials after a pi pulse on atom A, checked against the numerical oracle at one time.
#include <cstdio>

#include "vdw/vdw.hpp"

int main() {
    vdw::AtomPair p;
    p.sep = vdw::Separation::along_z(10.0);
    const vdw::PulseParams pulse{0.1};  // Omega = 10 |Delta|

    std::printf("%8s %16s %16s\n", "t", "w_a_pulse", "w_b_pulse");
    for (double t = 30.0; t <= 120.0; t += 10.0)
        std::printf("%8.1f %16.8e %16.8e\n", t, vdw::w_a_pulse(p, pulse, t), vdw::w_b_pulse(p, pulse, t));

    const double t = 60.0;
    const auto spec = vdw::default_quadrature_spec(p.detuning());
    const auto rep = vdw::oracle_w_pulse(p, pulse, t, vdw::WhichAtom::B, spec);
    std::printf("oracle W_B at t = %.0f: %.10e (closed form %.10e, grid level %d)\n", t, rep.value,
                vdw::w_b_pulse(p, pulse, t), rep.refine_steps);

    // At Omega = |Delta| the general form is singular; use the resonant branch.
    const vdw::PulseParams resonant{p.detuning()};
    std::printf("resonant branch at t = 400: w_a %.8e, w_b %.8e\n", vdw::w_a_pulse_resonant(p, resonant, 400.0),
                vdw::w_b_pulse_resonant(p, resonant, 400.0));
}
