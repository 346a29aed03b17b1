// Level shifts of two identical three-level atoms prepared in the middle level.
#include <cstdio>

#include "vdw/vdw.hpp"

int main() {
    vdw::ThreeLevelConfig ladder;
    std::printf("%8s %16s %16s %16s\n", "kR", "e0", "eprime", "e0 - eprime");
    for (double kr = 1.0; kr <= 20.0; kr += 1.0) {
        const auto c = ladder.with_separation(vdw::Separation::along_z(kr));
        const double e0 = vdw::shift_identical_e0(c), ep = vdw::shift_identical_eprime(c);
        std::printf("%8.1f %16.8e %16.8e %16.8e\n", kr, e0, ep, e0 - ep);
    }

    const auto c = ladder.with_separation(vdw::Separation::along_z(3.0));
    const auto spec = vdw::default_quadrature_spec(c.delta_pm());
    const auto rep = vdw::oracle_identical(c, vdw::IdenticalShift::e0, spec);
    std::printf("oracle e0 at kR = 3: %.8e (closed form %.8e, eta extrapolated from %.1e)\n", rep.value,
                vdw::shift_identical_e0(c), rep.eta_table.front().first);
}
