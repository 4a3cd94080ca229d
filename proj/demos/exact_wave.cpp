// Critical wave of u_t = (u^2)_xx + u(1-u) against its closed form (1 - e^{xi/2})_+.

#include <cmath>
#include <cstdio>

#include "dnlfront/waves.hpp"

int main() {
    using namespace dnlfront;
    const Params P = validate_params(2.0, 2.0, 1);
    const ReactionSpec h = make_reaction(ReactionKind::Monostable);
    const WaveProfile w = critical_wave(P, h, 0.0, 1e-9);

    std::printf("c = %.12f\n", w.c);
    std::printf("%8s %14s %14s\n", "xi", "U", "closed form");
    for (double xi : {-0.5, -1.0, -2.0, -5.0, -10.0}) {
        std::printf("%8.2f %14.10f %14.10f\n", xi, w.U_at(xi), 1.0 - std::exp(xi / 2.0));
    }
    const PressureView pv = pressure_view(w, h);
    std::printf("V'(0-) = %.8f, V''(0-) = %.8f\n", pv.Vp0, pv.Vpp0);
}
