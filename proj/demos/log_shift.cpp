// Radial spreading in N = 2 from a compactly supported plateau. Prints the fitted front law
// eta(t) ~ c t - B log t + r0 next to the speed-curve prediction B = (N-1) c_sharp.
// Usage: log_shift [T] [dr]

#include <cstdio>
#include <cstdlib>

#include "dnlfront/analysis.hpp"

int main(int argc, char** argv) {
    using namespace dnlfront;
    const double T = argc > 1 ? std::atof(argv[1]) : 100.0;
    const double dr = argc > 2 ? std::atof(argv[2]) : 0.05;
    const int N = 2;
    const Params P = validate_params(2.0, 2.0, N);
    const ReactionSpec h = make_reaction(ReactionKind::Monostable);

    const SpeedCurve sc = speed_curve(P, h, {0.0, 0.02}, 1e-9);
    const SubwaveProfile sw = subwave_profile(P, h, 0.0, 0.5, 0.9);
    DatumSpec d;
    d.kind = DatumKind::Plateau;
    d.rho = 5.0;
    RadialField f = init_datum(d, P, make_field(Geometry::Radial, N, 1.2 * T + 30.0, dr), &sw);

    Sampling s;
    s.dt_sample = 0.5;
    const SimulationRun run = dnlfront::run(std::move(f), P, h, T, s);
    const FrontFit fit = fit_front(run.times, run.eta, 0.5);

    std::printf("T = %g, dr = %g, steps = %zu\n", T, dr, run.steps);
    std::printf("c_hat = %.6f (c = %.6f)\n", fit.c_hat, sc.c_values[0]);
    std::printf("B_hat = %.4f (predicted %.4f)\n", fit.B_hat, (N - 1) * sc.c_sharp);
}
