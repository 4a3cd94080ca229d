#include <gtest/gtest.h>

#include <cmath>

#include "dnlfront/pde.hpp"

using namespace dnlfront;

namespace {

const Params P2 = validate_params(2.0, 2.0, 1);
const ReactionSpec logistic = make_reaction(ReactionKind::Monostable);

double mass(const RadialField& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double a = i * f.dr, b = a + f.dr;
        s += f.u[i] * (std::pow(b, f.N) - std::pow(a, f.N)) / f.N;
    }
    return s;
}

DatumSpec kanel(double delta, double width) {
    DatumSpec d;
    d.kind = DatumKind::Kanel;
    d.delta = delta;
    d.width = width;
    return d;
}

}  // namespace

TEST(Grid, Layout) {
    RadialField f = make_field(Geometry::Radial, 2, 10.0, 0.5);
    EXPECT_EQ(f.size(), 20u);
    EXPECT_DOUBLE_EQ(f.r.front(), 0.25);
    EXPECT_DOUBLE_EQ(f.x_max(), 10.0);
    EXPECT_THROW(make_field(Geometry::Line, 2, 10.0, 0.5), DimensionError);
    EXPECT_THROW(make_field(Geometry::Radial, 1, 10.0, 0.5, -1.0), GridError);
    EXPECT_THROW(make_field(Geometry::Radial, 1, 0.5, 0.5), GridError);
}

TEST(Datum, KanelConstraints) {
    DatumSpec d = kanel(0.5, 1.0);
    d.beta = 1.0;  // needs beta > p/(m(p-1)) = 1
    EXPECT_THROW(init_datum(d, P2, make_field(Geometry::Radial, 1, 5.0, 0.1)), ConstraintError);
    d = kanel(0.5, 1.0);
    d.sigma = 2.0;  // needs sigma > p/(p-1) = 2
    EXPECT_THROW(init_datum(d, P2, make_field(Geometry::Radial, 1, 5.0, 0.1)), ConstraintError);
    EXPECT_THROW(init_datum(kanel(0.5, 8.0), P2, make_field(Geometry::Radial, 1, 5.0, 0.1)), GridError);
}

TEST(Datum, KanelShape) {
    RadialField f = init_datum(kanel(0.5, 1.0), P2, make_field(Geometry::Radial, 1, 5.0, 0.1));
    EXPECT_NEAR(f.u[0], 0.5 * std::pow(1.0 - std::pow(0.05, 3.0), 2.0), 1e-15);
    EXPECT_EQ(f.u[10], 0.0);
}

TEST(Datum, KindStrings) {
    for (auto k : {DatumKind::Zero, DatumKind::Constant, DatumKind::Kanel, DatumKind::Plateau, DatumKind::ClassA,
                   DatumKind::ExactWave})
        EXPECT_EQ(datum_kind_from_string(to_string(k)), k);
}

TEST(Solver, MassConservedWithoutReaction) {
    for (int N : {1, 2, 3}) {
        Params P = validate_params(2.0, 2.0, N);
        RadialField f = init_datum(kanel(0.8, 2.0), P, make_field(Geometry::Radial, N, 8.0, 0.05));
        double m0 = mass(f);
        SimulationRun r = run(f, P, zero_reaction(), 1.0);
        EXPECT_NEAR(mass(r.final_field), m0, 1e-12 * m0) << "N=" << N;
    }
}

TEST(Solver, MassConservedGenericExponents) {
    Params P = validate_params(1.5, 2.5, 2);
    DatumSpec d = kanel(0.8, 2.0);
    d.beta = 3.0;
    RadialField f = init_datum(d, P, make_field(Geometry::Radial, 2, 8.0, 0.05));
    double m0 = mass(f);
    SimulationRun r = run(f, P, zero_reaction(), 1.0);
    EXPECT_NEAR(mass(r.final_field), m0, 1e-12 * m0);
}

TEST(Solver, StepAboveBoundRejected) {
    RadialField f = init_datum(kanel(0.8, 1.0), P2, make_field(Geometry::Radial, 1, 4.0, 0.05));
    Solver s(P2, logistic, f);
    double dt = s.cfl_dt(f);
    EXPECT_GT(dt, 0.0);
    EXPECT_THROW(s.step(f, 2.0 * dt / s.cfl), CFLError);
    EXPECT_NO_THROW(s.step(f, dt));
}

TEST(Solver, ConstantStatesStay) {
    DatumSpec d;
    d.kind = DatumKind::Constant;
    d.value = 1.0;
    RadialField f = init_datum(d, P2, make_field(Geometry::Radial, 1, 20.0, 0.05));
    Solver s(P2, logistic, f);
    s.advance(f, 1.0);
    // the zero outer boundary drains only the far cells
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.r[i] < 5.0) EXPECT_NEAR(f.u[i], 1.0, 1e-12);
}

TEST(Solver, RadialInterfaceFluxVanishesAtOrigin) {
    Params P = validate_params(2.0, 2.0, 3);
    RadialField f = init_datum(kanel(0.8, 1.0), P, make_field(Geometry::Radial, 3, 4.0, 0.05));
    Solver s(P, logistic, f);
    std::vector<double> F = s.interface_fluxes(f);
    ASSERT_EQ(F.size(), f.size() + 1);
    EXPECT_EQ(F.front(), 0.0);
}

TEST(Front, PressureExtrapolation) {
    // linear pressure 2u = x0 - r on the last cells puts the front at x0
    RadialField f = make_field(Geometry::Radial, 1, 10.0, 0.1);
    for (std::size_t i = 0; i < f.size(); ++i) f.u[i] = std::max(0.0, 0.5 * (5.03 - f.r[i]));
    FrontPosition fp = front_position(f, P2);
    ASSERT_TRUE(fp.eta.has_value());
    EXPECT_NEAR(*fp.eta, 5.03, 1e-12);
    RadialField z = make_field(Geometry::Radial, 1, 10.0, 0.1);
    EXPECT_FALSE(front_position(z, P2).eta.has_value());
}

TEST(Run, SamplingAndSnapshots) {
    RadialField f = init_datum(kanel(0.8, 1.0), P2, make_field(Geometry::Radial, 1, 10.0, 0.05));
    Sampling s;
    s.dt_sample = 0.25;
    s.snapshot_times = {0.5, 1.0};
    SimulationRun r = run(f, P2, logistic, 1.0, s);
    ASSERT_EQ(r.times.size(), 5u);
    EXPECT_DOUBLE_EQ(r.times.back(), 1.0);
    ASSERT_EQ(r.snapshots.size(), 2u);
    EXPECT_DOUBLE_EQ(r.snapshots[0].t, 0.5);
    EXPECT_DOUBLE_EQ(r.t_end, 1.0);
    EXPECT_FALSE(r.domain_full);
}

TEST(Run, DomainGuardStopsEarly) {
    DatumSpec d;
    d.kind = DatumKind::ClassA;
    d.level = 1.0;
    d.left = 0.0;
    d.right = 3.0;
    RadialField f = init_datum(d, P2, make_field(Geometry::Radial, 1, 6.0, 0.05));
    SimulationRun r = run(f, P2, logistic, 50.0);
    EXPECT_TRUE(r.domain_full);
    EXPECT_LT(r.t_end, 50.0);
}

TEST(Envelope, ClosedFormAndWindow) {
    Envelope e = envelope(P2, logistic, 1.0, 0.9, 10.0, 1.0, 0.0, 101);
    EXPECT_NEAR(e.delta, 0.2495, 1e-12);
    EXPECT_NEAR(e.f.back(), 1.0 - 0.1 * std::exp(-e.epsilon * 10.0), 1e-15);
    // H = inf |h'| over the window is 2(1 - delta) - 1, times (1 - delta)^{(p-1)m}
    EXPECT_NEAR(e.epsilon, (1.0 - 2.0 * e.delta) * std::pow(1.0 - e.delta, 2.0), 1e-12);
    for (std::size_t i = 1; i < e.f.size(); ++i) EXPECT_GE(e.f[i], e.f[i - 1]);
    EXPECT_THROW(envelope(P2, logistic, 1.0, 0.5, 10.0), WindowError);
}
