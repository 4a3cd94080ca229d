#include <gtest/gtest.h>

#include <cmath>

#include "dnlfront/waves.hpp"

using namespace dnlfront;

namespace {

const Params P2 = validate_params(2.0, 2.0, 1);
const ReactionSpec logistic = make_reaction(ReactionKind::Monostable);

}  // namespace

// phi = U(1-U) solves the trajectory equation at c = 1, which gives U = (1 - e^{xi/2})_+.
TEST(Waves, ClosedFormTrajectoryOracle) {
    TrajectoryRhs rhs = make_rhs(P2, logistic, 1.0, 0.0);
    for (int i = 1; i < 100; ++i) {
        double U = i / 100.0;
        EXPECT_NEAR(rhs.slope(U, U * (1.0 - U)), 1.0 - 2.0 * U, 1e-14);
    }
}

TEST(Waves, CriticalSpeedPmeLogistic) {
    CriticalSpeed cs = critical_speed(P2, logistic, 0.0, 1e-9);
    EXPECT_NEAR(cs.c, 1.0, 1e-8);
    EXPECT_LE(cs.lo, cs.hi);
    EXPECT_LE(cs.hi - cs.lo, 2e-9);
}

TEST(Waves, ShotsOnEitherSideAreClassified) {
    CriticalOptions o;
    PhaseTrajectory slow = shoot_from_one(P2, logistic, 0.9, 0.0, o.eps_hi, 1e-6);
    PhaseTrajectory fast = shoot_from_one(P2, logistic, 1.1, 0.0, o.eps_hi, 1e-6);
    EXPECT_EQ(classify_shot(slow), ShotClass::TooSlow);
    EXPECT_EQ(classify_shot(fast), ShotClass::TooFast);
}

TEST(Waves, ProfileMatchesClosedForm) {
    WaveProfile w = critical_wave(P2, logistic, 0.0, 1e-9);
    ASSERT_FALSE(w.xi.empty());
    EXPECT_EQ(w.xi.front(), 0.0);
    EXPECT_EQ(w.U.front(), 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < w.xi.size(); ++i) err = std::max(err, std::abs(w.U[i] - (1.0 - std::exp(w.xi[i] / 2.0))));
    EXPECT_LT(err, 1e-6);
    PressureView pv = pressure_view(w, logistic);
    EXPECT_NEAR(pv.Vp0, -1.0, 1e-6);
    EXPECT_NEAR(pv.Vpp0, -0.5, 1e-3);
    EXPECT_NEAR(pv.predicted_Vpp, -0.5, 1e-12);
}

TEST(Waves, ScalingLaw) {
    // h -> 4h scales c by 4^{(p-1)/p} = 2 when p = 2
    ReactionSpec h4 = make_reaction(ReactionKind::Monostable, {0.0, 4.0, 1.0});
    EXPECT_NEAR(critical_speed(P2, h4, 0.0, 1e-9).c, 2.0, 1e-7);
}

TEST(Waves, PLaplacianSpeedFrozen) {
    Params P3 = validate_params(2.0, 3.0, 1);
    EXPECT_NEAR(critical_speed(P3, logistic, 0.0, 1e-9).c, 0.58208121451587091, 1e-7);
}

TEST(Waves, BistableSpeedFrozen) {
    ReactionSpec hb = make_reaction(ReactionKind::Bistable, {0.3, 1.0, 1.0}, P2);
    EXPECT_NEAR(critical_speed(P2, hb, 0.0, 1e-9).c, 0.39705031883545161, 1e-7);
}

TEST(Waves, EndpointAsymptotics) {
    CriticalSpeed cs = critical_speed(P2, logistic, 0.0, 1e-9);
    EndpointFit ef = endpoint_fit(critical_trajectory(P2, logistic, 0.0, cs), P2, logistic);
    EXPECT_NEAR(ef.slope0, 1.0, 1e-3);
    EXPECT_NEAR(ef.mu1, 1.0, 0.01);
    EXPECT_NEAR(ef.predicted_mu, 1.0, 1e-12);
}

TEST(Waves, UpperBounds) {
    SpeedBounds b0 = upper_bound_speed(P2, logistic, 0.0);
    EXPECT_NEAR(b0.coarse, 2.0 * std::sqrt(2.0), 1e-12);
    EXPECT_LE(b0.refined, b0.coarse);
    SpeedBounds b1 = upper_bound_speed(P2, logistic, 0.05);
    EXPECT_NEAR(b1.refined, 2.8266588050205139, 1e-10);
    EXPECT_GT(b0.coarse, 1.0);
}

TEST(Waves, SeedConstant) { EXPECT_NEAR(seed_constant(P2, logistic, 1.0, 0.0), 1.0, 1e-12); }

TEST(Waves, DerivativeAtZeroFormulaMatches) {
    // c'(0) = -1/2 for the PME-logistic pair
    EXPECT_NEAR(cprime_formula(P2, logistic, 0.0), -0.5, 1e-6);
}

TEST(Waves, SpeedCurveStructure) {
    SpeedCurve sc = speed_curve(P2, logistic, {0.0, 0.05, 0.1}, 1e-9);
    ASSERT_EQ(sc.c_values.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        ASSERT_TRUE(sc.ok[i]) << sc.note[i];
        EXPECT_LT(sc.cprime_fd[i], 0.0);
        EXPECT_GT(sc.cprime_fd[i], -P2.m);
        EXPECT_NEAR(sc.cprime_formula[i], sc.cprime_fd[i], 1e-3 * std::abs(sc.cprime_fd[i]));
    }
    EXPECT_GT(sc.c_values[0], sc.c_values[1]);
    EXPECT_GT(sc.c_values[1], sc.c_values[2]);
    EXPECT_NEAR(sc.c_sharp, 0.5, 1e-5);
}

TEST(Waves, SubwaveFrozen) {
    SubwaveProfile sw = subwave_profile(P2, logistic, 0.0, 0.5, 0.9);
    EXPECT_NEAR(sw.b, 4.2165440822624136, 1e-6);
    EXPECT_NEAR(sw.nu, 0.24277756431816847, 1e-6);
    EXPECT_DOUBLE_EQ(sw.U_at(0.0), 0.9);
    EXPECT_DOUBLE_EQ(sw.U_at(sw.b), 0.0);
    for (std::size_t i = 1; i < sw.U.size(); ++i) EXPECT_LE(sw.U[i], sw.U[i - 1] + 1e-12);
}

TEST(Waves, SubwaveBlockedBelowThreshold) {
    ReactionSpec hb = make_reaction(ReactionKind::Bistable, {0.3, 1.0, 1.0});
    EXPECT_THROW(subwave_profile(P2, hb, 0.0, 0.5, 0.2), NoExitError);
}

TEST(Waves, BarrierFrozen) {
    Barrier b = trajectory_barrier(P2, logistic, 2.9, 0.1, 1.0);
    EXPECT_DOUBLE_EQ(b.k1, 1.0);
    EXPECT_NEAR(b.k2, 3.131, 1e-9);
}

TEST(Waves, BarrierHoldsOnSubwave) {
    SubwaveProfile sw = subwave_profile(P2, logistic, 0.0, 0.5, 0.9);
    Barrier b = trajectory_barrier(P2, logistic, 1.0, 0.0, 1.01 * sw.nu);
    for (std::size_t i = 0; i < sw.trajectory.U.size(); ++i)
        EXPECT_LT(sw.trajectory.phi[i], b.k1 + b.k2 * sw.trajectory.U[i]);
}
