#include <gtest/gtest.h>

#include <cmath>

#include "dnlfront/analysis.hpp"

using namespace dnlfront;

namespace {

const Params P2 = validate_params(2.0, 2.0, 1);
const ReactionSpec logistic = make_reaction(ReactionKind::Monostable);

SimulationRun synthetic_flux(const std::vector<double>& values) {
    SimulationRun r;
    for (std::size_t i = 0; i < values.size(); ++i) {
        r.times.push_back(static_cast<double>(i));
        r.flux_max.push_back(values[i]);
    }
    return r;
}

}  // namespace

TEST(FrontFit, RecoversExactLaw) {
    std::vector<double> t, eta;
    for (int i = 1; i <= 200; ++i) {
        t.push_back(i);
        eta.push_back(1.0 * i - 0.5 * std::log(static_cast<double>(i)) + 3.0);
    }
    FrontFit f = fit_front(t, eta, 0.5);
    EXPECT_NEAR(f.c_hat, 1.0, 1e-10);
    EXPECT_NEAR(f.B_hat, 0.5, 1e-8);
    EXPECT_NEAR(f.r0_hat, 3.0, 1e-7);
    EXPECT_EQ(f.samples, 100u);
    EXPECT_DOUBLE_EQ(f.t_max, 200.0);
}

TEST(FrontFit, SkipsNanAndNeedsTenSamples) {
    std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> eta(8, 1.0);
    EXPECT_THROW(fit_front(t, eta, 1.0), RankError);
    std::vector<double> t2, eta2;
    for (int i = 1; i <= 40; ++i) {
        t2.push_back(i);
        eta2.push_back(i % 2 ? std::nan("") : 2.0 * i);
    }
    FrontFit f = fit_front(t2, eta2, 1.0);
    EXPECT_EQ(f.samples, 20u);
    EXPECT_NEAR(f.c_hat, 2.0, 1e-10);
}

TEST(FluxAudit, BoundedAndGrowing) {
    std::vector<double> flat(101, 0.25);
    FluxAudit a = flux_bound_audit(synthetic_flux(flat), 1.0);
    EXPECT_EQ(a.trend, FluxTrend::Bounded);
    EXPECT_DOUBLE_EQ(a.max_flux_after_tau, 0.25);

    std::vector<double> ramp;
    for (int i = 0; i <= 100; ++i) ramp.push_back(0.01 * i);
    EXPECT_EQ(flux_bound_audit(synthetic_flux(ramp), 1.0).trend, FluxTrend::Growing);

    flat[50] = std::nan("");
    FluxAudit b = flux_bound_audit(synthetic_flux(flat), 1.0);
    EXPECT_FALSE(b.finite);
    EXPECT_EQ(b.trend, FluxTrend::Growing);
}

TEST(Outcome, SpreadingAndVanishing) {
    SimulationRun r;
    r.geometry = Geometry::Radial;
    r.t_end = 10.0;
    r.final_field = make_field(Geometry::Radial, 1, 20.0, 0.1);
    EXPECT_EQ(classify_outcome(r, 1.0), Outcome::Vanishing);
    for (std::size_t i = 0; i < r.final_field.size(); ++i) r.final_field.u[i] = r.final_field.r[i] < 5.0 ? 0.99 : 0.0;
    EXPECT_EQ(classify_outcome(r, 1.0), Outcome::Spreading);
    for (auto& u : r.final_field.u) u = std::min(u, 0.5);
    EXPECT_EQ(classify_outcome(r, 1.0), Outcome::Undecided);
}

TEST(HairTrigger, SubcriticalExponentSpreads) {
    DatumSpec d;
    d.kind = DatumKind::Kanel;
    d.delta = 0.05;
    HairTriggerSetup s;
    s.T = 200.0;
    s.dr = 0.05;
    s.sampling.dt_sample = 1.0;
    HairTriggerResult r = hair_trigger_experiment(P2, 2.0, 1.0, d, s);
    EXPECT_DOUBLE_EQ(r.qF, 4.0);
    EXPECT_EQ(r.predicted, HairPrediction::Spreading);
    EXPECT_EQ(r.outcome, Outcome::Spreading);
}

TEST(MovingFrame, ExactWaveStaysClose) {
    WaveProfile w = critical_wave(P2, logistic, 0.0, 1e-9);
    DatumSpec d;
    d.kind = DatumKind::ExactWave;
    d.x0 = 20.0;
    RadialField f = init_datum(d, P2, make_field(Geometry::Radial, 1, 40.0, 0.05), nullptr, &w);
    Sampling s;
    s.dt_sample = 0.5;
    s.snapshot_times = {2.0, 4.0};
    SimulationRun r = run(f, P2, logistic, 4.0, s);
    ConvergenceReport rep = moving_frame_error(r, w, ShiftRule::MeasuredEta);
    ASSERT_EQ(rep.sup_error.size(), 2u);
    EXPECT_LT(rep.sup_error.back(), 0.05);
    EXPECT_NEAR(rep.shift.back(), 24.0, 0.1);
    EXPECT_THROW(moving_frame_error(r, w, ShiftRule::FittedFront), FitError);
}

TEST(ExponentialApproach, DecayingGap) {
    SimulationRun r;
    for (int i = 0; i <= 40; ++i) {
        r.times.push_back(i);
        r.u_center.push_back(1.0 - 0.5 * std::exp(-0.3 * i));
    }
    ExponentialApproach e = exponential_approach_check(r);
    EXPECT_NEAR(e.rate, -0.3, 1e-6);
    EXPECT_NEAR(e.M, 0.5, 1e-4);
    EXPECT_TRUE(e.pass);
    SimulationRun flat;
    for (int i = 0; i <= 40; ++i) {
        flat.times.push_back(i);
        flat.u_center.push_back(0.5);
    }
    EXPECT_THROW(exponential_approach_check(flat), FitError);
}
