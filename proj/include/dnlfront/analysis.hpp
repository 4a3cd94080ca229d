#pragma once

// Verdicts over simulation runs: front-law regression, moving-frame error,
// spreading/vanishing classification, hair-trigger experiments and flux audits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dnlfront/error.hpp"
#include "dnlfront/model.hpp"
#include "dnlfront/numerics.hpp"
#include "dnlfront/pde.hpp"
#include "dnlfront/waves.hpp"

namespace dnlfront {

struct FrontFit {
    double c_hat = 0.0;
    double B_hat = 0.0;
    double r0_hat = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t samples = 0;
    double residual_rms = 0.0;
    double orthogonality = 0.0;
};

/**
 * @brief Least squares of eta(t) ~ c t - B log t + r0 on the last window_fraction of the time span.
 *
 * NaN samples and t <= 0 are skipped. RankError with fewer than 10 usable samples.
 */
inline FrontFit fit_front(const std::vector<double>& t, const std::vector<double>& eta, double window_fraction = 0.5) {
    if (t.size() != eta.size()) throw RankError("time and front series differ in length");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) throw RankError("window fraction must lie in (0,1]");
    if (t.empty()) throw RankError("empty front series");
    const double t_end = t.back();
    const double t_start = t_end - window_fraction * (t_end - t.front());
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_start - 1e-12 || !(t[i] > 0.0) || std::isnan(eta[i])) continue;
        ts.push_back(t[i]);
        ys.push_back(eta[i]);
    }
    if (ts.size() < 10) throw RankError("front fit needs at least 10 samples in the window, got " + std::to_string(ts.size()));
    Eigen::MatrixXd X(ts.size(), 3);
    Eigen::VectorXd y(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        X(i, 0) = ts[i];
        X(i, 1) = -std::log(ts[i]);
        X(i, 2) = 1.0;
        y(i) = ys[i];
    }
    numerics::LsqResult r = numerics::least_squares(X, y);
    FrontFit out;
    out.c_hat = r.coef(0);
    out.B_hat = r.coef(1);
    out.r0_hat = r.coef(2);
    out.t_min = ts.front();
    out.t_max = ts.back();
    out.samples = ts.size();
    out.residual_rms = r.residual_rms;
    out.orthogonality = r.orthogonality;
    return out;
}

/// Fit of the left front of a line run, as the distance -zeta_-(t) travelled to the left.
inline FrontFit fit_left_front(const SimulationRun& run, double window_fraction = 0.5) {
    std::vector<double> mirrored(run.eta_left.size());
    for (std::size_t i = 0; i < mirrored.size(); ++i) mirrored[i] = -run.eta_left[i];
    return fit_front(run.times, mirrored, window_fraction);
}

enum class ShiftRule { MeasuredEta, FittedFront };

struct ConvergenceReport {
    std::vector<double> times;
    std::vector<double> shift;
    std::vector<double> sup_error;
    double decay_rate_estimate = std::numeric_limits<double>::quiet_NaN();  // diagnostic only
};

/**
 * @brief sup_r |u(r,t) - U_{c*}(r - s(t))| over the run's snapshots.
 *
 * MeasuredEta aligns the wave front with the snapshot's front; FittedFront uses
 * s(t) = c t - B log t + r0 from the supplied fit.
 */
inline ConvergenceReport moving_frame_error(const SimulationRun& run, const WaveProfile& wave,
                                            ShiftRule rule = ShiftRule::MeasuredEta,
                                            const std::optional<FrontFit>& fit = std::nullopt) {
    if (rule == ShiftRule::FittedFront && !fit) throw FitError("fitted shift rule needs a front fit");
    ConvergenceReport rep;
    for (const auto& snap : run.snapshots) {
        double s;
        if (rule == ShiftRule::MeasuredEta) {
            FrontPosition fp = front_position(snap, run.params);
            if (!fp.eta) continue;
            s = *fp.eta;
        } else {
            s = fit->c_hat * snap.t - fit->B_hat * std::log(std::max(snap.t, 1e-300)) + fit->r0_hat;
        }
        double err = 0.0;
        for (std::size_t i = 0; i < snap.size(); ++i)
            err = std::max(err, std::abs(snap.u[i] - wave.U_at(snap.r[i] - s)));
        rep.times.push_back(snap.t);
        rep.shift.push_back(s);
        rep.sup_error.push_back(err);
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        if (rep.sup_error[i] > 0.0) {
            xs.push_back(rep.times[i]);
            ys.push_back(std::log(rep.sup_error[i]));
        }
    if (xs.size() >= 3) {
        Eigen::MatrixXd X(xs.size(), 2);
        Eigen::VectorXd y(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            X(i, 0) = xs[i];
            X(i, 1) = 1.0;
            y(i) = ys[i];
        }
        try {
            rep.decay_rate_estimate = numerics::least_squares(X, y).coef(0);
        } catch (const RankError&) {
        }
    }
    return rep;
}

enum class Outcome { Spreading, Vanishing, Undecided };

inline std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Spreading: return "Spreading";
        case Outcome::Vanishing: return "Vanishing";
        case Outcome::Undecided: return "Undecided";
    }
    return "Undecided";
}

struct OutcomeThresholds {
    double spread_level = 0.95;
    double vanish_level = 0.01;
    double probe_fraction = 0.25;  // probe radius = probe_fraction c(0) t_end
};

/**
 * @brief Spreading if u >= spread_level on the probe ball, Vanishing if sup u <= vanish_level.
 *
 * The probe ball is centred at r = 0 on radial grids and at the centre of mass of the datum on line grids.
 */
inline Outcome classify_outcome(const SimulationRun& run, double c0, const OutcomeThresholds& th = {}) {
    const RadialField& f = run.final_field;
    if (f.sup() <= th.vanish_level) return Outcome::Vanishing;
    double centre = 0.0;
    if (run.geometry == Geometry::Line) {
        double mass = 0.0, moment = 0.0;
        for (std::size_t i = 0; i < run.initial.size(); ++i) {
            mass += run.initial.u[i];
            moment += run.initial.u[i] * run.initial.r[i];
        }
        centre = mass > 0.0 ? moment / mass : 0.5 * (f.x_min + f.x_max());
    }
    const double radius = th.probe_fraction * c0 * run.t_end;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        double d = std::abs(f.r[i] - centre);
        if (d <= radius || (i == 0 && run.geometry == Geometry::Radial)) lowest = std::min(lowest, f.u[i]);
    }
    if (lowest >= th.spread_level) return Outcome::Spreading;
    return Outcome::Undecided;
}

enum class HairPrediction { Spreading, VanishingPossible, Borderline };

inline std::string to_string(HairPrediction p) {
    switch (p) {
        case HairPrediction::Spreading: return "Spreading";
        case HairPrediction::VanishingPossible: return "VanishingPossible";
        case HairPrediction::Borderline: return "Borderline";
    }
    return "Borderline";
}

struct HairTriggerResult {
    double q = 0.0;
    double qF = 0.0;
    HairPrediction predicted = HairPrediction::Borderline;
    Outcome outcome = Outcome::Undecided;
    double c0 = 0.0;
    SimulationRun run;
};

struct HairTriggerSetup {
    double T = 200.0;
    double dr = 0.02;
    double R = 0.0;        // 0 picks 1.2 c_bound T + 2 width, capped by R_max
    double R_max = 400.0;
    double margin = 0.5;   // |q - qF| below this is Borderline
    Sampling sampling;
};

/**
 * @brief Runs h = k u^q (1-u) from a small bump and classifies the result.
 *
 * InconclusiveError if the run ends Undecided. Borderline exponents are run but carry no prediction.
 */
inline HairTriggerResult hair_trigger_experiment(const Params& P, double q, double k, const DatumSpec& datum,
                                                 const HairTriggerSetup& setup = {}) {
    HairTriggerResult res;
    res.q = q;
    res.qF = P.m * (P.p - 1.0) + P.p / P.N;
    if (q <= res.qF - setup.margin)
        res.predicted = HairPrediction::Spreading;
    else if (q >= res.qF + setup.margin)
        res.predicted = HairPrediction::VanishingPossible;
    ReactionSpec h = make_reaction(ReactionKind::PowerMonostable, {0.0, k, q}, P);
    res.c0 = critical_speed(P, h, 0.0, 1e-6).c;
    double R = setup.R;
    if (!(R > 0.0)) R = std::min(setup.R_max, 1.2 * upper_bound_speed(P, h, 0.0).coarse * setup.T + 2.0 * datum.width);
    RadialField grid = make_field(Geometry::Radial, P.N, R, setup.dr);
    RadialField f0 = init_datum(datum, P, grid);
    res.run = run(std::move(f0), P, h, setup.T, setup.sampling);
    res.outcome = classify_outcome(res.run, res.c0);
    if (res.outcome == Outcome::Undecided)
        throw InconclusiveError("outcome undecided at t=" + std::to_string(res.run.t_end) + " for q=" +
                                std::to_string(q) + "; extend T");
    return res;
}

enum class FluxTrend { Bounded, Growing };

inline std::string to_string(FluxTrend t) { return t == FluxTrend::Bounded ? "Bounded" : "Growing"; }

struct FluxAudit {
    double max_flux_after_tau = 0.0;
    double max_last = 0.0;    // over the final tenth of [tau, t_end]
    double max_before = 0.0;  // over the rest of [tau, t_end]
    bool finite = true;
    FluxTrend trend = FluxTrend::Bounded;
};

/**
 * @brief Max of the recorded flux over t >= tau, and whether it keeps growing at the end.
 *
 * Growing if the maximum over the final tenth of [tau, t_end] exceeds (1 + margin) times the
 * maximum over the earlier part, or if any sample is non-finite.
 */
inline FluxAudit flux_bound_audit(const SimulationRun& run, double tau, double margin = 0.1) {
    FluxAudit a;
    const double t_end = run.times.empty() ? 0.0 : run.times.back();
    const double split = t_end - 0.1 * (t_end - tau);
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        double t = run.times[i];
        if (t < tau) continue;
        double v = run.flux_max[i];
        if (!std::isfinite(v)) {
            a.finite = false;
            continue;
        }
        a.max_flux_after_tau = std::max(a.max_flux_after_tau, v);
        if (t >= split)
            a.max_last = std::max(a.max_last, v);
        else
            a.max_before = std::max(a.max_before, v);
    }
    bool growing = !a.finite || a.max_last > (1.0 + margin) * a.max_before + 1e-300;
    if (a.max_last == 0.0) growing = !a.finite;
    a.trend = growing ? FluxTrend::Growing : FluxTrend::Bounded;
    return a;
}

struct ExponentialApproach {
    double rate = 0.0;
    double M = 0.0;
    double final_gap = 0.0;
    bool pass = false;
};

/**
 * @brief Fits log|1 - u(centre, t)| against t on the last half of the run.
 *
 * Samples at round-off level (gap <= 1e-13) are dropped; if fewer than three remain the window is
 * widened to the whole run. FitError if the gap does not decay.
 */
inline ExponentialApproach exponential_approach_check(const SimulationRun& run, double region_speed = 0.0) {
    (void)region_speed;  // the recorded centre value lies inside every admissible region
    ExponentialApproach out;
    if (run.times.empty()) throw FitError("empty run");
    const double t_end = run.times.back();
    out.final_gap = std::abs(1.0 - run.u_center.back());
    auto collect = [&](double t_from, std::vector<double>& xs, std::vector<double>& ys) {
        xs.clear();
        ys.clear();
        for (std::size_t i = 0; i < run.times.size(); ++i) {
            double gap = std::abs(1.0 - run.u_center[i]);
            if (run.times[i] < t_from || !(gap > 1e-13) || !std::isfinite(gap)) continue;
            xs.push_back(run.times[i]);
            ys.push_back(std::log(gap));
        }
    };
    std::vector<double> xs, ys;
    collect(0.5 * t_end, xs, ys);
    if (xs.size() < 3) collect(run.times.front(), xs, ys);
    if (xs.size() < 3) throw FitError("too few samples above round-off to fit the approach to 1");
    Eigen::MatrixXd X(xs.size(), 2);
    Eigen::VectorXd y(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        X(i, 0) = xs[i];
        X(i, 1) = 1.0;
        y(i) = ys[i];
    }
    numerics::LsqResult r = numerics::least_squares(X, y);
    out.rate = r.coef(0);
    out.M = std::exp(r.coef(1));
    if (!(out.rate < -1e-12)) throw FitError("the gap |1-u| does not decay (slope " + std::to_string(out.rate) + ")");
    out.pass = out.rate < 0.0 && out.final_gap <= 1e-3;
    return out;
}

}  // namespace dnlfront
