#pragma once

// Phase-plane engine for travelling fronts.
//
// Trajectories phi(U) = |(U^m)'|^{p-1} of a front moving with speed c solve
//   dphi/dU = c + gamma m U^{m-1} phi^{1-alpha} - f(U)/phi^alpha,   f = m U^{m-1} h(U).
// They are integrated in psi = phi^{alpha+1}, where the equation is regular at phi = 0
// and contacts with the U-axis become sign changes of psi.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "dnlfront/error.hpp"
#include "dnlfront/model.hpp"
#include "dnlfront/numerics.hpp"

namespace dnlfront {

using numerics::spow;
using GL8 = boost::math::quadrature::gauss<double, 8>;

/// Right-hand side in the variables t = -U, y = psi.
struct TrajectoryRhs {
    double m = 2.0, alpha = 1.0, c = 1.0, gamma = 0.0;
    ReducedReaction fr;

    double phi(double psi) const { return spow(psi, 1.0 / (alpha + 1.0)); }

    /// dphi/dU from the trajectory equation at (U, phi), phi > 0.
    double slope(double U, double ph) const {
        double s = c - fr(U) / std::pow(ph, alpha);
        if (gamma != 0.0) s += gamma * m * std::pow(U, m - 1.0) * std::pow(ph, 1.0 - alpha);
        return s;
    }
    double G(double U, double psi) const {
        double ph = phi(psi);
        double g = c * spow(ph, alpha) - fr(U);
        if (gamma != 0.0) g += gamma * m * std::pow(U, m - 1.0) * ph;
        return (alpha + 1.0) * g;
    }
    double dGdpsi(double U, double psi) const {
        double ph = std::max(std::abs(phi(psi)), 1e-150);
        double d = c * alpha / ph;
        if (gamma != 0.0) d += gamma * m * std::pow(U, m - 1.0) * std::pow(ph, -alpha);
        return d;
    }
    double dGdU(double U, double psi) const {
        double d = -fr.derivative(U);
        if (gamma != 0.0) d += gamma * m * (m - 1.0) * std::pow(U, m - 2.0) * phi(psi);
        return (alpha + 1.0) * d;
    }

    double f(double t, double y) const { return -G(-t, y); }
    double dfdy(double t, double y) const { return -dGdpsi(-t, y); }
    double dfdt(double t, double y) const { return dGdU(-t, y); }
};

enum class Termination { HitUAxis, HitPhiAxis, ReachedLowCutoff, EarlyTooFast };

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::HitUAxis: return "HitUAxis";
        case Termination::HitPhiAxis: return "HitPhiAxis";
        case Termination::ReachedLowCutoff: return "ReachedLowCutoff";
        case Termination::EarlyTooFast: return "EarlyTooFast";
    }
    return "?";
}

/// A trajectory in the (U, phi) plane. Samples are ordered with U strictly decreasing.
struct PhaseTrajectory {
    double c = 0.0;
    double gamma = 0.0;
    Params params;
    std::vector<double> U;
    std::vector<double> phi;
    Termination termination = Termination::ReachedLowCutoff;
    double U_star = 0.0;   // HitUAxis
    double nu = 0.0;       // HitPhiAxis
    double phi_end = 0.0;  // ReachedLowCutoff
    double eps_hi = 0.0;
    double eps_lo = 0.0;
    TrajectoryRhs rhs;
    numerics::Hermite psi_of_t;  // psi as a function of t = -U

    double U_max() const { return U.front(); }
    double U_min() const { return U.back(); }

    /// phi at an interior level by Hermite interpolation of psi.
    double phi_at(double u) const { return std::max(0.0, rhs.phi(psi_of_t(-u))); }
    /// dphi/dU from the equation at the interpolated point.
    double slope_at(double u) const { return rhs.slope(u, phi_at(u)); }
};

struct ShootOptions {
    double rtol = 1e-10;
    std::size_t max_steps = 2'000'000;
    // Stop as soon as phi < fast_exit_ratio * c U at a level from which the shot provably stays
    // below that line. Zero disables. Only the verdict is kept in that case.
    double fast_exit_ratio = 0.0;
};

/// Leading coefficient C of phi ~ C (1-U)^{p-1} on the trajectory leaving (1,0).
inline double seed_constant(const Params& P, const ReactionSpec& h, double c, double gamma) {
    const double hp1 = std::abs(h.derivative(1.0));
    double C;
    if (std::abs(P.p - 2.0) < 1e-12) {
        double b = c + gamma * P.m;
        C = 0.5 * (-b + std::sqrt(b * b + 4.0 * P.m * hp1));
    } else {
        C = std::pow(P.m * hp1 / c, P.p - 1.0);
    }
    if (!std::isfinite(C) || !(C > 0.0)) throw SeedError("seed coefficient is not a positive finite number");
    return C;
}

inline TrajectoryRhs make_rhs(const Params& P, const ReactionSpec& h, double c, double gamma) {
    TrajectoryRhs r;
    r.m = P.m;
    r.alpha = P.alpha;
    r.c = c;
    r.gamma = gamma;
    r.fr = reduced_reaction(h, P);
    return r;
}

namespace detail {

inline void fill_samples(PhaseTrajectory& tr, const numerics::OdeResult& res) {
    tr.psi_of_t = numerics::Hermite(res.nodes);
    tr.U.reserve(res.nodes.size());
    tr.phi.reserve(res.nodes.size());
    for (const auto& n : res.nodes) {
        tr.U.push_back(-n.t);
        tr.phi.push_back(std::max(0.0, tr.rhs.phi(n.y)));
    }
}

}  // namespace detail

/**
 * @brief Integrates the trajectory leaving (1,0) from U = 1 - eps_hi down to U = eps_lo.
 *
 * Terminates with HitUAxis(U*) if phi vanishes at U* > eps_lo, else ReachedLowCutoff(phi(eps_lo)).
 */
inline PhaseTrajectory shoot_from_one(const Params& P, const ReactionSpec& h, double c, double gamma,
                                      double eps_hi = 1e-6, double eps_lo = 1e-6, ShootOptions opt = {}) {
    if (!(c > 0.0)) throw IntegrationError("speed must be positive");
    if (!(gamma >= 0.0)) throw IntegrationError("gamma must be nonnegative");
    if (!(eps_lo > 0.0 && eps_hi > 0.0 && eps_lo < 1.0 - eps_hi))
        throw IntegrationError("cutoffs must satisfy 0 < eps_lo < 1 - eps_hi");
    PhaseTrajectory tr;
    tr.c = c;
    tr.gamma = gamma;
    tr.params = P;
    tr.eps_hi = eps_hi;
    tr.eps_lo = eps_lo;
    tr.rhs = make_rhs(P, h, c, gamma);
    const double C = seed_constant(P, h, c, gamma);
    const double psi0 = std::pow(C, 1.0 + P.alpha) * std::pow(eps_hi, P.p);

    numerics::OdeOptions o;
    o.rtol = opt.rtol;
    o.h0 = 0.1 * eps_hi;
    o.h_max = 0.05;
    o.max_steps = opt.max_steps;
    o.stop_on_sign_change = true;
    if (opt.fast_exit_ratio > 0.0) {
        // Below the line phi = kappa U the trajectory cannot come back up (moving to smaller U) wherever
        // f(u)/(kappa u)^alpha < c - kappa, because its slope then exceeds kappa. U_safe bounds that zone.
        const TrajectoryRhs& r = tr.rhs;
        const double kappa = opt.fast_exit_ratio * c;
        const double cap = 0.9 * (c - kappa) * std::pow(kappa, P.alpha);
        double U_safe = 0.0;
        for (int j = 1; j <= 4000; ++j) {
            double u = j / 4000.0;
            if (!(r.fr(u) / std::pow(u, P.alpha) < cap)) break;
            U_safe = u;
        }
        if (U_safe > 0.0) U_safe -= 1.0 / 4000.0;
        o.stop = [&r, kappa, U_safe](double t, double y) {
            const double U = -t;
            return U <= U_safe && r.phi(y) < kappa * U;
        };
    }
    numerics::Rosenbrock4<TrajectoryRhs> ode(tr.rhs, o);
    auto res = ode.integrate(-(1.0 - eps_hi), psi0, -eps_lo);
    detail::fill_samples(tr, res);
    if (res.event) {
        tr.termination = Termination::HitUAxis;
        tr.U_star = -res.t_event;
    } else if (res.stopped) {
        tr.termination = Termination::EarlyTooFast;
        tr.phi_end = tr.phi.back();
    } else {
        tr.termination = Termination::ReachedLowCutoff;
        tr.phi_end = tr.phi.back();
    }
    return tr;
}

enum class ShotClass { TooSlow, TooFast };

inline std::string to_string(ShotClass s) { return s == ShotClass::TooSlow ? "TooSlow" : "TooFast"; }

/// Ratio phi(eps)/(c eps) at a level eps inside the sampled range.
inline double criticality_ratio(const PhaseTrajectory& tr, double eps) {
    double ph = (std::abs(eps - tr.U_min()) < 1e-15 * eps) ? tr.phi.back() : tr.phi_at(eps);
    return ph / (tr.c * eps);
}

inline ShotClass classify_shot(const PhaseTrajectory& tr, double margin = 0.25) {
    if (tr.termination == Termination::HitUAxis || tr.termination == Termination::EarlyTooFast)
        return ShotClass::TooFast;
    double ratio = tr.phi_end / (tr.c * tr.eps_lo);
    if (ratio >= 1.0 + margin) return ShotClass::TooSlow;
    if (ratio < 1.0 - margin) return ShotClass::TooFast;
    throw AmbiguousError("phi(eps_lo)/(c eps_lo) = " + std::to_string(ratio) + " inside the dead band");
}

struct CriticalOptions {
    double eps_hi = 1e-6;
    std::vector<double> eps_schedule{1e-4, 1e-5, 1e-6};
    double eps_floor = 1e-9;  // further refinement below the schedule when the verdict stays ambiguous
    double margin = 0.25;
    // On brackets narrower than this an ambiguous verdict is settled by the sign of
    // phi(eps)/(c eps) - 1 at the eps floor, which is biased only by O(eps_floor).
    double resolution = 1e-6;
    ShootOptions shoot;
};

struct CriticalSpeed {
    double c = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int shots = 0;
};

namespace detail {

enum class Verdict { TooSlow, TooFast, Ambiguous };

/// Classifies a shot at the finest schedule level, refining eps_lo by decades while ambiguous.
/// With by_sign, an ambiguous shot at the eps floor is decided by the sign of phi(eps)/(c eps) - 1.
inline Verdict verdict(const Params& P, const ReactionSpec& h, double c, double gamma, const CriticalOptions& o,
                       int& shots, bool by_sign = false) {
    double eps = o.eps_schedule.empty() ? 1e-6 : *std::min_element(o.eps_schedule.begin(), o.eps_schedule.end());
    ShootOptions so = o.shoot;
    if (so.fast_exit_ratio == 0.0) so.fast_exit_ratio = 0.5 * (1.0 - o.margin);
    while (true) {
        ++shots;
        PhaseTrajectory tr = shoot_from_one(P, h, c, gamma, o.eps_hi, eps, so);
        try {
            return classify_shot(tr, o.margin) == ShotClass::TooSlow ? Verdict::TooSlow : Verdict::TooFast;
        } catch (const AmbiguousError&) {
            if (eps / 10.0 < o.eps_floor * (1.0 - 1e-9)) {
                if (!by_sign) return Verdict::Ambiguous;
                return tr.phi_end >= c * tr.eps_lo ? Verdict::TooSlow : Verdict::TooFast;
            }
            eps /= 10.0;
        }
    }
}

}  // namespace detail

struct SpeedBounds {
    double coarse = 0.0;
    double refined = 0.0;
};

/// Speeds above which the trajectory from (1,0) is known to connect away from the origin.
inline SpeedBounds upper_bound_speed(const Params& P, const ReactionSpec& h, double gamma) {
    const double a = P.alpha;
    const double s0 = sigma0(h);
    SpeedBounds b;
    b.coarse = (a + 1.0) * std::pow(P.m * s0 / std::pow(a, a), 1.0 / (a + 1.0));
    double rest = P.m * s0 - a * std::pow(gamma * P.m / (a + 1.0), 1.0 / a + 1.0);
    b.refined = rest > 0.0 ? (a + 1.0) * std::pow(rest / std::pow(a, a), 1.0 / (a + 1.0)) : 0.0;
    return b;
}

/**
 * @brief Bisection for c(gamma) between tol and the coarse upper bound.
 *
 * A midpoint whose verdict stays ambiguous down to the eps floor is replaced by probes at the
 * quarter points of the bracket; ConvergenceError if those are ambiguous too. On brackets narrower
 * than the resolution the sign of phi(eps)/(c eps) - 1 at the floor decides instead.
 */
inline CriticalSpeed critical_speed(const Params& P, const ReactionSpec& h, double gamma, double tol = 1e-8,
                                    const CriticalOptions& o = {}) {
    using detail::Verdict;
    CriticalSpeed out;
    double lo = tol;
    double hi = upper_bound_speed(P, h, gamma).coarse;
    Verdict vh = detail::verdict(P, h, hi, gamma, o, out.shots);
    if (vh != Verdict::TooFast) throw BracketError("shot at the upper bound is not supercritical");
    auto update = [&](double c, Verdict v) {
        if (v == Verdict::TooSlow) lo = std::max(lo, c);
        if (v == Verdict::TooFast) hi = std::min(hi, c);
    };
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        Verdict v = detail::verdict(P, h, mid, gamma, o, out.shots);
        if (v != Verdict::Ambiguous) {
            update(mid, v);
            continue;
        }
        double w = hi - lo;
        if (w <= o.resolution) {
            update(mid, detail::verdict(P, h, mid, gamma, o, out.shots, true));
            continue;
        }
        double cl = mid - 0.25 * w, cr = mid + 0.25 * w;
        Verdict vl = detail::verdict(P, h, cl, gamma, o, out.shots);
        Verdict vr = detail::verdict(P, h, cr, gamma, o, out.shots);
        if (vl == Verdict::Ambiguous && vr == Verdict::Ambiguous)
            throw ConvergenceError("criticality verdict ambiguous across the bracket [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");
        update(cl, vl);
        update(cr, vr);
        if (hi - lo >= w) throw ConvergenceError("bracket failed to shrink");
    }
    out.lo = lo;
    out.hi = hi;
    out.c = 0.5 * (lo + hi);
    return out;
}

/// Critical trajectory shot at the subcritical end of a bracket, so that it always exits through phi > 0.
inline PhaseTrajectory critical_trajectory(const Params& P, const ReactionSpec& h, double gamma,
                                           const CriticalSpeed& cs, const CriticalOptions& o = {}) {
    double eps = o.eps_schedule.empty() ? 1e-6 : *std::min_element(o.eps_schedule.begin(), o.eps_schedule.end());
    return shoot_from_one(P, h, cs.lo, gamma, o.eps_hi, eps, o.shoot);
}

/**
 * @brief Travelling profile U(xi) with front at xi = 0 and pressure view.
 *
 * Stores interpolation nodes (xi ascending) and a uniformly resampled copy
 * (xi descending from 0) for output.
 */
struct WaveProfile {
    double gamma = 0.0;
    double c = 0.0;
    Params params;
    // resampled grid, xi = 0, -dxi, -2 dxi, ...
    std::vector<double> xi;
    std::vector<double> U;
    std::vector<double> V;
    std::vector<double> Vp;
    // interpolation data
    numerics::Hermite U_of_xi;  // nodes on [xi_left, xi_eps]
    double xi_left = 0.0;       // level U = 1 - eps_hi
    double xi_eps = 0.0;        // level U = eps_lo
    double kappa = 0.0;         // phi/U at eps_lo
    double C_seed = 0.0;
    double eps_hi = 0.0;
    PhaseTrajectory trajectory;

    double L() const { return -xi_left; }

    /// U at any xi. Uses the front power law on [xi_eps, 0] and the exponential tail left of xi_left.
    double U_at(double x) const {
        const double ma = params.m - params.alpha;
        if (x >= 0.0) return 0.0;
        if (x >= xi_eps) return std::pow(ma * std::pow(kappa, params.alpha) * (-x) / params.m, 1.0 / ma);
        if (x <= xi_left) {
            double lam = std::pow(C_seed, params.alpha) / params.m;
            return 1.0 - eps_hi * std::exp(lam * (x - xi_left));
        }
        return U_of_xi(x);
    }
    double pressure(double u) const {
        const double ma = params.m - params.alpha;
        return params.m / ma * std::pow(u, ma);
    }
};

struct ProfileGrid {
    double dxi = 0.01;
    double L_max = std::numeric_limits<double>::infinity();
};

/// Reconstructs the profile from a critical (or slightly subcritical) trajectory.
inline WaveProfile wave_profile_from(const PhaseTrajectory& tr, const ReactionSpec& h, ProfileGrid grid = {}) {
    if (tr.termination == Termination::HitUAxis)
        throw NonCriticalError("trajectory hits the U-axis at U=" + std::to_string(tr.U_star));
    const Params& P = tr.params;
    const double m = P.m, a = P.alpha, ma = m - a;
    WaveProfile w;
    w.gamma = tr.gamma;
    w.c = tr.c;
    w.params = P;
    w.trajectory = tr;
    w.eps_hi = tr.eps_hi;
    w.C_seed = seed_constant(P, h, tr.c, tr.gamma);
    const std::size_t n = tr.U.size();
    const double eps = tr.U.back();
    w.kappa = tr.phi.back() / eps;
    auto integrand = [&](double u) { return m * std::pow(u, m - 1.0) / std::pow(tr.phi_at(u), a); };

    // xi at nodes, from the front side upwards
    std::vector<double> xi(n);
    xi[n - 1] = -m * std::pow(eps, ma) / (ma * std::pow(w.kappa, a));
    for (std::size_t k = n - 1; k-- > 0;) {
        double seg = GL8::integrate(integrand, tr.U[k + 1], tr.U[k]);
        if (!std::isfinite(seg)) throw QuadratureError("non-finite support integral near U=" + std::to_string(tr.U[k]));
        xi[k] = xi[k + 1] - seg;
    }
    w.xi_eps = xi[n - 1];
    w.xi_left = xi[0];
    std::vector<numerics::OdeNode> nodes;
    nodes.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        double u = tr.U[k];
        double dU = -std::pow(tr.phi[k], a) / (m * std::pow(u, m - 1.0));
        if (!nodes.empty() && !(xi[k] > nodes.back().t)) continue;
        nodes.push_back({xi[k], u, dU});
    }
    w.U_of_xi = numerics::Hermite(std::move(nodes));

    double L = std::min(grid.L_max, -w.xi_left);
    std::size_t count = static_cast<std::size_t>(std::floor(L / grid.dxi)) + 1;
    for (std::size_t j = 0; j < count; ++j) {
        double x = -static_cast<double>(j) * grid.dxi;
        double u = w.U_at(x);
        w.xi.push_back(x);
        w.U.push_back(u);
        w.V.push_back(w.pressure(u));
        double vp = 0.0;
        if (u <= 0.0)
            vp = -std::pow(w.kappa, a);
        else if (u >= eps && u <= tr.U.front())
            vp = -std::pow(tr.phi_at(u) / u, a);
        else if (u < eps)
            vp = -std::pow(w.kappa, a);
        else
            vp = -std::pow(w.C_seed * std::pow(1.0 - u, P.p - 1.0) / u, a);
        w.Vp.push_back(vp);
    }
    return w;
}

/// Profile at a given speed; the speed must be critical within the bisection tolerance.
inline WaveProfile wave_profile(const Params& P, const ReactionSpec& h, double c, double gamma, ProfileGrid grid = {},
                                const CriticalOptions& o = {}) {
    double eps = o.eps_schedule.empty() ? 1e-6 : *std::min_element(o.eps_schedule.begin(), o.eps_schedule.end());
    PhaseTrajectory tr = shoot_from_one(P, h, c, gamma, o.eps_hi, eps, o.shoot);
    return wave_profile_from(tr, h, grid);
}

/// Critical speed and its profile in one call.
inline WaveProfile critical_wave(const Params& P, const ReactionSpec& h, double gamma, double tol = 1e-8,
                                 ProfileGrid grid = {}, const CriticalOptions& o = {}) {
    CriticalSpeed cs = critical_speed(P, h, gamma, tol, o);
    WaveProfile w = wave_profile_from(critical_trajectory(P, h, gamma, cs, o), h, grid);
    w.c = cs.c;
    return w;
}

struct PressureView {
    double V0 = 0.0;
    double Vp0 = 0.0;
    double Vpp0 = 0.0;
    double Vp_left = 0.0;
    double predicted_Vp0 = 0.0;
    double predicted_Vpp = 0.0;
};

namespace detail {

/// Value at U -> 0 of samples g(U_k) by least squares in {1, U^k1, U^k2}; diverges -> ExtrapolationError.
inline double extrapolate_to_zero(const std::vector<double>& us, const std::vector<double>& gs, double k1, double k2) {
    auto fit = [&](std::size_t first) {
        std::size_t n = us.size() - first;
        Eigen::MatrixXd X(n, 3);
        Eigen::VectorXd y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double u = us[first + i];
            X(i, 0) = 1.0;
            X(i, 1) = std::pow(u, k1);
            X(i, 2) = std::pow(u, k2);
            y(i) = gs[first + i];
        }
        return numerics::least_squares(X, y).coef(0);
    };
    double full = fit(0);
    double fine = fit(1);
    double scale = std::max(1.0, std::abs(full));
    if (!std::isfinite(full) || std::abs(full - fine) > 1e-3 * scale)
        throw ExtrapolationError("extrapolation to the front does not settle: " + std::to_string(full) + " vs " +
                                 std::to_string(fine));
    return full;
}

}  // namespace detail

inline PressureView pressure_view(const WaveProfile& w, const ReactionSpec& h) {
    const PhaseTrajectory& tr = w.trajectory;
    const Params& P = w.params;
    const double m = P.m, a = P.alpha, ma = m - a;
    PressureView pv;
    pv.V0 = 0.0;
    std::vector<double> us, vps, vpps;
    for (int k = 0; k <= 6; ++k) {
        double u = 0.02 * std::pow(0.5, k);
        if (u < 20.0 * tr.U_min()) break;
        double ph = tr.phi_at(u);
        double F = tr.rhs.slope(u, ph);
        double r = ph / u;
        double vp = -std::pow(r, a);
        double dvp_du = -a * std::pow(r, a - 1.0) * (F * u - ph) / (u * u);
        double du_dxi = -std::pow(ph, a) / (m * std::pow(u, m - 1.0));
        us.push_back(u);
        vps.push_back(vp);
        vpps.push_back(dvp_du * du_dxi);
    }
    if (us.size() < 4) throw ExtrapolationError("too few samples near the front");
    double k1 = std::min(ma, 1.0), k2 = std::max(ma, 1.0);
    if (std::abs(k2 - k1) < 1e-6) k2 = 2.0 * k1;
    pv.Vp0 = detail::extrapolate_to_zero(us, vps, k1, k2);
    pv.Vpp0 = detail::extrapolate_to_zero(us, vpps, k1, k2);
    double ul = tr.U.front();
    pv.Vp_left = -std::pow(tr.phi.front() / ul, a);
    pv.predicted_Vp0 = -std::pow(w.c, a);
    pv.predicted_Vpp = (w.gamma * w.c - h.derivative(0.0)) * ma / ((P.p - 1.0) * (ma + 1.0) * std::pow(w.c, 1.0 - a));
    return pv;
}

struct EndpointFit {
    double slope0 = 0.0;
    double C1 = 0.0;
    double mu1 = 0.0;
    double predicted_C = 0.0;
    double predicted_mu = 0.0;
    double residual0 = 0.0;
    double residual1 = 0.0;
};

/**
 * @brief Asymptotics of a critical trajectory at both ends.
 *
 * slope0 is the linear-fit slope of phi against U on [eps_lo, 10 eps_lo]. (C1, mu1) come from a
 * log-log fit on s = 1-U in [s_fit, 10 s_fit] with s_fit = max(1e-4, 100 eps_hi), clear of the seed.
 */
inline EndpointFit endpoint_fit(const PhaseTrajectory& tr, const Params& P, const ReactionSpec& h) {
    if (tr.termination == Termination::HitUAxis) throw FitError("trajectory is not critical");
    EndpointFit e;
    const int n = 21;
    {
        double lo = tr.U_min(), hi = 10.0 * lo;
        Eigen::MatrixXd X(n, 2);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            double u = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
            X(i, 0) = 1.0;
            X(i, 1) = u;
            y(i) = i == 0 ? tr.phi.back() : tr.phi_at(u);
        }
        auto r = numerics::least_squares(X, y);
        e.slope0 = r.coef(1);
        e.residual0 = r.residual_rms / std::max(1e-300, y.cwiseAbs().maxCoeff());
    }
    {
        double lo = std::max(1e-4, 100.0 * tr.eps_hi), hi = 10.0 * lo;
        Eigen::MatrixXd X(n, 2);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            double s = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
            X(i, 0) = 1.0;
            X(i, 1) = std::log(s);
            y(i) = std::log(tr.phi_at(1.0 - s));
        }
        auto r = numerics::least_squares(X, y);
        e.mu1 = r.coef(1);
        e.C1 = std::exp(r.coef(0));
        e.residual1 = r.residual_rms;
    }
    if (e.residual0 > 1e-2 || e.residual1 > 1e-2 || !(e.slope0 > 0.0) || !(e.mu1 > 0.0))
        throw FitError("endpoint regression residual above threshold");
    e.predicted_C = seed_constant(P, h, tr.c, tr.gamma);
    e.predicted_mu = P.p - 1.0;
    return e;
}

enum class PsiWeight {
    Source,   // numerator weight |P|^{p-2} from the gamma-derivative of the level equation
    Literal,  // numerator weight 1
};

/**
 * @brief c'(gamma) from the level-set quotient
 *   c' = -(m-alpha) int w Psi dq / int q^{-1} Psi dq,
 *   Psi = q^{1/(m-alpha)} exp(int_q^1 [(p-2)gamma/((p-1)|P|) + h(s)/((p-1)|P|^p s)] dr),
 * where P(q) = V'(V^{-1}(q)) is the pressure slope at level q and s(q) the matching density.
 * With PsiWeight::Source the numerator carries w = |P|^{p-2}; for p = 2 both weights coincide.
 */
inline double cprime_from(const PhaseTrajectory& tr, const ReactionSpec& h, PsiWeight weight = PsiWeight::Source) {
    if (tr.termination == Termination::HitUAxis) throw SingularityError("trajectory is not critical");
    const Params& P = tr.params;
    const double m = P.m, a = P.alpha, ma = m - a, p = P.p, gamma = tr.gamma;
    const double Q = m / ma;
    auto s_of = [&](double q) { return std::pow(ma * q / m, 1.0 / ma); };
    auto absP = [&](double q) {
        double s = s_of(q);
        return std::pow(tr.phi_at(s) / s, a);
    };
    auto b = [&](double q) {
        double s = s_of(q);
        double Pq = absP(q);
        double v = h(s) / ((p - 1.0) * std::pow(Pq, p) * s);
        if (gamma != 0.0) v += (p - 2.0) * gamma / ((p - 1.0) * Pq);
        return v;
    };
    auto wgt = [&](double q) { return weight == PsiWeight::Source ? std::pow(absP(q), p - 2.0) : 1.0; };

    // nodes in q, ascending
    std::vector<double> qs;
    for (std::size_t k = tr.U.size(); k-- > 0;) qs.push_back(m / ma * std::pow(tr.U[k], ma));
    const std::size_t n = qs.size();
    std::vector<double> A(n, 0.0);  // int_{q_0}^{q_k} b
    for (std::size_t k = 1; k < n; ++k) A[k] = A[k - 1] + GL8::integrate(b, qs[k - 1], qs[k]);

    // Psi is evaluated relative to exp(-A) at the lower end; A increases upward for positive b.
    double num = 0.0, den = 0.0;
    const double e = 1.0 / ma;
    {
        double q0 = qs.front();
        double w0 = wgt(q0);
        num += w0 * std::pow(q0, e + 1.0) / (e + 1.0);
        den += std::pow(q0, e) / e;
    }
    double psi_max = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double q0 = qs[k], q1 = qs[k + 1];
        if (!(q1 > q0)) continue;
        if (A[k] - A.front() > 745.0) break;
        auto psi = [&](double q) {
            double Aq = A[k] + GL8::integrate(b, q0, q);
            return std::pow(q, e) * std::exp(-(Aq - A.front()));
        };
        num += GL8::integrate([&](double q) { return wgt(q) * psi(q); }, q0, q1);
        den += GL8::integrate([&](double q) { return psi(q) / q; }, q0, q1);
        psi_max = std::max(psi_max, std::pow(q0, e) * std::exp(-(A[k] - A.front())));
    }
    double qh = qs.back();
    double psi_h = std::pow(qh, e) * std::exp(-(A.back() - A.front()));
    if (!std::isfinite(num) || !std::isfinite(den) || !(den > 0.0))
        throw SingularityError("Psi integrals are not finite");
    if (psi_h > 1e-6 * psi_max)
        throw SingularityError("Psi does not decay near q = m/(m-alpha)");
    double K = std::max(0.0, b(qh) * (Q - qh));
    num += wgt(qh) * psi_h * (Q - qh) / (1.0 + K + (p - 2.0));
    den += psi_h / qh * (Q - qh) / (1.0 + K);
    return -ma * num / den;
}

inline double cprime_formula(const Params& P, const ReactionSpec& h, double gamma, double tol = 1e-9,
                             PsiWeight weight = PsiWeight::Source, const CriticalOptions& o = {}) {
    CriticalSpeed cs = critical_speed(P, h, gamma, tol, o);
    return cprime_from(critical_trajectory(P, h, gamma, cs, o), h, weight);
}

struct SpeedCurve {
    std::vector<double> gammas;
    std::vector<double> c_values;
    std::vector<double> cprime_fd;
    std::vector<double> cprime_formula;
    std::vector<bool> ok;
    std::vector<std::string> note;
    double c_sharp = 0.0;
    double cprime0_onesided = 0.0;
    double gamma_cap = 0.0;
};

/**
 * @brief Samples gamma -> c(gamma) with two derivative estimates and c_sharp = -c'(0)/c(0).
 *
 * Points outside [0, min(0.5, c(0)/(2m))] or failing in the bisection are flagged, not fatal.
 */
inline SpeedCurve speed_curve(const Params& P, const ReactionSpec& h, const std::vector<double>& gammas,
                              double tol = 1e-9, const CriticalOptions& o = {}) {
    SpeedCurve sc;
    sc.gammas = gammas;
    const std::size_t n = gammas.size();
    sc.c_values.assign(n, std::numeric_limits<double>::quiet_NaN());
    sc.cprime_fd.assign(n, std::numeric_limits<double>::quiet_NaN());
    sc.cprime_formula.assign(n, std::numeric_limits<double>::quiet_NaN());
    sc.ok.assign(n, false);
    sc.note.assign(n, "");
    CriticalSpeed c0 = critical_speed(P, h, 0.0, tol, o);
    sc.gamma_cap = std::min(0.5, c0.c / (2.0 * P.m));
    for (std::size_t i = 0; i < n; ++i) {
        double g = gammas[i];
        if (g < 0.0 || g > sc.gamma_cap * (1.0 + 1e-12)) {
            sc.note[i] = "outside admissible range";
            continue;
        }
        try {
            CriticalSpeed cs = g == 0.0 ? c0 : critical_speed(P, h, g, tol, o);
            sc.c_values[i] = cs.c;
            sc.cprime_formula[i] = cprime_from(critical_trajectory(P, h, g, cs, o), h);
            sc.ok[i] = true;
        } catch (const Error& e) {
            sc.note[i] = e.code() + ": " + e.what();
        }
    }
    // three-point differences on a possibly nonuniform grid
    for (std::size_t i = 0; i < n && n >= 3; ++i) {
        std::size_t j0 = i == 0 ? 0 : (i == n - 1 ? n - 3 : i - 1);
        double x0 = gammas[j0], x1 = gammas[j0 + 1], x2 = gammas[j0 + 2];
        double y0 = sc.c_values[j0], y1 = sc.c_values[j0 + 1], y2 = sc.c_values[j0 + 2];
        double x = gammas[i];
        double d = y0 * (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)) + y1 * (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
                   y2 * (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        sc.cprime_fd[i] = d;
    }
    double g1 = 1e-2 * c0.c;
    double c1 = critical_speed(P, h, g1, tol, o).c;
    double c2 = critical_speed(P, h, 2.0 * g1, tol, o).c;
    sc.cprime0_onesided = (-3.0 * c0.c + 4.0 * c1 - c2) / (2.0 * g1);
    sc.c_sharp = -sc.cprime0_onesided / c0.c;
    return sc;
}

struct SubwaveProfile {
    double gamma = 0.0;
    double c = 0.0;
    double eta = 0.0;
    double b = 0.0;
    double nu = 0.0;
    Params params;
    PhaseTrajectory trajectory;
    numerics::Hermite U_of_r;  // r in [r_first, r_last] with U decreasing
    double r_first = 0.0;
    double r_last = 0.0;
    std::vector<double> r;
    std::vector<double> U;
    std::vector<double> flux;  // -(|(U^m)'|^{p-1})

    double U_at(double x) const {
        if (x <= 0.0) return eta;
        if (x >= b) return 0.0;
        if (x < r_first) {
            // near the top the density leaves eta like x^{(alpha+1)/alpha}
            double u1 = U_of_r(r_first);
            return eta - (eta - u1) * std::pow(x / r_first, (params.alpha + 1.0) / params.alpha);
        }
        if (x > r_last) {
            double u1 = U_of_r(r_last);
            return u1 * std::pow((b - x) / (b - r_last), 1.0 / params.m);
        }
        return U_of_r(x);
    }
};

/**
 * @brief Trajectory through (eta, 0) followed down to U = 0, and its spatial profile on [0, b].
 *
 * Throws NoExitError carrying the blocking level when phi returns to zero at positive U.
 */
inline SubwaveProfile subwave_profile(const Params& P, const ReactionSpec& h, double gamma, double c, double eta,
                                      double dr = 0.01, ShootOptions opt = {}) {
    const double m = P.m, a = P.alpha;
    TrajectoryRhs rhs = make_rhs(P, h, c, gamma);
    const double fe = rhs.fr(eta);
    if (!(fe > 0.0)) throw NoExitError("reaction is not positive at eta; blocked at U=" + std::to_string(eta));
    const double d0 = 1e-9 * eta;
    const double K = (a + 1.0) * fe;
    numerics::OdeOptions o;
    o.rtol = opt.rtol;
    o.h0 = 0.1 * d0;
    o.h_max = 0.05;
    o.max_steps = opt.max_steps;
    o.stop_on_sign_change = true;
    const double U_end = 1e-10;
    numerics::Rosenbrock4<TrajectoryRhs> ode(rhs, o);
    auto res = ode.integrate(-(eta - d0), K * d0, -U_end);
    if (res.event)
        throw NoExitError("trajectory from (eta,0) returns to the U-axis at U=" + std::to_string(-res.t_event));

    SubwaveProfile sw;
    sw.gamma = gamma;
    sw.c = c;
    sw.eta = eta;
    sw.params = P;
    PhaseTrajectory& tr = sw.trajectory;
    tr.c = c;
    tr.gamma = gamma;
    tr.params = P;
    tr.rhs = rhs;
    tr.eps_hi = 1.0 - eta;
    tr.eps_lo = U_end;
    detail::fill_samples(tr, res);
    tr.termination = Termination::HitPhiAxis;
    sw.nu = std::max(0.0, tr.phi.back() - c * U_end);
    tr.nu = sw.nu;
    if (!(sw.nu > 0.0)) throw NoExitError("trajectory reaches U=0 with zero flux");

    auto integrand = [&](double u) { return m * std::pow(u, m - 1.0) / std::pow(tr.phi_at(u), a); };
    const std::size_t n = tr.U.size();
    std::vector<double> xs(n);
    xs[0] = m * std::pow(eta, m - 1.0) * (a + 1.0) * std::pow(d0, 1.0 / (a + 1.0)) / std::pow(K, a / (a + 1.0));
    for (std::size_t k = 1; k < n; ++k) xs[k] = xs[k - 1] + GL8::integrate(integrand, tr.U[k], tr.U[k - 1]);
    sw.b = xs[n - 1] + std::pow(U_end, m) / std::pow(tr.phi.back(), a);
    std::vector<numerics::OdeNode> nodes;
    for (std::size_t k = 0; k < n; ++k) {
        double dU = -std::pow(tr.phi[k], a) / (m * std::pow(tr.U[k], m - 1.0));
        if (!nodes.empty() && !(xs[k] > nodes.back().t)) continue;
        nodes.push_back({xs[k], tr.U[k], dU});
    }
    sw.U_of_r = numerics::Hermite(std::move(nodes));
    sw.r_first = sw.U_of_r.t_front();
    sw.r_last = sw.U_of_r.t_back();
    for (double x = 0.0; x < sw.b; x += dr) {
        sw.r.push_back(x);
        double u = sw.U_at(x);
        sw.U.push_back(u);
        sw.flux.push_back(u > 0.0 && u < eta ? -tr.phi_at(u) : 0.0);
    }
    sw.r.push_back(sw.b);
    sw.U.push_back(0.0);
    sw.flux.push_back(-sw.nu);
    return sw;
}

struct Barrier {
    double k1 = 0.0;
    double k2 = 0.0;
};

/**
 * @brief Line phi = k1 + k2 U that no trajectory starting below it at U = 0 can cross, for speeds up to c0
 * and convection up to gamma0. k2 is the fixed point of k2 >= sup_U F(U, k1 + k2 U).
 */
inline Barrier trajectory_barrier(const Params& P, const ReactionSpec& h, double c0, double gamma0, double k1) {
    ReducedReaction fr = reduced_reaction(h, P);
    const double m = P.m, a = P.alpha;
    Barrier b{k1, c0};
    for (int it = 0; it < 200; ++it) {
        double sup = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            double u = std::max(1e-6, i / 2000.0);
            double L = b.k1 + b.k2 * u;
            double F = c0 + gamma0 * m * std::pow(u, m - 1.0) * std::pow(L, 1.0 - a) + std::max(0.0, -fr(u)) / std::pow(L, a);
            sup = std::max(sup, F);
        }
        double next = 1.01 * sup;
        if (next <= b.k2) break;
        b.k2 = next;
    }
    return b;
}

}  // namespace dnlfront
