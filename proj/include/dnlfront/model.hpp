#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dnlfront/error.hpp"
#include "dnlfront/numerics.hpp"

namespace dnlfront {

/// Exponents of the operator div(|grad u^m|^{p-2} grad u^m) in dimension N.
struct Params {
    double m = 2.0;
    double p = 2.0;
    int N = 1;
    double alpha = 1.0;  // 1/(p-1)

    /// m - alpha, the exponent of the pressure
    double pressure_exponent() const { return m - alpha; }
};

inline Params validate_params(double m, double p, int N) {
    if (!(m > 0.0)) throw RegimeError("m must be positive, got " + std::to_string(m));
    if (!(p >= 2.0)) throw RegimeError("p must be at least 2, got " + std::to_string(p));
    if (!(m * (p - 1.0) > 1.0))
        throw RegimeError("slow diffusion requires m(p-1) > 1, got " + std::to_string(m * (p - 1.0)));
    if (N < 1) throw DimensionError("N must be at least 1, got " + std::to_string(N));
    Params out{m, p, N, 1.0 / (p - 1.0)};
    return out;
}

enum class ReactionKind { Monostable, Bistable, Combustion, PowerMonostable, Custom };

inline std::string to_string(ReactionKind k) {
    switch (k) {
        case ReactionKind::Monostable: return "logistic";
        case ReactionKind::Bistable: return "bistable";
        case ReactionKind::Combustion: return "combustion";
        case ReactionKind::PowerMonostable: return "power";
        case ReactionKind::Custom: return "custom";
    }
    return "custom";
}

inline ReactionKind reaction_kind_from_string(const std::string& s) {
    if (s == "logistic" || s == "monostable") return ReactionKind::Monostable;
    if (s == "bistable") return ReactionKind::Bistable;
    if (s == "combustion") return ReactionKind::Combustion;
    if (s == "power") return ReactionKind::PowerMonostable;
    throw ParseError("unknown reaction kind '" + s + "'");
}

/// Kind-specific coefficients. Unused entries are ignored by the kind.
struct ReactionCoefficients {
    double a = 0.0;  // threshold (bistable, combustion)
    double k = 1.0;  // amplitude
    double q = 1.0;  // power of the monostable power law
};

/**
 * @brief Reaction nonlinearity h with its derivative.
 *
 * Kinds:
 *  - Monostable      k u (1-u)
 *  - PowerMonostable k u^q (1-u), q >= 1
 *  - Bistable        k u (u-a)(1-u)
 *  - Combustion      0 on [0,a], k (u-a)(1-u) above a
 *  - Custom          user callables
 */
struct ReactionSpec {
    ReactionKind kind = ReactionKind::Monostable;
    ReactionCoefficients coef;
    std::function<double(double)> h;
    std::function<double(double)> dh;

    double operator()(double u) const { return h(u); }
    double derivative(double u) const { return dh(u); }
    double a() const { return coef.a; }
};

namespace detail {

inline std::vector<double> validation_grid(double a) {
    std::vector<double> g;
    for (int i = 0; i <= 2000; ++i) g.push_back(2.0 * i / 2000.0);
    for (int k = 1; k <= 9; ++k) {
        double e = std::pow(10.0, -k);
        for (double c : {0.0, a, 1.0}) {
            g.push_back(c + e);
            if (c - e > 0.0) g.push_back(c - e);
        }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

inline void check_sign_pattern(const ReactionSpec& r) {
    const double a = r.a();
    if (std::abs(r(0.0)) > 1e-14) throw SignPatternError("h(0) must vanish");
    if (std::abs(r(1.0)) > 1e-12) throw SignPatternError("h(1) must vanish");
    for (double u : validation_grid(a)) {
        double v = r(u);
        if (!std::isfinite(v)) throw SignPatternError("h is not finite at u=" + std::to_string(u));
        if (u > 0.0 && u <= a && v > 0.0)
            throw SignPatternError("h must be nonpositive on [0,a]; h(" + std::to_string(u) + ") > 0");
        if (u > a && u < 1.0 && !(v > 0.0))
            throw SignPatternError("h must be positive on (a,1); fails at u=" + std::to_string(u));
        if (u > 1.0 && !(v < 0.0))
            throw SignPatternError("h must be negative above 1; fails at u=" + std::to_string(u));
    }
    if (!(r.derivative(1.0) < 0.0)) throw DegeneracyError("h'(1) must be negative");
}

}  // namespace detail

/// Integral of h(u) u^{m-1} over [0,1] by tanh-sinh quadrature, split at the threshold.
inline double sign_integral(const ReactionSpec& r, const Params& P) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double u) { return u <= 0.0 ? 0.0 : r(u) * std::pow(u, P.m - 1.0); };
    double a = r.a();
    double total = 0.0;
    if (a > 0.0) total += ts.integrate(f, 0.0, a, 1e-12);
    total += ts.integrate(f, a, 1.0, 1e-12);
    return total;
}

/// Same integral by composite 8-point Gauss-Legendre on n panels after the substitution u = s^K.
inline double sign_integral_panels(const ReactionSpec& r, const Params& P, int n) {
    const int K = std::max(1, static_cast<int>(std::ceil(2.0 / P.m)));
    auto g = [&](double s) {
        if (s <= 0.0) return 0.0;
        double u = std::pow(s, K);
        return K * std::pow(s, K - 1) * r(u) * std::pow(u, P.m - 1.0);
    };
    using GL = boost::math::quadrature::gauss<double, 8>;
    double sa = std::pow(r.a(), 1.0 / K);
    double total = 0.0;
    for (auto [lo, hi] : {std::pair{0.0, sa}, std::pair{sa, 1.0}}) {
        if (hi <= lo) continue;
        double w = (hi - lo) / n;
        for (int i = 0; i < n; ++i) total += GL::integrate(g, lo + i * w, lo + (i + 1) * w);
    }
    return total;
}

/// Builds a validated reaction. If params are supplied, the positive-speed condition is also checked for a > 0.
inline ReactionSpec make_reaction(ReactionKind kind, ReactionCoefficients c = {},
                                  std::optional<Params> params = std::nullopt) {
    ReactionSpec r;
    r.kind = kind;
    r.coef = c;
    const double a = c.a, k = c.k, q = c.q;
    if (!(k > 0.0)) throw SignPatternError("reaction amplitude k must be positive");
    switch (kind) {
        case ReactionKind::Monostable:
            r.coef.a = 0.0;
            r.h = [k](double u) { return k * u * (1.0 - u); };
            r.dh = [k](double u) { return k * (1.0 - 2.0 * u); };
            break;
        case ReactionKind::PowerMonostable:
            if (!(q >= 1.0)) throw SignPatternError("power reaction requires q >= 1");
            r.coef.a = 0.0;
            r.h = [k, q](double u) { return u <= 0.0 ? 0.0 : k * std::pow(u, q) * (1.0 - u); };
            r.dh = [k, q](double u) {
                if (u <= 0.0) return q == 1.0 ? k : 0.0;
                return k * (q * std::pow(u, q - 1.0) * (1.0 - u) - std::pow(u, q));
            };
            break;
        case ReactionKind::Bistable:
            if (!(a > 0.0 && a < 1.0)) throw SignPatternError("bistable threshold must lie in (0,1)");
            r.h = [k, a](double u) { return k * u * (u - a) * (1.0 - u); };
            r.dh = [k, a](double u) { return k * (-3.0 * u * u + 2.0 * (1.0 + a) * u - a); };
            break;
        case ReactionKind::Combustion:
            if (!(a > 0.0 && a < 1.0)) throw SignPatternError("combustion threshold must lie in (0,1)");
            r.h = [k, a](double u) { return u <= a ? 0.0 : k * (u - a) * (1.0 - u); };
            r.dh = [k, a](double u) { return u <= a ? 0.0 : k * (1.0 + a - 2.0 * u); };
            break;
        case ReactionKind::Custom:
            throw SignPatternError("custom reactions are built with make_custom_reaction");
    }
    detail::check_sign_pattern(r);
    if (params && r.a() > 0.0 && !(sign_integral(r, *params) > 0.0))
        throw SignPatternError("positive-speed condition fails: integral of h u^{m-1} over [0,1] is not positive");
    return r;
}

inline ReactionSpec make_custom_reaction(std::function<double(double)> h, std::function<double(double)> dh,
                                         double a = 0.0, std::optional<Params> params = std::nullopt) {
    ReactionSpec r;
    r.kind = ReactionKind::Custom;
    r.coef.a = a;
    r.h = std::move(h);
    r.dh = std::move(dh);
    detail::check_sign_pattern(r);
    if (params && a > 0.0 && !(sign_integral(r, *params) > 0.0))
        throw SignPatternError("positive-speed condition fails");
    return r;
}

/// h == 0. Exempt from validation; used for pure-diffusion checks only.
inline ReactionSpec zero_reaction() {
    ReactionSpec r;
    r.kind = ReactionKind::Custom;
    r.h = [](double) { return 0.0; };
    r.dh = [](double) { return 0.0; };
    return r;
}

struct ReactionStats {
    double sigma0 = 0.0;
    double qF = 0.0;
    double sign_integral = 0.0;
    double H_sup = 0.0;
};

/// sup over (0,1] of h(u)/u, including the limit h'(0).
inline double sigma0(const ReactionSpec& r) {
    double best = r.derivative(0.0);
    double best_u = 0.0;
    std::vector<double> us;
    for (int i = 1; i <= 4000; ++i) us.push_back(i / 4000.0);
    for (int k = 4; k <= 12; ++k) us.push_back(std::pow(10.0, -k));
    for (double u : us) {
        double v = r(u) / u;
        if (v > best) {
            best = v;
            best_u = u;
        }
    }
    if (best_u > 0.0) {
        double lo = std::max(best_u - 1.0 / 4000.0, best_u * 0.5), hi = std::min(1.0, best_u + 1.0 / 4000.0);
        auto [x, v] = numerics::golden_max([&](double u) { return r(u) / u; }, lo, hi);
        (void)x;
        best = std::max(best, v);
    }
    return best;
}

/// sup over [0,M] of |h'|.
inline double h_sup(const ReactionSpec& r, double M) {
    const int n = 4000;
    double best = 0.0, best_u = 0.0;
    for (int i = 0; i <= n; ++i) {
        double u = M * i / n;
        double v = std::abs(r.derivative(u));
        if (v > best) {
            best = v;
            best_u = u;
        }
    }
    double lo = std::max(0.0, best_u - M / n), hi = std::min(M, best_u + M / n);
    auto [x, v] = numerics::golden_max([&](double u) { return std::abs(r.derivative(u)); }, lo, hi);
    (void)x;
    return std::max(best, v);
}

inline ReactionStats reaction_stats(const ReactionSpec& r, const Params& P, double M = 2.0) {
    ReactionStats s;
    s.sigma0 = sigma0(r);
    s.qF = P.m * (P.p - 1.0) + P.p / P.N;
    s.sign_integral = sign_integral(r, P);
    s.H_sup = h_sup(r, M);
    return s;
}

/// Largest delta (grid step 1e-3, capped at 1) with h' < 0 on (1-delta, 1+delta).
inline double negativity_window(const ReactionSpec& r) {
    const double step = 1e-3;
    double delta = step;
    for (int i = 1; i <= 1000; ++i) {
        double d = i * step;
        if (!(r.derivative(1.0 - d) < 0.0) || !(r.derivative(1.0 + d) < 0.0)) return delta;
        delta = d;
    }
    return 1.0;
}

/// f(U) = m U^{m-1} h(U) and its derivative.
struct ReducedReaction {
    ReactionSpec r;
    double m;
    double operator()(double U) const {
        if (U <= 0.0) return 0.0;
        return m * std::pow(U, m - 1.0) * r(U);
    }
    double derivative(double U) const {
        if (U <= 0.0) return 0.0;
        double um2 = std::pow(U, m - 2.0);
        return m * (m - 1.0) * um2 * r(U) + m * um2 * U * r.derivative(U);
    }
};

inline ReducedReaction reduced_reaction(const ReactionSpec& r, const Params& P) { return {r, P.m}; }

}  // namespace dnlfront
