#pragma once

// Explicit finite-volume solver for u_t = div(|grad u^m|^{p-2} grad u^m) + h(u)
// on radial (r in [0,R], dimension N) and line (x in [x_min, x_min+R]) grids,
// with the initial data, front tracking, flux diagnostics and envelope ODE used by the analysis.

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
#include "dnlfront/waves.hpp"

namespace dnlfront {

enum class Geometry { Radial, Line };

inline std::string to_string(Geometry g) { return g == Geometry::Radial ? "radial" : "line"; }

inline Geometry geometry_from_string(const std::string& s) {
    if (s == "radial") return Geometry::Radial;
    if (s == "line") return Geometry::Line;
    throw ParseError("unknown geometry '" + s + "'");
}

/// Cell-centred field. Radial grids start at r = 0 with a symmetry condition; line grids have
/// homogeneous Dirichlet data on both ends. The right end is Dirichlet in both cases.
struct RadialField {
    Geometry geometry = Geometry::Radial;
    int N = 1;
    double dr = 0.02;
    double x_min = 0.0;  // left edge of the first cell
    std::vector<double> r;
    std::vector<double> u;
    double t = 0.0;

    std::size_t size() const { return u.size(); }
    double R() const { return static_cast<double>(u.size()) * dr; }
    double x_max() const { return x_min + R(); }
    double sup() const { return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end()); }
};

/// Empty field on [x_min, x_min + R] with n = round(R/dr) cells.
inline RadialField make_field(Geometry g, int N, double R, double dr, double x_min = 0.0) {
    if (!(dr > 0.0) || !(R > 0.0)) throw GridError("grid requires R > 0 and dr > 0");
    if (N < 1) throw DimensionError("N must be at least 1");
    if (g == Geometry::Line && N != 1) throw DimensionError("line geometry is one-dimensional");
    if (g == Geometry::Radial && x_min != 0.0) throw GridError("radial grids start at r = 0");
    const auto n = static_cast<std::size_t>(std::llround(R / dr));
    if (n < 3) throw GridError("grid needs at least three cells");
    RadialField f;
    f.geometry = g;
    f.N = N;
    f.dr = dr;
    f.x_min = x_min;
    f.r.resize(n);
    f.u.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) f.r[i] = x_min + (static_cast<double>(i) + 0.5) * dr;
    return f;
}

// ---------------------------------------------------------------------------
// initial data

enum class DatumKind { Zero, Constant, Kanel, Plateau, ClassA, ExactWave };

inline std::string to_string(DatumKind k) {
    switch (k) {
        case DatumKind::Zero: return "zero";
        case DatumKind::Constant: return "constant";
        case DatumKind::Kanel: return "kanel";
        case DatumKind::Plateau: return "plateau";
        case DatumKind::ClassA: return "class_a";
        case DatumKind::ExactWave: return "exact_wave";
    }
    return "zero";
}

inline DatumKind datum_kind_from_string(const std::string& s) {
    if (s == "zero") return DatumKind::Zero;
    if (s == "constant") return DatumKind::Constant;
    if (s == "kanel") return DatumKind::Kanel;
    if (s == "plateau") return DatumKind::Plateau;
    if (s == "class_a") return DatumKind::ClassA;
    if (s == "exact_wave") return DatumKind::ExactWave;
    throw ParseError("unknown datum kind '" + s + "'");
}

/**
 * @brief Parameters of the initial data. Each kind reads its own subset.
 *
 *  - Constant:  value
 *  - Kanel:     delta (1 - |x - center|^sigma)^beta on |x - center| <= 1, scaled by width
 *  - Plateau:   eta on [0, rho], subwave profile U^{c,eta}(r - rho) beyond (needs subwave)
 *  - ClassA:    level on [left, right] with linear ramps of widths ramp_left, ramp_right
 *  - ExactWave: U_{c*}(x - x0) (needs wave)
 */
struct DatumSpec {
    DatumKind kind = DatumKind::Zero;
    double value = 0.0;
    double delta = 0.1, sigma = 3.0, beta = 2.0, width = 1.0, center = 0.0;
    double rho = 5.0, eta = 0.9, c = 0.5;
    double level = 1.0, left = 0.0, right = 10.0, ramp_left = 1.0, ramp_right = 1.0;
    double x0 = 0.0;
};

/// Exponent constraints of the bump: beta > p/(m(p-1)) and sigma > p/(p-1).
inline void check_kanel(const DatumSpec& d, const Params& P) {
    const double beta_min = P.p / (P.m * (P.p - 1.0));
    const double sigma_min = P.p / (P.p - 1.0);
    if (!(d.beta > beta_min))
        throw ConstraintError("bump exponent beta must exceed " + std::to_string(beta_min));
    if (!(d.sigma > sigma_min))
        throw ConstraintError("bump exponent sigma must exceed " + std::to_string(sigma_min));
    if (!(d.delta > 0.0) || !(d.width > 0.0)) throw ConstraintError("bump height and width must be positive");
}

/**
 * @brief Samples a datum on the grid at cell centres.
 *
 * Plateau needs the subwave profile; ExactWave needs the critical wave. GridError if the
 * support does not fit inside the domain.
 */
inline RadialField init_datum(const DatumSpec& d, const Params& P, RadialField grid,
                              const SubwaveProfile* subwave = nullptr, const WaveProfile* wave = nullptr) {
    RadialField f = std::move(grid);
    f.t = 0.0;
    const double lo = f.x_min, hi = f.x_max();
    auto require_inside = [&](double a, double b) {
        if (a < lo - 1e-12 || b > hi + 1e-12)
            throw GridError("datum support [" + std::to_string(a) + ", " + std::to_string(b) + "] exceeds the domain");
    };
    switch (d.kind) {
        case DatumKind::Zero:
            std::fill(f.u.begin(), f.u.end(), 0.0);
            break;
        case DatumKind::Constant:
            if (!(d.value >= 0.0)) throw ConstraintError("constant datum must be nonnegative");
            std::fill(f.u.begin(), f.u.end(), d.value);
            break;
        case DatumKind::Kanel: {
            check_kanel(d, P);
            double c0 = f.geometry == Geometry::Radial ? 0.0 : d.center;
            require_inside(f.geometry == Geometry::Radial ? 0.0 : c0 - d.width, c0 + d.width);
            for (std::size_t i = 0; i < f.size(); ++i) {
                double s = std::abs(f.r[i] - c0) / d.width;
                f.u[i] = s < 1.0 ? d.delta * std::pow(1.0 - std::pow(s, d.sigma), d.beta) : 0.0;
            }
            break;
        }
        case DatumKind::Plateau: {
            if (!subwave) throw ConstraintError("plateau datum requires a subwave profile");
            if (f.geometry != Geometry::Radial) throw ConstraintError("plateau datum is radial");
            require_inside(0.0, d.rho + subwave->b);
            for (std::size_t i = 0; i < f.size(); ++i) f.u[i] = subwave->U_at(f.r[i] - d.rho);
            break;
        }
        case DatumKind::ClassA: {
            if (!(d.level > 0.0) || !(d.right > d.left) || !(d.ramp_left > 0.0) || !(d.ramp_right > 0.0))
                throw ConstraintError("class A datum needs level > 0, right > left and positive ramps");
            double a = d.left - d.ramp_left, b = d.right + d.ramp_right;
            if (f.geometry == Geometry::Radial) a = std::max(a, 0.0);
            require_inside(a, b);
            for (std::size_t i = 0; i < f.size(); ++i) {
                double x = f.r[i];
                double v = 0.0;
                if (x >= d.left && x <= d.right)
                    v = d.level;
                else if (x < d.left && x > d.left - d.ramp_left)
                    v = d.level * (x - (d.left - d.ramp_left)) / d.ramp_left;
                else if (x > d.right && x < d.right + d.ramp_right)
                    v = d.level * ((d.right + d.ramp_right) - x) / d.ramp_right;
                f.u[i] = v;
            }
            break;
        }
        case DatumKind::ExactWave: {
            if (!wave) throw ConstraintError("exact-wave datum requires a wave profile");
            require_inside(lo, d.x0);
            for (std::size_t i = 0; i < f.size(); ++i) f.u[i] = wave->U_at(f.r[i] - d.x0);
            break;
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// scheme

/**
 * @brief Conservative explicit update with degenerate centred flux and exact cell volumes.
 *
 * Interface j sits between cells j-1 and j (j = 0..n). F_j = |D|^{p-2} D with
 * D = (u_j^m - u_{j-1}^m)/dr. The time step bound keeps every cell update
 * nondecreasing in every argument, which gives the discrete comparison principle.
 */
class Solver {
public:
    double cfl = 0.8;

    Solver(const Params& P, const ReactionSpec& h, const RadialField& layout, double M = 0.0)
        : P_(P), h_(h), n_(layout.size()), dr_(layout.dr), geometry_(layout.geometry) {
        if (layout.geometry == Geometry::Radial && layout.N != P.N)
            throw DimensionError("field dimension does not match the parameters");
        area_.resize(n_ + 1);
        inv_vol_.resize(n_);
        for (std::size_t j = 0; j <= n_; ++j) {
            double rj = static_cast<double>(j) * dr_;
            area_[j] = geometry_ == Geometry::Radial ? std::pow(rj, P.N - 1) : 1.0;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (geometry_ == Geometry::Radial) {
                double a = static_cast<double>(i) * dr_, b = a + dr_;
                double vol = (std::pow(b, P.N) - std::pow(a, P.N)) / P.N;
                inv_vol_[i] = 1.0 / vol;
            } else {
                inv_vol_[i] = 1.0 / dr_;
            }
        }
        if (geometry_ == Geometry::Radial) area_[0] = 0.0;  // symmetry
        H_ = h_sup(h, std::max({1.0, M, layout.sup()}) * 1.0001);
        fast_ = std::abs(P.m - 2.0) < 1e-15 && std::abs(P.p - 2.0) < 1e-15;
        w_.assign(n_ + 2, 0.0);
        coef_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) coef_[i] = (area_[i] + area_[i + 1]) * inv_vol_[i] / dr_;
    }

    double H() const { return H_; }
    const Params& params() const { return P_; }
    const ReactionSpec& reaction() const { return h_; }

    double h(double u) const {
        const double k = h_.coef.k, a = h_.coef.a;
        switch (h_.kind) {
            case ReactionKind::Monostable: return k * u * (1.0 - u);
            case ReactionKind::Bistable: return k * u * (u - a) * (1.0 - u);
            case ReactionKind::Combustion: return u <= a ? 0.0 : k * (u - a) * (1.0 - u);
            case ReactionKind::PowerMonostable: {
                if (u <= 0.0) return 0.0;
                const double q = h_.coef.q;
                double uq;
                if (q == 2.0)
                    uq = u * u;
                else if (q == 6.0) {
                    double u2 = u * u;
                    uq = u2 * u2 * u2;
                } else
                    uq = std::pow(u, q);
                return k * uq * (1.0 - u);
            }
            case ReactionKind::Custom: return h_(u);
        }
        return h_(u);
    }

    /// Largest admissible step for the current field.
    double cfl_dt(const RadialField& f) const { return cfl / max_rate(f, active_end(f)); }

    /// One forward-Euler step of size dt. CFLError if dt exceeds the bound; NegativityError on undershoot.
    void step(RadialField& f, double dt) const {
        std::size_t hi = active_end(f);
        double bound = 1.0 / max_rate(f, hi);
        if (dt > bound * (1.0 + 1e-12))
            throw CFLError("dt=" + std::to_string(dt) + " exceeds the stability bound " + std::to_string(bound));
        update(f, hi, dt);
    }

    /// Step with the automatic CFL size, not exceeding dt_max. Returns the step taken.
    double step_auto(RadialField& f, double dt_max) const {
        std::size_t hi = active_end(f);
        double dt = std::min(dt_max, cfl / max_rate(f, hi));
        update(f, hi, dt);
        return dt;
    }

    /// Steps with automatic sizes until f.t reaches target. Returns the number of steps.
    std::size_t advance(RadialField& f, double target) const {
        const double eps_t = 1e-12 * std::max(1.0, std::abs(target));
        std::size_t steps = 0;
        if (!fast_) {
            while (f.t < target - eps_t) {
                step_auto(f, target - f.t);
                ++steps;
            }
            f.t = std::max(f.t, target);
            return steps;
        }
        const double k = h_.coef.k, a = h_.coef.a, q = h_.coef.q;
        switch (h_.kind) {
            case ReactionKind::Monostable:
                return advance_fast(f, target, eps_t, [k](double u) { return k * u * (1.0 - u); });
            case ReactionKind::Bistable:
                return advance_fast(f, target, eps_t, [k, a](double u) { return k * u * (u - a) * (1.0 - u); });
            case ReactionKind::PowerMonostable:
                if (q == 2.0)
                    return advance_fast(f, target, eps_t, [k](double u) { return k * u * u * (1.0 - u); });
                if (q == 6.0)
                    return advance_fast(f, target, eps_t, [k](double u) {
                        double u2 = u * u;
                        return k * u2 * u2 * u2 * (1.0 - u);
                    });
                return advance_fast(f, target, eps_t, [this](double u) { return h(u); });
            default:
                return advance_fast(f, target, eps_t, [this](double u) { return h(u); });
        }
    }

    /// Interface fluxes |D|^{p-2} D for j = 0..n. Interface 0 carries zero flux on radial grids.
    std::vector<double> interface_fluxes(const RadialField& f) const {
        std::vector<double> out(n_ + 1, 0.0);
        double wl = 0.0;
        for (std::size_t j = 0; j <= n_; ++j) {
            double wr = j < n_ ? w(f.u[j]) : 0.0;
            out[j] = flux(wr, wl);
            wl = wr;
        }
        if (geometry_ == Geometry::Radial) out[0] = 0.0;
        return out;
    }

private:
    double w(double u) const { return fast_ ? u * u : std::pow(u, P_.m); }
    double flux(double wr, double wl) const {
        double D = (wr - wl) / dr_;
        return fast_ || P_.p == 2.0 ? D : numerics::spow(D, P_.p - 1.0);
    }

    // cells >= the returned index are zero and stay zero for one step
    std::size_t active_end(const RadialField& f) const {
        std::size_t last = n_;
        while (last > 0 && f.u[last - 1] == 0.0) --last;
        return std::min(n_, last + 1);
    }

    // max over active cells of the diagonal rate: diffusion part plus sup|h'|
    double max_rate(const RadialField& f, std::size_t hi) const {
        const double* __restrict u = f.u.data();
        const double* __restrict cf = coef_.data();
        double best = 0.0;
        if (fast_) {
            for (std::size_t i = 0; i < hi; ++i) {
                double r = cf[i] * u[i];
                best = r > best ? r : best;
            }
            return 2.0 * best + H_ + 1e-300;
        }
        const double m = P_.m, p = P_.p;
        for (std::size_t i = 0; i < hi; ++i) {
            double ui = u[i];
            if (ui <= 0.0) continue;
            double s = 1.0;
            if (p != 2.0) {
                // secant bound of |D|^{p-2} D over the range of D reachable by moving u_i
                double wl = i > 0 ? w(u[i - 1]) : 0.0, wr = i + 1 < n_ ? w(u[i + 1]) : 0.0;
                double dmax = (std::max(wl, wr) + w(ui)) / dr_;
                s = (p - 1.0) * std::pow(dmax, p - 2.0);
            }
            best = std::max(best, coef_[i] * s * m * std::pow(ui, m - 1.0));
        }
        return best + H_ + 1e-300;
    }

    void update(RadialField& f, std::size_t hi, double dt) const {
        const double k = h_.coef.k, a = h_.coef.a, q = h_.coef.q;
        switch (h_.kind) {
            case ReactionKind::Monostable:
                return update_with(f, hi, dt, [k](double u) { return k * u * (1.0 - u); });
            case ReactionKind::Bistable:
                return update_with(f, hi, dt, [k, a](double u) { return k * u * (u - a) * (1.0 - u); });
            case ReactionKind::PowerMonostable:
                if (q == 2.0) return update_with(f, hi, dt, [k](double u) { return k * u * u * (1.0 - u); });
                if (q == 6.0)
                    return update_with(f, hi, dt, [k](double u) {
                        double u2 = u * u;
                        return k * u2 * u2 * u2 * (1.0 - u);
                    });
                return update_with(f, hi, dt, [this](double u) { return h(u); });
            default:
                return update_with(f, hi, dt, [this](double u) { return h(u); });
        }
    }

    // m = p = 2: one fused pass per step that also prepares u^2, the rate bound and the active range
    // of the next step.
    template <class Hf>
    std::size_t advance_fast(RadialField& f, double target, double eps_t, Hf hf) const {
        double* __restrict u = f.u.data();
        double* __restrict w = w_.data();
        const double* __restrict A = area_.data();
        const double* __restrict iv = inv_vol_.data();
        const double* __restrict cf = coef_.data();
        std::size_t hi = active_end(f);
        std::fill(w_.begin(), w_.end(), 0.0);
        for (std::size_t i = 0; i < std::min(hi + 1, n_); ++i) w[i + 1] = u[i] * u[i];
        double rate = 0.0;
        for (std::size_t i = 0; i < hi; ++i) rate = std::max(rate, cf[i] * u[i]);
        std::size_t steps = 0;
        while (f.t < target - eps_t) {
            const double dt = std::min(target - f.t, cfl / (2.0 * rate + H_ + 1e-300));
            const double s = dt / dr_;
            double low = 0.0, next_rate = 0.0, w_prev = 0.0;
            std::size_t last = 0;
            bool any = false;
            for (std::size_t i = 0; i < hi; ++i) {
                const double ui = u[i];
                const double div = (A[i + 1] * (w[i + 2] - w[i + 1]) - A[i] * (w[i + 1] - w[i])) * iv[i];
                double v = ui + s * div + dt * hf(ui);
                low = std::min(low, v);
                v = std::max(v, 0.0);
                u[i] = v;
                if (i > 0) w[i] = w_prev;
                w_prev = v * v;
                next_rate = std::max(next_rate, cf[i] * v);
                if (v > 0.0) {
                    last = i;
                    any = true;
                }
            }
            if (hi > 0) w[hi] = w_prev;
            if (low < -1e-14)
                throw NegativityError("undershoot u=" + std::to_string(low) + " at t=" + std::to_string(f.t + dt));
            f.t += dt;
            ++steps;
            rate = next_rate;
            hi = any ? std::min(n_, last + 2) : 1;
        }
        f.t = std::max(f.t, target);
        return steps;
    }

    // w_ holds u^m with one ghost on each side: w_[i+1] belongs to cell i
    template <class Hf>
    void update_with(RadialField& f, std::size_t hi, double dt, Hf hf) const {
        double* __restrict u = f.u.data();
        double* __restrict w = w_.data();
        const double* __restrict A = area_.data();
        const double* __restrict iv = inv_vol_.data();
        const std::size_t top = std::min(hi + 1, n_);
        w[0] = 0.0;
        if (fast_)
            for (std::size_t i = 0; i < top; ++i) w[i + 1] = u[i] * u[i];
        else
            for (std::size_t i = 0; i < top; ++i) w[i + 1] = std::pow(u[i], P_.m);
        w[top + 1] = 0.0;
        double low = 0.0;
        if (fast_ || P_.p == 2.0) {
            const double s = dt / dr_;
            for (std::size_t i = 0; i < hi; ++i) {
                double div = (A[i + 1] * (w[i + 2] - w[i + 1]) - A[i] * (w[i + 1] - w[i])) * iv[i];
                double v = u[i] + s * div + dt * hf(u[i]);
                low = std::min(low, v);
                u[i] = std::max(v, 0.0);
            }
        } else {
            const double e = P_.p - 1.0;
            double Fl = numerics::spow((w[1] - w[0]) / dr_, e);
            for (std::size_t i = 0; i < hi; ++i) {
                double Fr = numerics::spow((w[i + 2] - w[i + 1]) / dr_, e);
                double v = u[i] + dt * ((A[i + 1] * Fr - A[i] * Fl) * iv[i] + hf(u[i]));
                low = std::min(low, v);
                u[i] = std::max(v, 0.0);
                Fl = Fr;
            }
        }
        if (low < -1e-14)
            throw NegativityError("undershoot u=" + std::to_string(low) + " at t=" + std::to_string(f.t + dt));
        f.t += dt;
    }

    Params P_;
    ReactionSpec h_;
    std::size_t n_;
    double dr_;
    Geometry geometry_;
    std::vector<double> area_, inv_vol_, coef_;
    mutable std::vector<double> w_;
    double H_ = 0.0;
    bool fast_ = false;
};

// ---------------------------------------------------------------------------
// fronts and fluxes

struct FrontPosition {
    std::optional<double> eta;
    bool domain_full = false;
};

namespace detail {

inline double pressure(const Params& P, double u) {
    const double ma = P.m - P.alpha;
    return P.m / ma * std::pow(u, ma);
}

}  // namespace detail

/**
 * @brief Right edge of the support, refined by linear extrapolation of the pressure to zero.
 *
 * Cells count as positive above 1e-12. Positive on the whole grid gives eta = right end and domain_full.
 */
inline FrontPosition front_position(const RadialField& f, const Params& P) {
    const double thr = 1e-12;
    FrontPosition out;
    std::size_t n = f.size();
    std::size_t i = n;
    while (i > 0 && !(f.u[i - 1] > thr)) --i;
    if (i == 0) return out;
    std::size_t last = i - 1;
    if (last == n - 1) {
        out.eta = f.x_max();
        out.domain_full = true;
        return out;
    }
    double v1 = detail::pressure(P, f.u[last]);
    double edge = f.r[last] + 0.5 * f.dr;
    if (last > 0) {
        double v0 = detail::pressure(P, f.u[last - 1]);
        if (v0 > v1) edge = f.r[last] + v1 * f.dr / (v0 - v1);
    }
    out.eta = std::min(edge, f.x_max());
    return out;
}

/// Left edge of the support on line grids, mirrored version of front_position.
inline FrontPosition left_front_position(const RadialField& f, const Params& P) {
    const double thr = 1e-12;
    FrontPosition out;
    std::size_t n = f.size();
    std::size_t i = 0;
    while (i < n && !(f.u[i] > thr)) ++i;
    if (i == n) return out;
    if (i == 0) {
        out.eta = f.x_min;
        out.domain_full = true;
        return out;
    }
    double v1 = detail::pressure(P, f.u[i]);
    double edge = f.r[i] - 0.5 * f.dr;
    if (i + 1 < n) {
        double v0 = detail::pressure(P, f.u[i + 1]);
        if (v0 > v1) edge = f.r[i] - v1 * f.dr / (v0 - v1);
    }
    out.eta = std::max(edge, f.x_min);
    return out;
}

struct FluxField {
    std::vector<double> values;  // interfaces 0..n
    double max_abs = 0.0;
};

inline FluxField flux_field(const RadialField& f, const Solver& s) {
    FluxField out;
    out.values = s.interface_fluxes(f);
    for (double v : out.values) out.max_abs = std::max(out.max_abs, std::abs(v));
    return out;
}

// ---------------------------------------------------------------------------
// runs

struct Sampling {
    double dt_sample = 1.0;             // eta, flux and centre value cadence
    std::vector<double> snapshot_times;  // fields kept at these times
    double domain_guard = 0.9;           // stop once the front passes this fraction of the domain
};

struct SimulationRun {
    Params params;
    ReactionSpec reaction;
    Geometry geometry = Geometry::Radial;
    double R = 0.0;
    double dr = 0.0;
    double x_min = 0.0;
    double cfl = 0.8;
    double T = 0.0;
    double t_end = 0.0;
    bool domain_full = false;
    std::size_t steps = 0;
    std::vector<double> times;      // sample times
    std::vector<double> eta;        // right front, NaN while the field is zero
    std::vector<double> eta_left;   // left front on line grids
    std::vector<double> flux_max;   // max |flux| over interfaces
    std::vector<double> u_center;   // u in the first cell (radial) or at the datum centre (line)
    std::vector<double> sup_u;
    std::vector<RadialField> snapshots;
    RadialField initial;
    RadialField final_field;
};

/**
 * @brief Advances the field to time T with automatic steps, recording diagnostics at sample times.
 *
 * Stops early, flagging domain_full, when the front passes domain_guard of the domain.
 * Step errors are rethrown with the failing time.
 */
inline SimulationRun run(RadialField field, const Params& P, const ReactionSpec& h, double T, const Sampling& s = {},
                         double cfl = 0.8) {
    if (!(T > 0.0)) throw GridError("final time must be positive");
    if (!(s.dt_sample > 0.0)) throw GridError("sampling interval must be positive");
    Solver solver(P, h, field);
    solver.cfl = cfl;
    SimulationRun out;
    out.params = P;
    out.reaction = h;
    out.geometry = field.geometry;
    out.R = field.R();
    out.dr = field.dr;
    out.x_min = field.x_min;
    out.cfl = cfl;
    out.T = T;
    out.initial = field;
    std::vector<double> snaps = s.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    const std::size_t centre = field.geometry == Geometry::Radial ? 0 : field.size() / 2;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double guard_right = field.x_min + s.domain_guard * field.R();
    const double guard_left = field.x_max() - s.domain_guard * field.R();

    auto record = [&](const RadialField& f) {
        out.times.push_back(f.t);
        FrontPosition fr = front_position(f, P);
        out.eta.push_back(fr.eta ? *fr.eta : nan);
        if (f.geometry == Geometry::Line) {
            FrontPosition fl = left_front_position(f, P);
            out.eta_left.push_back(fl.eta ? *fl.eta : nan);
        }
        out.flux_max.push_back(flux_field(f, solver).max_abs);
        out.u_center.push_back(f.u[centre]);
        out.sup_u.push_back(f.sup());
        bool full = fr.domain_full || (fr.eta && *fr.eta > guard_right);
        if (f.geometry == Geometry::Line && !out.eta_left.empty() && !std::isnan(out.eta_left.back()))
            full = full || out.eta_left.back() < guard_left;
        return full;
    };
    auto take_snapshots = [&](const RadialField& f) {
        while (next_snap < snaps.size() && snaps[next_snap] <= f.t + 1e-12) {
            out.snapshots.push_back(f);
            out.snapshots.back().t = snaps[next_snap];
            ++next_snap;
        }
    };

    bool full = record(field);
    take_snapshots(field);
    int k = 1;
    while (!full && field.t < T) {
        double target = std::min(T, k * s.dt_sample);
        // snapshots falling before the next sample time are hit exactly
        if (next_snap < snaps.size() && snaps[next_snap] < target && snaps[next_snap] > field.t)
            target = snaps[next_snap];
        try {
            out.steps += solver.advance(field, target);
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " (run failed at t=" + std::to_string(field.t) + ")");
        }
        field.t = target;
        take_snapshots(field);
        if (target >= std::min(T, k * s.dt_sample) - 1e-12) {
            full = record(field);
            ++k;
        }
    }
    out.domain_full = full;
    out.t_end = field.t;
    out.final_field = std::move(field);
    return out;
}

// ---------------------------------------------------------------------------
// envelope

struct Envelope {
    std::vector<double> t;
    std::vector<double> f;
    std::vector<double> g;
    double f0 = 1.0;
    double g0 = 0.0;
    double k = 1.0;
    double c_star = 0.0;
    double delta = 0.0;    // half the negativity window of h'
    double epsilon = 0.0;  // slope of phi_env(f) = -epsilon (f - 1)

    double f_at(double s) const { return 1.0 + (f0 - 1.0) * std::exp(-epsilon * s); }
    double phi_env(double v) const { return -epsilon * (v - 1.0); }
};

/**
 * @brief Solves f' = phi_env(f), g' = c* f^{(p-1)m-1} - k phi_env(f)/f on [0, T].
 *
 * f has the closed form 1 + (f0 - 1) e^{-epsilon t}; g is integrated by Gauss quadrature per sample.
 * WindowError if f0 lies outside (1 - delta, 1 + delta).
 */
inline Envelope envelope(const Params& P, const ReactionSpec& h, double c_star, double f0, double T, double k = 1.0,
                         double g0 = 0.0, std::size_t samples = 1000) {
    Envelope e;
    e.f0 = f0;
    e.g0 = g0;
    e.k = k;
    e.c_star = c_star;
    e.delta = 0.5 * negativity_window(h);
    if (!(f0 > 1.0 - e.delta && f0 < 1.0 + e.delta))
        throw WindowError("f0=" + std::to_string(f0) + " outside (1-delta, 1+delta) with delta=" +
                          std::to_string(e.delta));
    if (!(T > 0.0) || samples < 2) throw WindowError("envelope needs T > 0 and two samples");
    double H = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i) {
        double u = 1.0 - e.delta + 2.0 * e.delta * i / 2000.0;
        H = std::min(H, std::abs(h.derivative(u)));
    }
    e.epsilon = H * std::pow(1.0 - e.delta, (P.p - 1.0) * P.m);
    const double s = (P.p - 1.0) * P.m - 1.0;
    auto gdot = [&](double tt) {
        double fv = e.f_at(tt);
        return c_star * std::pow(fv, s) - k * e.phi_env(fv) / fv;
    };
    using GL = boost::math::quadrature::gauss<double, 15>;
    double g = g0;
    e.t.push_back(0.0);
    e.f.push_back(f0);
    e.g.push_back(g0);
    for (std::size_t j = 1; j < samples; ++j) {
        double a = T * static_cast<double>(j - 1) / static_cast<double>(samples - 1);
        double b = T * static_cast<double>(j) / static_cast<double>(samples - 1);
        g += GL::integrate(gdot, a, b);
        e.t.push_back(b);
        e.f.push_back(e.f_at(b));
        e.g.push_back(g);
    }
    return e;
}

enum class EnvelopeSide { Sub, Super };

struct EnvelopeReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst = 0.0;  // largest ordering violation after the positional shift
    double tolerance = 0.0;  // position
};

/**
 * @brief Compares w = f(t) U_{c*}(x - g(t)) with the run's snapshots.
 *
 * Sub counts points where u lies below w moved back by tol, Super points where u lies above w moved ahead
 * by tol. tol is a distance, default 10 dr.
 * The run is read as a function of x = r on its grid.
 */
inline EnvelopeReport compare_envelope(const SimulationRun& run, const Envelope& env, const WaveProfile& wave,
                                       EnvelopeSide side, std::optional<double> tol = std::nullopt) {
    EnvelopeReport rep;
    rep.tolerance = tol ? *tol : 10.0 * run.dr;
    auto g_at = [&](double tt) {
        auto it = std::lower_bound(env.t.begin(), env.t.end(), tt);
        if (it == env.t.end()) return env.g.back();
        std::size_t j = static_cast<std::size_t>(it - env.t.begin());
        if (j == 0) return env.g.front();
        double th = (tt - env.t[j - 1]) / (env.t[j] - env.t[j - 1]);
        return env.g[j - 1] + th * (env.g[j] - env.g[j - 1]);
    };
    for (const auto& snap : run.snapshots) {
        if (snap.t > env.t.back() + 1e-12) continue;
        double fv = env.f_at(snap.t), gv = g_at(snap.t);
        // the envelope may lead (sub) or lag (super) by tolerance in position
        const double shift = side == EnvelopeSide::Sub ? -rep.tolerance : rep.tolerance;
        for (std::size_t i = 0; i < snap.size(); ++i) {
            double w = fv * wave.U_at(snap.r[i] - gv - shift);
            double d = side == EnvelopeSide::Sub ? w - snap.u[i] : snap.u[i] - w;
            ++rep.samples;
            if (d > 1e-12) ++rep.violations;
            rep.worst = std::max(rep.worst, d);
        }
    }
    return rep;
}

}  // namespace dnlfront
