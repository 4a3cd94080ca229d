#pragma once

// Small numerical kernels shared by the wave and analysis code:
// a scalar Rosenbrock 4(3) integrator with dense output and sign events,
// cubic Hermite interpolation over integrator nodes, and dense least squares.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "dnlfront/error.hpp"

namespace dnlfront::numerics {

/// Signed power |x|^e * sign(x).
inline double spow(double x, double e) {
    return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

struct OdeNode {
    double t;
    double y;
    double dy;
};

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-300;
    double h0 = 1e-6;
    double h_max = std::numeric_limits<double>::infinity();
    double h_min = 1e-300;
    std::size_t max_steps = 2'000'000;
    bool stop_on_sign_change = false;  // stop when y drops from > 0 to <= 0
    double h_min_rel = 1e-15;           // underflow threshold relative to |t|
    std::function<bool(double, double)> stop;  // checked after each accepted step
};

struct OdeResult {
    std::vector<OdeNode> nodes;
    bool event = false;
    double t_event = 0.0;
    bool stopped = false;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/**
 * @brief Adaptive linearly implicit Rosenbrock 4(3) integrator for a scalar ODE y' = f(t, y).
 *
 * Rhs must provide f(t, y), dfdy(t, y) and dfdt(t, y). The coefficient set is the
 * Hairer-Wanner 4(3) pair with stiffly accurate embedding and a third-order dense output.
 * Integration runs forward in t only.
 */
template <class Rhs>
class Rosenbrock4 {
public:
    Rosenbrock4(const Rhs& rhs, OdeOptions opt) : rhs_(rhs), opt_(opt) {}

    OdeResult integrate(double t0, double y0, double t_end) const {
        OdeResult out;
        double t = t0, y = y0;
        double dy = rhs_.f(t, y);
        if (!std::isfinite(y) || !std::isfinite(dy))
            throw IntegrationError("non-finite initial state");
        out.nodes.push_back({t, y, dy});
        double h = std::min(opt_.h0, t_end - t0);
        while (t < t_end) {
            if (out.accepted + out.rejected >= opt_.max_steps)
                throw IntegrationError("step budget exhausted at t=" + std::to_string(t));
            bool last = false;
            if (t + h >= t_end) {
                h = t_end - t;
                last = true;
            }
            Step s = attempt(t, y, h);
            double err = s.ok ? std::abs(s.err) / (opt_.atol + opt_.rtol * std::max(std::abs(y), std::abs(s.y))) : 1e10;
            if (!s.ok || err > 1.0) {
                ++out.rejected;
                double fac = s.ok ? std::max(0.2, 0.9 * std::pow(err, -0.25)) : 0.25;
                h *= std::min(fac, 0.5);
                if (h < std::max(opt_.h_min, opt_.h_min_rel * std::abs(t)))
                    throw IntegrationError("step size underflow at t=" + std::to_string(t));
                continue;
            }
            ++out.accepted;
            double t_new = last ? t_end : t + h;
            double dy_new = rhs_.f(t_new, s.y);
            if (opt_.stop_on_sign_change && y > 0.0 && s.y <= 0.0) {
                double ts = locate_zero(t, h, s);
                out.nodes.push_back({ts, 0.0, rhs_.f(ts, 0.0)});
                out.event = true;
                out.t_event = ts;
                return out;
            }
            if (!std::isfinite(dy_new)) throw IntegrationError("non-finite slope at t=" + std::to_string(t_new));
            t = t_new;
            y = s.y;
            out.nodes.push_back({t, y, dy_new});
            if (opt_.stop && !last && opt_.stop(t, y)) {
                out.stopped = true;
                return out;
            }
            double fac = std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-12), -0.25)));
            h = std::min(h * fac, opt_.h_max);
        }
        return out;
    }

private:
    struct Step {
        bool ok = false;
        double y = 0.0, err = 0.0, cont3 = 0.0, cont4 = 0.0, y0 = 0.0;
    };

    Step attempt(double t, double y, double h) const {
        // Hairer-Wanner RODAS-type 4(3) coefficients (same set as Boost.Odeint rosenbrock4).
        constexpr double gamma = 0.25;
        constexpr double d1 = 0.25, d2 = -0.1043, d3 = 0.1035, d4 = -0.0362000000000002;
        constexpr double c2 = 0.386, c3 = 0.21, c4 = 0.63;
        constexpr double c21 = -5.6688, a21 = 1.544;
        constexpr double c31 = -2.430093356833875, c32 = -0.2063599157091915;
        constexpr double a31 = 0.9466785280815826, a32 = 0.2557011698983284;
        constexpr double c41 = -0.1073529058151375, c42 = -9.594562251023355, c43 = -20.47028614809616;
        constexpr double a41 = 3.314825187068521, a42 = 2.896124015972201, a43 = 0.9986419139977817;
        constexpr double c51 = 7.496443313967647, c52 = -10.24680431464352, c53 = -33.99990352819905,
                         c54 = 11.70890893206160;
        constexpr double a51 = 1.221224509226641, a52 = 6.019134481288629, a53 = 12.53708332932087,
                         a54 = -0.6878860361058950;
        constexpr double c61 = 8.083246795921522, c62 = -7.981132988064893, c63 = -31.52159432874371,
                         c64 = 16.31930543123136, c65 = -6.058818238834054;
        constexpr double d21 = 10.12623508344586, d22 = -7.487995877610167, d23 = -34.80091861555747,
                         d24 = -7.992771707568823, d25 = 1.025137723295662;
        constexpr double d31 = -0.6762803392801253, d32 = 6.087714651680015, d33 = 16.43084320892478,
                         d34 = 24.76722511418386, d35 = -6.594389125716872;

        Step s;
        s.y0 = y;
        const double J = rhs_.dfdy(t, y);
        const double ft = rhs_.dfdt(t, y);
        const double M = 1.0 / (gamma * h) - J;
        if (!std::isfinite(M) || M == 0.0 || !std::isfinite(ft)) return s;
        auto F = [&](double tt, double yy) { return rhs_.f(tt, yy); };

        const double g1 = (F(t, y) + h * d1 * ft) / M;
        const double g2 = (F(t + c2 * h, y + a21 * g1) + h * d2 * ft + c21 * g1 / h) / M;
        const double g3 = (F(t + c3 * h, y + a31 * g1 + a32 * g2) + h * d3 * ft + (c31 * g1 + c32 * g2) / h) / M;
        const double g4 = (F(t + c4 * h, y + a41 * g1 + a42 * g2 + a43 * g3) + h * d4 * ft +
                           (c41 * g1 + c42 * g2 + c43 * g3) / h) / M;
        const double y5 = y + a51 * g1 + a52 * g2 + a53 * g3 + a54 * g4;
        const double g5 = (F(t + h, y5) + (c51 * g1 + c52 * g2 + c53 * g3 + c54 * g4) / h) / M;
        const double y6 = y5 + g5;
        const double e = (F(t + h, y6) + (c61 * g1 + c62 * g2 + c63 * g3 + c64 * g4 + c65 * g5) / h) / M;
        s.y = y6 + e;
        s.err = e;
        s.cont3 = d21 * g1 + d22 * g2 + d23 * g3 + d24 * g4 + d25 * g5;
        s.cont4 = d31 * g1 + d32 * g2 + d33 * g3 + d34 * g4 + d35 * g5;
        s.ok = std::isfinite(s.y) && std::isfinite(e) && std::isfinite(s.cont3) && std::isfinite(s.cont4);
        return s;
    }

    static double dense(const Step& s, double theta) {
        return s.y0 * (1.0 - theta) + theta * (s.y + (1.0 - theta) * (s.cont3 + theta * s.cont4));
    }

    double locate_zero(double t, double h, const Step& s) const {
        double lo = 0.0, hi = 1.0;
        if (s.y == 0.0) return t + h;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            double mid = 0.5 * (lo + hi);
            if (dense(s, mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return t + hi * h;
    }

    const Rhs& rhs_;
    OdeOptions opt_;
};

/// Cubic Hermite interpolant over nodes with increasing t.
class Hermite {
public:
    Hermite() = default;
    explicit Hermite(std::vector<OdeNode> nodes) : nodes_(std::move(nodes)) {}

    const std::vector<OdeNode>& nodes() const { return nodes_; }
    bool empty() const { return nodes_.empty(); }
    double t_front() const { return nodes_.front().t; }
    double t_back() const { return nodes_.back().t; }

    double operator()(double t) const {
        std::size_t i = segment(t);
        const OdeNode& a = nodes_[i];
        const OdeNode& b = nodes_[i + 1];
        double h = b.t - a.t;
        double s = (t - a.t) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        double h10 = s * (1 - s) * (1 - s);
        double h01 = s * s * (3 - 2 * s);
        double h11 = s * s * (s - 1);
        return h00 * a.y + h10 * h * a.dy + h01 * b.y + h11 * h * b.dy;
    }

    double derivative(double t) const {
        std::size_t i = segment(t);
        const OdeNode& a = nodes_[i];
        const OdeNode& b = nodes_[i + 1];
        double h = b.t - a.t;
        double s = (t - a.t) / h;
        double d00 = 6 * s * s - 6 * s;
        double d10 = 3 * s * s - 4 * s + 1;
        double d01 = -d00;
        double d11 = 3 * s * s - 2 * s;
        return (d00 * a.y + d01 * b.y) / h + d10 * a.dy + d11 * b.dy;
    }

private:
    std::size_t segment(double t) const {
        if (nodes_.size() < 2) throw IntegrationError("interpolant needs two nodes");
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                                   [](double v, const OdeNode& n) { return v < n.t; });
        std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
        return std::min(i, nodes_.size() - 2);
    }

    std::vector<OdeNode> nodes_;
};

struct LsqResult {
    Eigen::VectorXd coef;
    double residual_rms = 0.0;
    double orthogonality = 0.0;  // max |X^T r| relative to max |X^T y|
};

/// Least squares via column-pivoted Householder QR. Throws RankError on rank deficiency.
inline LsqResult least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() < X.cols()) throw RankError("fewer samples than regressors");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-13);
    if (qr.rank() < X.cols()) throw RankError("regressor matrix is rank deficient");
    LsqResult out;
    out.coef = qr.solve(y);
    Eigen::VectorXd r = y - X * out.coef;
    out.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(X.rows()));
    double scale = (X.transpose() * y).cwiseAbs().maxCoeff();
    out.orthogonality = (X.transpose() * r).cwiseAbs().maxCoeff() / std::max(scale, 1e-300);
    return out;
}

/// Maximiser of f on [a, b] by Brent's method; returns (x, f(x)).
inline std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b) {
    auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, a, b, 40);
    return {r.first, -r.second};
}

}  // namespace dnlfront::numerics
