#include <gtest/gtest.h>

#include <cmath>

#include "dnlfront/numerics.hpp"

using namespace dnlfront::numerics;

namespace {

struct Decay {
    double f(double, double y) const { return -y; }
    double dfdy(double, double) const { return -1.0; }
    double dfdt(double, double) const { return 0.0; }
};

struct Falling {
    // y' = -1 from y(0) = 1 crosses zero at t = 1
    double f(double, double) const { return -1.0; }
    double dfdy(double, double) const { return 0.0; }
    double dfdt(double, double) const { return 0.0; }
};

}  // namespace

TEST(Rosenbrock, ExponentialDecay) {
    OdeOptions o;
    o.rtol = 1e-10;
    Rosenbrock4<Decay> ode(Decay{}, o);
    OdeResult r = ode.integrate(0.0, 1.0, 5.0);
    EXPECT_DOUBLE_EQ(r.nodes.back().t, 5.0);
    EXPECT_NEAR(r.nodes.back().y, std::exp(-5.0), 1e-9);
    Hermite H(r.nodes);
    EXPECT_NEAR(H(2.5), std::exp(-2.5), 1e-7);
    EXPECT_NEAR(H.derivative(2.5), -std::exp(-2.5), 1e-5);
}

TEST(Rosenbrock, SignEventLocated) {
    OdeOptions o;
    o.stop_on_sign_change = true;
    o.h0 = 0.3;
    Rosenbrock4<Falling> ode(Falling{}, o);
    OdeResult r = ode.integrate(0.0, 1.0, 3.0);
    ASSERT_TRUE(r.event);
    EXPECT_NEAR(r.t_event, 1.0, 1e-12);
}

TEST(Rosenbrock, StopPredicate) {
    OdeOptions o;
    o.h_max = 0.01;
    o.stop = [](double t, double) { return t > 1.0; };
    Rosenbrock4<Decay> ode(Decay{}, o);
    OdeResult r = ode.integrate(0.0, 1.0, 5.0);
    EXPECT_TRUE(r.stopped);
    EXPECT_LT(r.nodes.back().t, 1.1);
}

TEST(LeastSquares, RecoversLine) {
    Eigen::MatrixXd X(5, 2);
    Eigen::VectorXd y(5);
    for (int i = 0; i < 5; ++i) {
        X(i, 0) = i;
        X(i, 1) = 1.0;
        y(i) = 3.0 * i - 2.0;
    }
    LsqResult r = least_squares(X, y);
    EXPECT_NEAR(r.coef(0), 3.0, 1e-12);
    EXPECT_NEAR(r.coef(1), -2.0, 1e-12);
    EXPECT_LT(r.residual_rms, 1e-12);
}

TEST(LeastSquares, RankDeficient) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 2);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
    EXPECT_THROW(least_squares(X, y), dnlfront::RankError);
}

TEST(GoldenMax, Parabola) {
    auto [x, v] = golden_max([](double t) { return 1.0 - (t - 0.3) * (t - 0.3); }, 0.0, 1.0);
    EXPECT_NEAR(x, 0.3, 1e-6);
    EXPECT_NEAR(v, 1.0, 1e-12);
}
