#include <gtest/gtest.h>

#include "dnlfront/model.hpp"

using namespace dnlfront;

TEST(Params, SlowDiffusionRegimeOnly) {
    EXPECT_NO_THROW(validate_params(2.0, 2.0, 1));
    EXPECT_NO_THROW(validate_params(1.5, 3.0, 3));
    EXPECT_NO_THROW(validate_params(0.75, 3.0, 1));
    EXPECT_THROW(validate_params(2.0, 1.5, 1), RegimeError);
    EXPECT_THROW(validate_params(1.0, 2.0, 1), RegimeError);
    EXPECT_THROW(validate_params(2.0, 2.0, 0), DimensionError);
}

TEST(Params, DerivedExponents) {
    Params P = validate_params(2.0, 3.0, 2);
    EXPECT_DOUBLE_EQ(P.alpha, 0.5);
    EXPECT_DOUBLE_EQ(P.pressure_exponent(), 1.5);
}

TEST(Reaction, LogisticValuesAndDerivative) {
    ReactionSpec h = make_reaction(ReactionKind::Monostable, {0.0, 4.0, 1.0});
    EXPECT_DOUBLE_EQ(h(0.5), 1.0);
    EXPECT_DOUBLE_EQ(h.derivative(0.0), 4.0);
    EXPECT_DOUBLE_EQ(h.derivative(1.0), -4.0);
}

TEST(Reaction, SignPatternRejected) {
    EXPECT_THROW(make_reaction(ReactionKind::Bistable, {1.2, 1.0, 1.0}), SignPatternError);
    EXPECT_THROW(make_reaction(ReactionKind::Monostable, {0.0, -1.0, 1.0}), SignPatternError);
    EXPECT_THROW(make_custom_reaction([](double u) { return -u * (1.0 - u); }, [](double u) { return 2.0 * u - 1.0; }),
                 SignPatternError);
}

TEST(Reaction, PositiveSpeedCondition) {
    Params P = validate_params(2.0, 2.0, 1);
    // for m = 2 the weighted integral of u(u-a)(1-u) u changes sign at a = 3/5
    EXPECT_NO_THROW(make_reaction(ReactionKind::Bistable, {0.3, 1.0, 1.0}, P));
    EXPECT_THROW(make_reaction(ReactionKind::Bistable, {0.7, 1.0, 1.0}, P), SignPatternError);
    EXPECT_NEAR(sign_integral(make_reaction(ReactionKind::Bistable, {0.3, 1.0, 1.0}), P), 0.025, 1e-12);
    // integral of u (u - 1/4)(1 - u) u over [0,1]
    EXPECT_NEAR(sign_integral(make_reaction(ReactionKind::Bistable, {0.25, 1.0, 1.0}), P), 7.0 / 240.0, 1e-12);
}

TEST(Reaction, Stats) {
    ReactionSpec h = make_reaction(ReactionKind::Monostable);
    EXPECT_DOUBLE_EQ(sigma0(h), 1.0);
    EXPECT_NEAR(h_sup(h, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(h_sup(h, 2.0), 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(negativity_window(h), 0.499);
    EXPECT_NEAR(negativity_window(make_reaction(ReactionKind::Bistable, {0.3, 1.0, 1.0})), 0.27, 1e-12);
}

TEST(Reaction, KindStrings) {
    for (auto k : {ReactionKind::Monostable, ReactionKind::Bistable, ReactionKind::Combustion, ReactionKind::PowerMonostable})
        EXPECT_EQ(reaction_kind_from_string(to_string(k)), k);
    EXPECT_THROW(reaction_kind_from_string("cubic"), ParseError);
}
