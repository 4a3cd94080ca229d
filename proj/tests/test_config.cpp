#include <gtest/gtest.h>

#include "dnlfront/config.hpp"

using namespace dnlfront;

TEST(Config, MinimalFileGetsDefaults) {
    RunConfig c = parse_config_text("[model]\nm = 2\n");
    EXPECT_DOUBLE_EQ(c.model.p, 2.0);
    EXPECT_EQ(c.model.reaction, "logistic");
    EXPECT_DOUBLE_EQ(c.sim.dr, 0.02);
    EXPECT_EQ(c.output_dir, "out");
    EXPECT_TRUE(c.has("model"));
    EXPECT_FALSE(c.has("sim"));
}

TEST(Config, ReactionKeys) {
    RunConfig c = parse_config_text("[model]\nreaction.kind = bistable\nreaction.a = 0.3\nreaction.k = 2\n");
    EXPECT_EQ(c.model.reaction, "bistable");
    EXPECT_DOUBLE_EQ(c.model.a, 0.3);
    EXPECT_DOUBLE_EQ(c.model.k, 2.0);
}

TEST(Config, RoundTrip) {
    RunConfig c = parse_config_text(
        "# comment\n[model]\np = 3\nN = 2\n[wave]\ngamma_grid = 0, 0.05\n[sim]\nsnapshot_times = 1, 2.5\n"
        "[sweep]\ncommand = wave\nmodel.m = 2, 3\n");
    std::string text = serialize_config(c);
    RunConfig d = parse_config_text(text);
    EXPECT_EQ(serialize_config(d), text);
    EXPECT_EQ(config_hash(c), config_hash(d));
    ASSERT_EQ(d.sweep.axes.size(), 1u);
    EXPECT_EQ(d.sweep.axes[0].second, (std::vector<std::string>{"2", "3"}));
}

TEST(Config, HashFrozen) {
    EXPECT_EQ(config_hash(parse_config_text("[model]\nm = 2\n")), "dce466b15b3783b4b5e507f72f79ca900e92b646");
}

TEST(Config, DuplicateKeyNamesLine) {
    try {
        parse_config_text("[model]\nm = 2\n\nm = 3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
    }
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config_text("[model]\nmm = 2\n"), UnknownKeyError);
    EXPECT_THROW(parse_config_text("[modle]\nm = 2\n"), UnknownKeyError);
    EXPECT_THROW(parse_config_text("[wave]\ntol = 1e-9\n"), MissingSectionError);
    EXPECT_THROW(parse_config_text("[model]\nm 2\n"), ParseError);
    EXPECT_THROW(parse_config_text("[model]\nm = two\n"), ParseError);
    EXPECT_THROW(parse_config_text("m = 2\n"), ParseError);
    EXPECT_THROW(parse_config_text("[model]\n[model]\n"), ParseError);
    EXPECT_THROW(parse_config_text("[model]\np = 1.5\n"), RegimeError);
    EXPECT_THROW(parse_config_text("[model]\n[sim]\ndatum = blob\n"), ParseError);
    EXPECT_THROW(parse_config_text("[model]\n[sweep]\nmodel.zz = 1, 2\n"), UnknownKeyError);
    EXPECT_THROW(parse_config(std::string("/nonexistent/x.cfg")), ParseError);
}

TEST(Config, Override) {
    RunConfig c = parse_config_text("[model]\n");
    apply_override(c, "sim.T", "12.5");
    apply_override(c, "model.reaction.kind", "power");
    EXPECT_DOUBLE_EQ(c.sim.T, 12.5);
    EXPECT_EQ(c.model.reaction, "power");
    EXPECT_THROW(apply_override(c, "sim.nope", "1"), UnknownKeyError);
}
