#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnlfront/cli.hpp"

using namespace dnlfront;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("dnlfront_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    fs::path p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int invoke(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    args.insert(args.begin(), "dnlfront");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream o, e;
    int rc = cli::main(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return rc;
}

const char* kSmallSim =
    "[model]\nm = 2\np = 2\nN = 1\n[sim]\ndatum = kanel\ndelta = 0.5\nwidth = 2\nR = 10\ndr = 0.05\nT = 2\n"
    "dt_sample = 0.25\nsnapshot_times = 1, 2\n";

}  // namespace

TEST(Cli, WaveProfileStartsAtFront) {
    fs::path dir = scratch_dir("wave");
    fs::path cfg = write_config(dir, "[model]\nm = 2\np = 2\n");
    ASSERT_EQ(invoke({"wave", "--config", cfg.string(), "--out", (dir / "o").string()}), 0);
    std::istringstream rows(slurp(dir / "o" / "profile.csv"));
    std::string header, first;
    std::getline(rows, header);
    std::getline(rows, first);
    EXPECT_EQ(header, "xi,U,V,Vp");
    EXPECT_EQ(first.substr(0, 4), "0,0,");
    EXPECT_TRUE(fs::exists(dir / "o" / "trajectory.csv"));
    std::string meta = slurp(dir / "o" / "meta.txt");
    EXPECT_NE(meta.find("tool = dnlfront"), std::string::npos);
    EXPECT_NE(meta.find("config_hash = "), std::string::npos);
    EXPECT_NE(meta.find("[model]"), std::string::npos);
}

TEST(Cli, SimulateIsDeterministic) {
    fs::path dir = scratch_dir("determinism");
    fs::path cfg = write_config(dir, kSmallSim);
    ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", (dir / "a").string()}), 0);
    ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", (dir / "b").string()}), 0);
    for (const char* f : {"front.csv", "fluxmax.csv", "snapshot_1.csv", "snapshot_2.csv", "meta.txt"}) {
        ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
}

TEST(Cli, AnalyzeWritesReports) {
    fs::path dir = scratch_dir("analyze");
    std::string text = kSmallSim;
    text.replace(text.find("T = 2"), 5, "T = 4");
    fs::path cfg = write_config(dir, text + "[analyze]\nwindow_fraction = 1\n");
    ASSERT_EQ(invoke({"analyze", "--config", cfg.string(), "--out", (dir / "o").string()}), 0);
    for (const char* f : {"frontfit.csv", "convergence.csv", "audit.csv", "summary.txt"})
        EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
    EXPECT_NE(slurp(dir / "o" / "audit.csv").find("config_hash,"), std::string::npos);
}

TEST(Cli, SweepOneDirectoryPerPoint) {
    fs::path dir = scratch_dir("sweep");
    fs::path cfg = write_config(dir, std::string(kSmallSim) + "[sweep]\ncommand = simulate\nsim.T = 1, 2\nmodel.N = 1, 2\n");
    ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir / "o").string(), "--jobs", "2"}), 0);
    for (const char* p : {"point_000", "point_001", "point_002", "point_003"})
        EXPECT_TRUE(fs::exists(dir / "o" / p / "front.csv")) << p;
    std::string table = slurp(dir / "o" / "sweep.csv");
    EXPECT_NE(table.find("point,config_hash,sim.T,model.N,status"), std::string::npos);
    EXPECT_NE(table.find("point_003"), std::string::npos);
}

TEST(Cli, OutputRootPrecedence) {
    RunConfig c = parse_config_text("[model]\n[output]\ndir = from_config\n");
    ::unsetenv("DNLFRONT_OUT");
    EXPECT_EQ(cli::output_root(c, std::nullopt), fs::path("from_config"));
    ::setenv("DNLFRONT_OUT", "from_env", 1);
    EXPECT_EQ(cli::output_root(c, std::nullopt), fs::path("from_env"));
    EXPECT_EQ(cli::output_root(c, std::string("from_flag")), fs::path("from_flag"));
    ::unsetenv("DNLFRONT_OUT");
}

TEST(Cli, UsageErrors) {
    std::string err;
    EXPECT_EQ(invoke({"bogus"}, nullptr, &err), 2);
    EXPECT_EQ(err.rfind("ERROR usage", 0), 0u);
    EXPECT_EQ(invoke({"wave"}, nullptr, &err), 2);
    EXPECT_EQ(err.rfind("ERROR usage", 0), 0u);
    EXPECT_EQ(invoke({"wave", "--config", "/nonexistent.cfg"}, nullptr, &err), 2);
    EXPECT_EQ(err.rfind("ERROR parse", 0), 0u);
}

TEST(Cli, ComputationalFailureExitsOne) {
    fs::path dir = scratch_dir("fail");
    // datum wider than the domain
    fs::path cfg = write_config(dir, "[model]\n[sim]\ndatum = kanel\nwidth = 20\nR = 5\nT = 1\n");
    std::string err;
    EXPECT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", (dir / "o").string()}, nullptr, &err), 1);
    EXPECT_EQ(err.rfind("ERROR grid", 0), 0u);
}

TEST(Cli, VerifySubset) {
    std::string out;
    EXPECT_EQ(invoke({"verify", "--criteria", "1,3"}, &out), 0);
    EXPECT_NE(out.find("CRITERION 1 PASS"), std::string::npos);
    EXPECT_NE(out.find("CRITERION 3 PASS"), std::string::npos);
    EXPECT_EQ(out.find("CRITERION 2 "), std::string::npos);
    EXPECT_EQ(invoke({"verify", "--criteria", "14"}), 2);
}
