#include "depthlab/parallel.hpp"
#include "depthlab/runner.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

using namespace depthlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("depthlab_runner_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunOptions in_dir(const fs::path& p) {
    RunOptions o;
    o.out_dir = p.string();
    o.read_env = false;
    return o;
}

const char* kSquareDepth = R"({
  "measure": {"points": [[1,0],[-1,0],[0,1],[0,-1]]},
  "depth": {"queries": [[0,0],[5,5]], "expected": [0.5, 0.0]}
})";

}  // namespace

TEST(Csv, FormatDouble) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(-0.0), "0");
    EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_double(1e-20), "1e-20");
    EXPECT_EQ(csv_header(), "suite,check,instance,d,n,seed,expected,observed,slack,pass\n");
}

TEST(Csv, RowChecksAndQuoting) {
    Row r;
    r.suite = "s";
    r.check = "c";
    r.instance = "a,b";
    Report rep;
    rep.rows.push_back(at_least(r, 0.5, 0.5 - 1e-13));
    rep.rows.push_back(strictly_above(r, 0.5, 0.5));
    EXPECT_TRUE(rep.rows[0].pass);
    EXPECT_FALSE(rep.rows[1].pass);
    std::string csv = to_csv(rep);
    EXPECT_NE(csv.find("s,c,\"a,b\",0,0,0,0.5,"), std::string::npos);
    EXPECT_NE(csv.find(",true\n"), std::string::npos);
    EXPECT_NE(csv.find(",false\n"), std::string::npos);
}

TEST(Runner, DepthOnSquare) {
    auto dir = scratch("square");
    auto out = run_experiment_text("depth", kSquareDepth, dir.string(), in_dir(dir));
    EXPECT_EQ(out.exit_code, kExitPass) << out.message;
    std::string csv = slurp(out.csv_path);
    EXPECT_EQ(csv.rfind(csv_header(), 0), 0u);
    EXPECT_NE(csv.find(",0.5,0.5,1e-12,true"), std::string::npos) << csv;
    auto s = nlohmann::json::parse(slurp(out.summary_path));
    EXPECT_EQ(s["command"], "depth");
    EXPECT_EQ(s["failures"], 0);
    EXPECT_EQ(s["exit_code"], 0);
}

TEST(Runner, WrongExpectationFails) {
    auto dir = scratch("wrong");
    std::string cfg = kSquareDepth;
    cfg.replace(cfg.find("0.5, 0.0"), 8, "0.4, 0.0");
    auto out = run_experiment_text("depth", cfg, dir.string(), in_dir(dir));
    EXPECT_EQ(out.exit_code, kExitCheckFailed);
    EXPECT_NE(slurp(out.csv_path).find(",false"), std::string::npos);
}

TEST(Runner, UnknownCommand) {
    auto out = run_experiment("foo", "/nonexistent/config.json");
    EXPECT_EQ(out.exit_code, kExitUsage);
    EXPECT_NE(out.message.find("unknown command 'foo'"), std::string::npos);
    EXPECT_NE(out.message.find("generate, depth, median, line-search, landscape, verify, bench"), std::string::npos);
}

TEST(Runner, FieldPathErrors) {
    auto dir = scratch("paths");
    auto o = in_dir(dir);
    auto a = run_experiment_text("depth", R"({"measure": {"dimm": 2}, "depth": {"queries": [[0,0]]}})", ".", o);
    EXPECT_EQ(a.exit_code, kExitUsage);
    EXPECT_NE(a.message.find("config.measure.dimm: unknown field"), std::string::npos) << a.message;
    auto b = run_experiment_text("depth", R"({"measure": {"points": [[0,0],[1,"x"]]}, "depth": {"queries": [[0,0]]}})",
                                 ".", o);
    EXPECT_EQ(b.exit_code, kExitUsage);
    EXPECT_NE(b.message.find("config.measure.points[1][1]"), std::string::npos) << b.message;
    auto c = run_experiment_text("depth", "{ not json", ".", o);
    EXPECT_EQ(c.exit_code, kExitUsage);
    auto d = run_experiment("median", (dir / "missing.json").string(), o);
    EXPECT_EQ(d.exit_code, kExitUsage);
}

TEST(Runner, SeedPrecedence) {
    auto dir = scratch("seed");
    const char* cfg = R"({"seed": 5, "measure": {"kind": "gaussian", "dim": 2, "n": 10}})";
    auto seed_of = [&](const RunOptions& o) {
        auto out = run_experiment_text("generate", cfg, dir.string(), o);
        EXPECT_EQ(out.exit_code, kExitPass) << out.message;
        return nlohmann::json::parse(slurp(out.summary_path))["seed"].get<std::uint64_t>();
    };
    RunOptions o = in_dir(dir);
    EXPECT_EQ(seed_of(o), 5u);
    ::setenv("DEPTHLAB_SEED", "77", 1);
    o.read_env = true;
    EXPECT_EQ(seed_of(o), 77u);
    o.seed = 9;
    EXPECT_EQ(seed_of(o), 9u);
    ::setenv("DEPTHLAB_SEED", "banana", 1);
    o.seed.reset();
    EXPECT_EQ(run_experiment_text("generate", cfg, dir.string(), o).exit_code, kExitUsage);
    ::unsetenv("DEPTHLAB_SEED");
}

TEST(Runner, ByteIdenticalAndThreadInvariant) {
    const char* cfg = R"({"seed": 3, "verify": {"suites": ["bmes", "bijection"], "instances": 3}})";
    auto d1 = scratch("rep1"), d2 = scratch("rep2"), d3 = scratch("rep3");
    auto o1 = in_dir(d1), o2 = in_dir(d2), o3 = in_dir(d3);
    o3.threads = 4;
    auto a = run_experiment_text("verify", cfg, ".", o1);
    auto b = run_experiment_text("verify", cfg, ".", o2);
    auto c = run_experiment_text("verify", cfg, ".", o3);
    ASSERT_EQ(a.exit_code, kExitPass) << a.message;
    EXPECT_EQ(slurp(a.csv_path), slurp(b.csv_path));
    EXPECT_EQ(slurp(a.csv_path), slurp(c.csv_path));
}

TEST(Runner, CorruptedEpsilonFails) {
    auto dir = scratch("eps");
    auto out = run_experiment_text("verify", R"({"verify": {"suite": "bmes", "instances": 2, "eps": 0.5}})", ".",
                                   in_dir(dir));
    EXPECT_EQ(out.exit_code, kExitCheckFailed) << out.message;
    EXPECT_NE(slurp(out.csv_path).find("epsilon_precondition"), std::string::npos);
    auto bij = run_experiment_text("verify", R"({"verify": {"suite": "bijection", "instances": 2, "eps": 0.5}})",
                                   ".", in_dir(dir));
    EXPECT_EQ(bij.exit_code, kExitCheckFailed);
    auto unknown = run_experiment_text("verify", R"({"verify": {"suite": "nope"}})", ".", in_dir(dir));
    EXPECT_EQ(unknown.exit_code, kExitUsage);
}

TEST(Parallel, OrderAndLowestException) {
    for (int threads : {1, 3, 8}) {
        auto v = parallel_map(100, threads, [](size_t i) { return static_cast<int>(i * i); });
        ASSERT_EQ(v.size(), 100u);
        for (size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
        try {
            parallel_map(50, threads, [](size_t i) -> int {
                if (i == 17 || i == 40) throw std::runtime_error(std::to_string(i));
                return 0;
            });
            FAIL() << "no exception";
        } catch (const std::runtime_error& e) {
            EXPECT_STREQ(e.what(), "17");
        }
    }
}

TEST(Parallel, DerivedSeeds) {
    EXPECT_EQ(derive_seed(1, "rado", 3), derive_seed(1, "rado", 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t base : {0ull, 1ull, 2ull})
        for (const char* tag : {"rado", "bmes", "tmap"})
            for (size_t i = 0; i < 20; ++i) seen.insert(derive_seed(base, tag, i));
    EXPECT_EQ(seen.size(), 180u);
}

TEST(Suites, RadoPlanarFiftySeeds) {
    SuiteParams p;
    p.dims = {2};
    auto rep = rado_suite(p);
    EXPECT_EQ(rep.failures(), 0);
    size_t depth_rows = 0;
    for (const auto& r : rep.rows)
        if (r.check == "median_depth") ++depth_rows;
    EXPECT_EQ(depth_rows, 50u);
}

TEST(Suites, TheoremOneThreshold) {
    SuiteParams p;
    p.instances = 1;
    p.grid_count = 40;
    p.refine_top = 1;
    auto rep = theorem1_suite(p);
    bool seen = false;
    for (const auto& r : rep.rows)
        if (r.check == "line_depth_improved") {
            seen = true;
            EXPECT_NEAR(r.expected, 1.0 / 3.0 + 1.0 / 81.0 - 0.02, 1e-15);
            EXPECT_FALSE(r.gating);
        }
    EXPECT_TRUE(seen);
}

TEST(Suites, Names) {
    for (const auto& s : suite_names()) EXPECT_TRUE(is_suite(s));
    EXPECT_FALSE(is_suite("nope"));
}
