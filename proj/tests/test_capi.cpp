#include "depthlab/depthlab.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

dl_measure* square() {
    const double pts[] = {1, 0, -1, 0, 0, 1, 0, -1};
    dl_measure* m = nullptr;
    EXPECT_EQ(dl_measure_create(2, 4, pts, nullptr, &m), DL_OK);
    return m;
}

}  // namespace

TEST(CApi, VersionAndNames) {
    EXPECT_GT(std::strlen(dl_version()), 0u);
    EXPECT_STREQ(dl_status_name(DL_OK), "ok");
    EXPECT_STREQ(dl_command_names(), "generate,depth,median,line-search,landscape,verify,bench");
}

TEST(CApi, MeasureLifecycle) {
    dl_measure* m = square();
    ASSERT_NE(m, nullptr);
    EXPECT_EQ(dl_measure_dim(m), 2);
    EXPECT_EQ(dl_measure_size(m), 4u);
    double p[2], w;
    EXPECT_EQ(dl_measure_point(m, 2, p, &w), DL_OK);
    EXPECT_EQ(p[0], 0.0);
    EXPECT_EQ(p[1], 1.0);
    EXPECT_DOUBLE_EQ(w, 0.25);
    EXPECT_EQ(dl_measure_point(m, 9, p, &w), DL_ERR_INVALID_ARGUMENT);
    EXPECT_NE(std::string(dl_last_error()).find("out of range"), std::string::npos);

    auto path = (fs::temp_directory_path() / "depthlab_capi_square.json").string();
    EXPECT_EQ(dl_measure_save(m, path.c_str()), DL_OK);
    dl_measure* back = nullptr;
    EXPECT_EQ(dl_measure_load(path.c_str(), &back), DL_OK);
    EXPECT_EQ(dl_measure_size(back), 4u);
    dl_measure_free(back);
    dl_measure_free(m);
    dl_measure_free(nullptr);

    EXPECT_EQ(dl_measure_load("/nonexistent/m.json", &back), DL_ERR_IO);
    EXPECT_EQ(dl_measure_create(2, 4, nullptr, nullptr, &back), DL_ERR_INVALID_ARGUMENT);
    const double neg[] = {0, 0, 1, 1};
    const double bad_w[] = {1, -1};
    EXPECT_EQ(dl_measure_create(2, 2, neg, bad_w, &back), DL_ERR_INVALID_ARGUMENT);
}

TEST(CApi, Depths) {
    dl_measure* m = square();
    const double o[] = {0, 0};
    double depth = -1, wit[2];
    EXPECT_EQ(dl_point_depth(m, o, DL_DEPTH_EXACT, 0, 0, &depth, wit), DL_OK);
    EXPECT_DOUBLE_EQ(depth, 0.5);
    EXPECT_NEAR(std::hypot(wit[0], wit[1]), 1.0, 1e-12);
    EXPECT_EQ(dl_point_depth(m, o, DL_DEPTH_ORACLE, 0, 0, &depth, nullptr), DL_OK);
    EXPECT_DOUBLE_EQ(depth, 0.5);
    EXPECT_EQ(dl_point_depth(m, o, DL_DEPTH_SAMPLED, 500, 3, &depth, nullptr), DL_OK);
    EXPECT_GE(depth, 0.5);

    const double base[] = {0, 0}, basis[] = {0, 1};
    EXPECT_EQ(dl_flat_depth(m, base, basis, 1, &depth), DL_OK);
    EXPECT_DOUBLE_EQ(depth, 0.75);  // (0, +-1) project onto the query point
    EXPECT_EQ(dl_flat_depth(m, base, basis, 2, &depth), DL_ERR_INVALID_ARGUMENT);

    double med[2];
    EXPECT_EQ(dl_tukey_median(m, DL_MEDIAN_ARRANGEMENT, 0, med, &depth), DL_OK);
    EXPECT_DOUBLE_EQ(depth, 0.5);
    EXPECT_NEAR(std::hypot(med[0], med[1]), 0.0, 1e-9);
    dl_measure_free(m);
}

TEST(CApi, DimensionAndLimitErrors) {
    dl_measure* m = nullptr;
    ASSERT_EQ(dl_measure_generate("gaussian", 6, 30, 1, 0, &m), DL_OK);
    std::vector<double> q(6, 0.0);
    double depth;
    EXPECT_EQ(dl_point_depth(m, q.data(), DL_DEPTH_EXACT, 0, 0, &depth, nullptr), DL_ERR_LIMIT);
    EXPECT_EQ(dl_point_depth(m, q.data(), DL_DEPTH_SAMPLED, 200, 0, &depth, nullptr), DL_OK);
    dl_measure_free(m);
    EXPECT_EQ(dl_measure_generate("pyramid", 2, 10, 1, 0, &m), DL_ERR_INVALID_ARGUMENT);
}

TEST(CApi, WitnessAndPreconditions) {
    dl_measure* m = nullptr;
    const double tri[] = {1, 0, -0.5, std::sqrt(3.0) / 2, -0.5, -std::sqrt(3.0) / 2};
    ASSERT_EQ(dl_measure_create(2, 3, tri, nullptr, &m), DL_OK);
    const double o[] = {0, 0};
    double normals[6], margin = 0;
    EXPECT_EQ(dl_witness_tuple(m, o, 1e-9, normals, &margin), DL_OK);
    EXPECT_GT(margin, 0.0);
    const double far[] = {4, 4};
    EXPECT_EQ(dl_witness_tuple(m, far, 1e-9, normals, &margin), DL_ERR_PRECONDITION);
    double vec[6];
    EXPECT_EQ(dl_structural_map(m, 0.9, 100, 1, vec, &margin), DL_ERR_INVALID_ARGUMENT);
    dl_measure_free(m);
}

TEST(CApi, LineSearch) {
    dl_measure* m = nullptr;
    ASSERT_EQ(dl_measure_generate("uniform_ball", 3, 120, 5, 0, &m), DL_OK);
    double dir[3], anchor[3], depth = 0;
    EXPECT_EQ(dl_deep_line_search(m, 40, 1, dir, anchor, &depth), DL_OK);
    EXPECT_GT(depth, 1.0 / 3.0);
    EXPECT_NEAR(std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]), 1.0, 1e-12);
    dl_measure_free(m);
}

TEST(CApi, RunExperiment) {
    auto dir = fs::temp_directory_path() / "depthlab_capi_run";
    fs::create_directories(dir);
    auto cfg = (dir / "cfg.json").string();
    {
        std::ofstream f(cfg);
        f << R"({"measure": {"points": [[1,0],[-1,0],[0,1],[0,-1]]}, "depth": {"queries": [[0,0]], "expected": [0.5]}})";
    }
    dl_run_options opt{};
    auto out = (dir / "out").string();
    opt.out_dir = out.c_str();
    int code = -1;
    char msg[256];
    EXPECT_EQ(dl_run_experiment("depth", cfg.c_str(), &opt, &code, msg, sizeof msg), DL_OK);
    EXPECT_EQ(code, 0) << msg;
    EXPECT_TRUE(fs::exists(dir / "out" / "depth.csv"));
    EXPECT_EQ(dl_run_experiment("foo", cfg.c_str(), &opt, &code, msg, sizeof msg), DL_OK);
    EXPECT_EQ(code, 2);
    char tiny[8];
    EXPECT_EQ(dl_run_experiment("foo", cfg.c_str(), &opt, &code, tiny, sizeof tiny), DL_OK);
    EXPECT_EQ(std::strlen(tiny), 7u);
    EXPECT_EQ(dl_run_experiment(nullptr, cfg.c_str(), &opt, &code, msg, sizeof msg), DL_ERR_INVALID_ARGUMENT);
}
