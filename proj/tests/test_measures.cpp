#include "depthlab/structure.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace depthlab;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

DiscreteMeasure square() { return make_measure({v2(1, 0), v2(-1, 0), v2(0, 1), v2(0, -1)}, {1, 1, 1, 1}); }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("depthlab_test_" + name)).string();
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(MakeMeasure, Normalizes) {
    auto m = make_measure({v2(0, 0), v2(1, 0), v2(0, 1)}, {1, 1, 1});
    for (double w : m.weights()) EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
}

TEST(MakeMeasure, DropsZeroWeights) {
    auto m = make_measure({v2(0, 0), v2(1, 0), v2(0, 1)}, {0, 2, 2});
    ASSERT_EQ(m.size(), 2u);
    EXPECT_DOUBLE_EQ(m.weight(0), 0.5);
    EXPECT_EQ(m.point(0), v2(1, 0));
}

TEST(MakeMeasure, Errors) {
    EXPECT_THROW(make_measure({v2(0, 0), v2(1, 0)}, {-1, 1}), Error);
    EXPECT_THROW(make_measure({}, {}), Error);
    EXPECT_THROW(make_measure({v2(0, 0), v3(1, 0, 0)}, {1, 1}), Error);
    EXPECT_THROW(make_measure({v2(0, 0)}, {0}), Error);
}

TEST(GenerateMeasure, SimplexMixtureClusterMasses) {
    MeasureSpec s;
    s.kind = MeasureKind::SimplexMixture;
    s.dim = 2;
    s.n = 300;
    s.seed = 1;
    s.params["sigma"] = 0.01;
    auto m = generate_measure(s);
    auto verts = simplex_vertices(2);
    std::vector<double> mass(3, 0.0);
    for (size_t i = 0; i < m.size(); ++i) {
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if ((m.point(i) - verts[k]).norm() < (m.point(i) - verts[best]).norm()) best = k;
        mass[best] += m.weight(i);
    }
    for (double x : mass) EXPECT_NEAR(x, 1.0 / 3.0, 0.1);
}

TEST(GenerateMeasure, SimplexVerticesAreRegular) {
    for (int d = 1; d <= 6; ++d) {
        auto v = simplex_vertices(d);
        ASSERT_EQ(static_cast<int>(v.size()), d + 1);
        Vec c = Vec::Zero(d);
        for (auto& x : v) {
            EXPECT_NEAR(x.norm(), 1.0, 1e-12);
            c += x;
        }
        EXPECT_NEAR(c.norm(), 0.0, 1e-12);
        for (int i = 1; i <= d; ++i) EXPECT_NEAR(v[0].dot(v[i]), -1.0 / d, 1e-12);
    }
}

TEST(GenerateMeasure, PointMassesEchoMakeMeasure) {
    MeasureSpec s;
    s.kind = MeasureKind::PointMasses;
    s.points = {v2(0, 0), v2(2, 0)};
    s.weights = {1, 3};
    auto m = generate_measure(s);
    auto ref = make_measure(s.points, s.weights);
    ASSERT_EQ(m.size(), ref.size());
    for (size_t i = 0; i < m.size(); ++i) {
        EXPECT_EQ(m.point(i), ref.point(i));
        EXPECT_EQ(m.weight(i), ref.weight(i));
    }
}

TEST(GenerateMeasure, UniformBallMean) {
    MeasureSpec s;
    s.kind = MeasureKind::UniformBall;
    s.dim = 3;
    s.n = 2000;
    s.seed = 2;
    auto m = generate_measure(s);
    EXPECT_LT(m.mean().norm(), 0.1);
    for (auto& p : m.points()) EXPECT_LE(p.norm(), 1.0 + 1e-12);
}

TEST(GenerateMeasure, PureFunctionOfSpec) {
    for (auto kind : {MeasureKind::SimplexMixture, MeasureKind::Gaussian, MeasureKind::UniformBall,
                      MeasureKind::CrossPolytope}) {
        MeasureSpec s;
        s.kind = kind;
        s.dim = 3;
        s.n = 64;
        s.seed = 77;
        auto a = generate_measure(s), b = generate_measure(s);
        ASSERT_EQ(a.size(), b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a.point(i), b.point(i));
            EXPECT_EQ(a.weight(i), b.weight(i));
        }
    }
}

TEST(GenerateMeasure, Errors) {
    EXPECT_THROW(parse_measure_kind("banana"), Error);
    MeasureSpec s;
    s.kind = MeasureKind::SimplexMixture;
    s.params["sigma"] = -1.0;
    EXPECT_THROW(generate_measure(s), Error);
    s.params["sigma"] = 0.1;
    s.n = 0;
    EXPECT_THROW(generate_measure(s), Error);
}

TEST(ProjectMeasure, DropsZAndKeepsWeights) {
    auto m = make_measure({v3(1, 2, 3), v3(-1, 0, 7)}, {1, 3});
    Flat z(Vec::Zero(3), {v3(0, 0, 1)});
    auto p = project_measure(m, z);
    ASSERT_EQ(p.dim(), 2);
    EXPECT_NEAR((p.point(0) - v2(1, 2)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((p.point(1) - v2(-1, 0)).norm(), 0.0, 1e-15);
    EXPECT_EQ(p.weights(), m.weights());
    double total = 0.0;
    for (double w : p.weights()) total += w;
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ProjectMeasure, CompositionAlongNestedFlats) {
    // Projecting along a line beta and then along a line inside the image equals projecting along
    // the plane spanned by both directions, up to an isometry of the final coordinates; distances agree.
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    MeasureSpec s;
    s.kind = MeasureKind::Gaussian;
    s.dim = 4;
    s.n = 40;
    s.seed = 9;
    auto m = generate_measure(s);
    for (int trial = 0; trial < 20; ++trial) {
        Vec b1(4);
        for (int i = 0; i < 4; ++i) b1[i] = g(rng);
        b1.normalize();
        Flat beta(Vec::Zero(4), {b1});
        Mat C = complement_basis(beta);
        auto m1 = project_measure(m, beta);
        Vec l(3);
        for (int i = 0; i < 3; ++i) l[i] = g(rng);
        l.normalize();
        auto m2 = project_measure(m1, Flat(Vec::Zero(3), {l}));
        Vec lifted = C * l;  // direction of the line in R^4, orthogonal to b1
        auto direct = project_measure(m, Flat(Vec::Zero(4), {b1, lifted}));
        for (size_t i = 0; i < m.size(); ++i)
            for (size_t j = i + 1; j < m.size(); j += 7)
                EXPECT_NEAR((m2.point(i) - m2.point(j)).norm(), (direct.point(i) - direct.point(j)).norm(), 1e-8);
        // and the pointwise map between them is a fixed orthogonal map: compare Gram matrices
        for (size_t i = 0; i + 1 < m.size(); i += 5)
            EXPECT_NEAR(m2.point(i).dot(m2.point(i + 1)), direct.point(i).dot(direct.point(i + 1)), 1e-8);
    }
}

TEST(HalfspaceMass, SquareExamples) {
    auto m = square();
    EXPECT_DOUBLE_EQ(halfspace_mass(m, HalfSpace(UnitVector(v2(1, 0)), 0.0)), 0.75);
    EXPECT_DOUBLE_EQ(halfspace_mass(m, HalfSpace(UnitVector(v2(1, 0)), 2.0)), 1.0);
    EXPECT_DOUBLE_EQ(halfspace_mass(m, HalfSpace(UnitVector(v2(1, 0)), -2.0)), 0.0);
    EXPECT_THROW(halfspace_mass(m, HalfSpace(UnitVector(v3(1, 0, 0)), 0.0)), Error);
}

TEST(HalfspaceMass, ComplementaryPairsCoverEverything) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 2 + trial % 3;
        std::vector<Vec> pts;
        for (int i = 0; i < 12; ++i) {
            Vec p(d);
            for (int k = 0; k < d; ++k) p[k] = std::round(2.0 * g(rng));  // lattice points: ties happen
            pts.push_back(p);
        }
        auto m = make_measure(pts, std::vector<double>(pts.size(), 1.0));
        Vec n(d);
        for (int k = 0; k < d; ++k) n[k] = coin(rng) ? std::round(g(rng)) : g(rng);
        if (n.norm() < 1e-9) continue;
        UnitVector u(n);
        double off = coin(rng) ? 0.0 : g(rng);
        HalfSpace h(u, off);
        bool boundary = false;
        for (auto& p : pts) boundary |= halfspace_side(h, p) == Side::Boundary;
        double both = halfspace_mass(m, h) + halfspace_mass(m, h.flipped());
        EXPECT_GE(both, 1.0 - 1e-12);
        if (boundary) EXPECT_GT(both, 1.0 + 1e-12);
        else EXPECT_NEAR(both, 1.0, 1e-12);
    }
}

// Right-angled cone {x : <x, a> >= |<x, p>|} around the unit axis a, with p a unit perpendicular.
SimplicialCone cone_around(const Vec& a) {
    Vec p = v2(-a[1], a[0]);
    SimplicialCone B;
    B.apex = Vec::Zero(2);
    B.constraints = {HalfSpace::through_origin(p - a), HalfSpace::through_origin(-p - a)};
    return B;
}

TEST(ConeMass, TriangleExamples) {
    auto verts = simplex_vertices(2);
    auto m = make_measure(verts, {1, 1, 1});
    // the other vertices sit 120 degrees away, outside the 45 degree half-angle
    EXPECT_NEAR(cone_mass(m, cone_around(verts[0])), 1.0 / 3.0, 1e-15);
    // around -v0 the nearest vertices are 60 degrees away
    EXPECT_NEAR(cone_mass(m, cone_around(-verts[0])), 0.0, 1e-15);
    auto q = make_measure({v2(1, 1), v2(2, 0.5)}, {1, 1});
    EXPECT_NEAR(cone_mass(q, cone_around(v2(1, 0.2).normalized())), 1.0, 1e-15);
}

TEST(ConeMass, GeneralPositionTuplePartition) {
    MeasureSpec s;
    s.kind = MeasureKind::Gaussian;
    s.n = 500;
    for (int d : {2, 3}) {
        s.dim = d;
        s.seed = 40 + d;
        auto m = generate_measure(s);
        for (int trial = 0; trial < 20; ++trial) {
            Mat R = random_rotation(d, 100 + trial);
            std::vector<Vec> ns;
            for (auto& v : simplex_vertices(d)) ns.push_back(R * v);
            auto cones = cones_of(tuple_from_normals(ns)).cones;
            double sum = 0.0;
            for (auto& B : cones) sum += cone_mass(m, B);
            // uncovered mass: points in fewer than d of the d+1 half-spaces
            double uncovered = 0.0;
            for (size_t i = 0; i < m.size(); ++i) {
                int in = 0;
                for (auto& n : ns) in += n.dot(m.point(i)) <= 0.0 ? 1 : 0;
                if (in < d) uncovered += m.weight(i);
            }
            EXPECT_LE(sum, 1.0 + 1e-12);
            EXPECT_NEAR(1.0 - sum, uncovered, 1e-12);
        }
    }
}

TEST(MeasureIo, RoundTrip) {
    MeasureSpec s;
    s.kind = MeasureKind::Gaussian;
    s.dim = 3;
    s.n = 100;
    s.seed = 5;
    auto m = generate_measure(s).reweighted([] {
        std::vector<double> w;
        for (int i = 0; i < 100; ++i) w.push_back(1.0 + (i % 7));
        return w;
    }());
    const auto path = temp_path("roundtrip.json");
    save_measure(m, path);
    auto r = load_measure(path);
    ASSERT_EQ(r.size(), m.size());
    for (size_t i = 0; i < m.size(); ++i) {
        EXPECT_LE((r.point(i) - m.point(i)).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_NEAR(r.weight(i), m.weight(i), 1e-15);
    }
    std::remove(path.c_str());
}

TEST(MeasureIo, WeightSumError) {
    auto msg = error_of([] {
        measure_from_json_text(R"({"dim": 2, "points": [[0,0],[1,1]], "weights": [0.25, 0.25]})", "w.json");
    });
    EXPECT_NE(msg.find("0.5"), std::string::npos) << msg;
}

TEST(MeasureIo, DimensionErrorNamesIndex) {
    auto msg = error_of([] {
        measure_from_json_text(R"({"dim": 3, "points": [[0,0,0],[1,1,1],[1,2]]})", "d.json");
    });
    EXPECT_NE(msg.find("points[2]"), std::string::npos) << msg;
}

TEST(MeasureIo, MalformedReportsLine) {
    auto msg = error_of([] { measure_from_json_text("{\"dim\": 2,\n \"points\": [[0,0],\n [1,]]}", "m.json"); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_THROW(load_measure(temp_path("does_not_exist.json")), Error);
}

TEST(MeasureIo, WeightsOptional) {
    auto m = measure_from_json_text(R"({"dim": 1, "points": [[0],[1],[2],[3]]})", "u.json");
    for (double w : m.weights()) EXPECT_DOUBLE_EQ(w, 0.25);
}
