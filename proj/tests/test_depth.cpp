#include "depthlab/lines.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace depthlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

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

// Planar depth by brute force over critical angles: for each point direction, the half-planes whose
// boundary passes through it, rotated slightly either way, plus the boundary itself.
double planar_oracle(const DiscreteMeasure& m, const Vec& q) {
    std::vector<double> angles = {0.0};
    for (const auto& p : m.points()) {
        Vec y = p - q;
        if (y.norm() < 1e-12) continue;
        double a = std::atan2(y[1], y[0]);
        for (double base : {a + kPi / 2, a - kPi / 2})
            for (double e : {0.0, 1e-7, -1e-7}) angles.push_back(base + e);
    }
    double best = 1.0;
    for (double t : angles) {
        Vec u = v2(std::cos(t), std::sin(t));
        double mass = 0.0;
        for (size_t i = 0; i < m.size(); ++i)
            if (u.dot(m.point(i) - q) >= -1e-9) mass += m.weight(i);
        best = std::min(best, mass);
    }
    return best;
}

// Random instance with integer weights and points on a coarse lattice (degenerate ties are common).
DiscreteMeasure lattice_instance(int d, int n, std::mt19937_64& rng, std::vector<int>* w_out = nullptr) {
    std::uniform_int_distribution<int> coord(-3, 3), wt(1, 4);
    std::vector<Vec> pts;
    std::vector<double> w;
    for (int i = 0; i < n; ++i) {
        Vec p(d);
        for (int k = 0; k < d; ++k) p[k] = coord(rng);
        pts.push_back(p);
        w.push_back(wt(rng));
    }
    if (w_out) w_out->assign(w.begin(), w.end());
    return make_measure(pts, w);
}

}  // namespace

TEST(PointDepth, Examples) {
    auto tri = make_measure(simplex_vertices(2), {1, 1, 1});
    EXPECT_NEAR(point_depth(tri, Vec::Zero(2)).depth, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(point_depth(square(), Vec::Zero(2)).depth, 0.5, 1e-15);
    EXPECT_EQ(point_depth(square(), v2(5, 5)).depth, 0.0);
    EXPECT_NEAR(planar_oracle(tri, Vec::Zero(2)), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(planar_oracle(square(), Vec::Zero(2)), 0.5, 1e-15);
}

TEST(PointDepth, WitnessAttainsValue) {
    MeasureSpec s;
    s.kind = MeasureKind::Gaussian;
    for (int d = 2; d <= 4; ++d) {
        s.dim = d;
        s.n = 60;
        s.seed = 300 + d;
        auto m = generate_measure(s);
        Vec q = 0.3 * Vec::Ones(d);
        auto r = point_depth(m, q);
        EXPECT_NEAR(r.witness.vec().norm(), 1.0, 1e-12);
        // the closed half-space with outer normal n through q; the witness may sit on a boundary
        // point, so its mass matches up to an infinitesimal rotation
        HalfSpace h(r.witness, r.witness.vec().dot(q));
        double closed = halfspace_mass(m, h);
        double open = 0.0;
        for (size_t i = 0; i < m.size(); ++i)
            if (halfspace_side(h, m.point(i)) == Side::Inside) open += m.weight(i);
        EXPECT_LE(open, r.depth + 1e-12);
        EXPECT_GE(closed, r.depth - 1e-12);
    }
}

TEST(PointDepth, ErrorsAndLimits) {
    EXPECT_THROW(point_depth(square(), v3(0, 0, 0)), Error);
    MeasureSpec s;
    s.kind = MeasureKind::Gaussian;
    s.dim = 5;
    s.n = 20;
    auto m = generate_measure(s);
    EXPECT_THROW(point_depth(m, Vec::Zero(5)), Error);
    DepthQuery sq;
    sq.mode = DepthMode::Sampled;
    sq.k = 500;
    EXPECT_NO_THROW(point_depth(m, Vec::Zero(5), sq));
}

TEST(Oracle, SinglePointMass) {
    auto m = make_measure({v3(1, 2, 3)}, {1});
    EXPECT_EQ(depth_oracle(m, v3(1, 2, 3)).depth, 1.0);
    EXPECT_EQ(depth_oracle(m, v3(1, 2, 4)).depth, 0.0);
    EXPECT_EQ(point_depth(m, v3(1, 2, 3)).depth, 1.0);
}

TEST(Oracle, ExactEqualsOracleAsIntegers) {
    std::mt19937_64 rng(20240101);
    for (int d : {2, 3}) {
        for (int inst = 0; inst < 100; ++inst) {
            const int n = 5 + inst % 8;
            std::vector<int> w;
            auto m = lattice_instance(d, n, rng, &w);
            int total = 0;
            for (int x : w) total += x;
            std::uniform_int_distribution<int> coord(-2, 2);
            Vec q(d);
            for (int k = 0; k < d; ++k) q[k] = coord(rng) * 0.5;
            if (inst % 5 == 0) q = m.point(0);  // query on a data point
            long e = std::lround(point_depth(m, q).depth * total);
            long o = std::lround(depth_oracle(m, q).depth * total);
            EXPECT_EQ(e, o) << "d=" << d << " inst=" << inst;
            if (d == 2) EXPECT_EQ(e, std::lround(planar_oracle(m, q) * total)) << "inst=" << inst;
        }
    }
}

TEST(SampledDepth, MonotoneAndAboveExact) {
    MeasureSpec s;
    s.kind = MeasureKind::UniformBall;
    for (int d : {2, 3}) {
        s.dim = d;
        s.n = 200;
        s.seed = 8 + d;
        auto m = generate_measure(s);
        auto dirs = sample_directions(d, 2000, 4, SampleMode::Sphere);
        std::vector<UnitVector> small(dirs.begin(), dirs.begin() + 200);
        SampledDepth a(m, small), b(m, dirs);
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g(0.0, 0.4);
        for (int t = 0; t < 50; ++t) {
            Vec q(d);
            for (int k = 0; k < d; ++k) q[k] = g(rng);
            double ex = point_depth(m, q).depth;
            EXPECT_LE(b(q), a(q) + 1e-15);
            EXPECT_GE(b(q), ex - 1e-12);
        }
    }
}

TEST(PointDepth, IsometryInvariance) {
    MeasureSpec s;
    s.kind = MeasureKind::Gaussian;
    for (int d = 2; d <= 4; ++d) {
        s.dim = d;
        s.n = 80;
        s.seed = 90 + d;
        auto m = generate_measure(s);
        for (int t = 0; t < 5; ++t) {
            Mat R = random_rotation(d, 1000 + t);
            Vec shift = Vec::LinSpaced(d, -1.0, 2.0);
            Vec q = 0.2 * Vec::Ones(d);
            auto m2 = m.transformed(R).translated(shift);
            EXPECT_EQ(point_depth(m, q).depth, point_depth(m2, R * q + shift).depth);
        }
    }
}

TEST(FlatDepth, Examples) {
    auto m = make_measure({v3(1, 0, 0), v3(-1, 0, 0), v3(0, 1, 0), v3(0, -1, 0)}, {1, 1, 1, 1});
    EXPECT_NEAR(flat_depth(m, Flat(Vec::Zero(3), {v3(0, 0, 1)})).depth, 0.5, 1e-15);
    EXPECT_EQ(flat_depth(m, Flat(Vec::Zero(3), {v3(1, 0, 0), v3(0, 1, 0)})).depth, 1.0);
    EXPECT_EQ(flat_depth(m, Flat(v3(10, 10, 0), {v3(0, 0, 1)})).depth, 0.0);
}

TEST(FlatDepth, EqualsDepthOfProjectedAnchor) {
    MeasureSpec s;
    s.kind = MeasureKind::Gaussian;
    s.dim = 4;
    s.n = 50;
    s.seed = 4;
    auto m = generate_measure(s);
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        Vec a = random_unit(4, rng), b = random_unit(4, rng);
        b -= b.dot(a) * a;
        Flat f(0.1 * random_unit(4, rng), {a, b.normalized()});
        double viaproj = point_depth(project_measure(m, f), project_point(f.base, f)).depth;
        EXPECT_EQ(flat_depth(m, f).depth, viaproj);
    }
}

TEST(DirectionProfile, PointMassIsOne) {
    auto m = make_measure({v3(1, 1, 1)}, {1});
    for (auto& u : sample_directions(3, 5, 1, SampleMode::Projective))
        EXPECT_EQ(direction_profile(m, Direction(u.vec())).a, 1.0);
}

TEST(DirectionProfile, UniformBallNearHalf) {
    MeasureSpec s;
    s.kind = MeasureKind::UniformBall;
    s.dim = 3;
    s.n = 2000;
    s.seed = 12;
    auto m = generate_measure(s);
    MedianBudget b;
    b.exact_search = true;
    b.starts = 2;
    for (auto& u : sample_directions(3, 3, 5, SampleMode::Projective))
        EXPECT_NEAR(direction_profile(m, Direction(u.vec()), b).a, 0.5, 0.05);
}

TEST(DirectionProfile, ContinuityUnderSmallRotation) {
    MeasureSpec s;
    s.kind = MeasureKind::Gaussian;
    s.dim = 3;
    s.n = 2000;
    s.seed = 13;
    auto m = generate_measure(s);
    MedianBudget b;
    b.exact_search = true;
    b.starts = 2;
    std::mt19937_64 rng(2);
    for (int t = 0; t < 3; ++t) {
        Vec u = random_unit(3, rng);
        Vec w = random_unit(3, rng);
        w -= w.dot(u) * u;
        Vec u2 = std::cos(0.9 * kPi / 180) * u + std::sin(0.9 * kPi / 180) * w.normalized();
        double a1 = direction_profile(m, Direction(u), b).a;
        double a2 = direction_profile(m, Direction(u2), b).a;
        EXPECT_LT(std::abs(a1 - a2), 0.05);
    }
}

TEST(DeepLineSearch, Thresholds) {
    EXPECT_DOUBLE_EQ(line_rado_threshold(3), 1.0 / 3.0);
    EXPECT_NEAR(line_improved_threshold(3), 1.0 / 3.0 + 1.0 / 81.0, 1e-15);
    EXPECT_NEAR(line_improved_threshold(3), 0.34568, 1e-5);
    auto m = make_measure({v2(0, 0), v2(1, 0)}, {1, 1});
    EXPECT_THROW(deep_line_search(m), Error);
}

TEST(DeepLineSearch, BallAndMixture) {
    LineSearchParams p;
    p.grid_count = 60;
    p.refine_top = 2;
    p.refine_iters = 2;
    p.neighbours = 4;
    MeasureSpec s;
    s.dim = 3;
    s.n = 150;
    s.seed = 31;
    s.kind = MeasureKind::UniformBall;
    auto ball = deep_line_search(generate_measure(s), p);
    EXPECT_NEAR(ball.depth, 0.5, 0.05);
    s.kind = MeasureKind::SimplexMixture;
    s.params["sigma"] = 0.05;
    auto mix_m = generate_measure(s);
    auto mix = deep_line_search(mix_m, p);
    EXPECT_GE(mix.depth, 1.0 / 3.0 - 0.02);
    EXPECT_NEAR(mix.direction.vec().norm(), 1.0, 1e-12);
    EXPECT_NEAR(mix.rado, 1.0 / 3.0, 1e-15);
    // the anchor lies on the reported line and the line's flat depth is the reported depth
    Flat line(mix.anchor, {mix.direction.vec()});
    EXPECT_NEAR(flat_depth(mix_m, line).depth, mix.depth, 1e-12);
}

TEST(MinimizingCells, SquareCells) {
    // open cells of directions are the four open quadrants; each catches two points
    auto cells = minimizing_cells(square(), Vec::Zero(2));
    EXPECT_NEAR(cells.level, 0.5, 1e-15);
    ASSERT_EQ(cells.normals.size(), 4u);
    for (auto& n : cells.normals) {
        HalfSpace h = HalfSpace::through_origin(n);
        double open = 0.0;
        for (size_t i = 0; i < 4; ++i)
            if (halfspace_side(h, square().point(i)) == Side::Inside) open += 0.25;
        EXPECT_NEAR(open, 0.5, 1e-12);
    }
}
