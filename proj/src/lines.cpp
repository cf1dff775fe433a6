#include "depthlab/lines.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace depthlab {

namespace {

struct Scored {
    Direction dir;
    ProfileResult prof;
};

bool better(const Scored& a, const Scored& b) {
    if (a.prof.a != b.prof.a) return a.prof.a > b.prof.a;
    const Vec& x = a.dir.vec();
    const Vec& y = b.dir.vec();
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
}

MedianBudget scan_budget(std::uint64_t seed) {
    MedianBudget b;
    b.mode = MedianMode::Multistart;
    b.seed = seed;
    b.starts = 0;
    b.exact_search = true;
    b.refine_iters = 40;
    b.min_step = 1e-2;
    b.certify = 1;
    return b;
}

MedianBudget refine_budget(std::uint64_t seed) {
    MedianBudget b = scan_budget(seed);
    b.starts = 2;
    b.refine_iters = 120;
    b.min_step = 1e-4;
    b.certify = 2;
    return b;
}

}  // namespace

ProfileResult direction_profile(const DiscreteMeasure& m, const Direction& dir, const MedianBudget& budget) {
    if (m.dim() < 2) fail(Error::Kind::InvalidArgument, "direction_profile: needs dim >= 2");
    if (dir.vec().size() != m.dim()) fail(Error::Kind::DimensionMismatch, "direction_profile: dimension mismatch");
    Flat line(Vec::Zero(m.dim()), {dir.vec()});
    Mat C = complement_basis(line);
    DiscreteMeasure pm = project_measure(m, line);
    MedianResult med = tukey_median(pm, budget);
    return {med.depth, med.point, C * med.point};
}

LineSearchResult deep_line_search(const DiscreteMeasure& m, const LineSearchParams& p) {
    const int d = m.dim();
    if (d < 3) fail(Error::Kind::InvalidArgument, "deep_line_search: needs dim >= 3");
    if (p.grid_count < 1) fail(Error::Kind::InvalidArgument, "deep_line_search: grid_count must be positive");
    LineSearchResult res;
    res.rado = line_rado_threshold(d);
    res.improved = line_improved_threshold(d);

    std::vector<Scored> scan;
    for (const auto& u : sample_directions(d, p.grid_count, p.seed, SampleMode::Grid)) {
        Direction dir(u.vec());
        scan.push_back({dir, direction_profile(m, dir, scan_budget(p.seed))});
        ++res.iterations;
    }
    std::sort(scan.begin(), scan.end(), better);

    // Shrinking-neighbourhood refinement of the best scan directions.
    std::mt19937_64 rng(p.seed ^ 0xd1b54a32d192ed03ULL);
    const double r0 = 1.5 * std::pow(2.0 / p.grid_count, 1.0 / (d - 1));
    std::vector<Scored> refined;
    const int top = std::min<int>(std::max(1, p.refine_top), static_cast<int>(scan.size()));
    for (int t = 0; t < top; ++t) {
        Scored cur{scan[t].dir, direction_profile(m, scan[t].dir, refine_budget(p.seed))};
        ++res.iterations;
        double r = r0;
        for (int round = 0; round < p.refine_iters; ++round) {
            Scored best = cur;
            for (int k = 0; k < p.neighbours; ++k) {
                Vec g = random_unit(d, rng);
                g -= g.dot(cur.dir.vec()) * cur.dir.vec();
                if (g.norm() < 1e-12) continue;
                Direction nd(cur.dir.vec() + r * g.normalized());
                Scored s{nd, direction_profile(m, nd, refine_budget(p.seed))};
                ++res.iterations;
                if (better(s, best)) best = s;
            }
            if (best.prof.a > cur.prof.a) cur = best;
            r *= 0.5;
        }
        refined.push_back(cur);
    }

    // Certify the candidates: exact planar median when the projection allows it.
    MedianBudget cert = refine_budget(p.seed);
    const bool planar_exact = d == 3 && m.size() <= 200;
    if (planar_exact) cert.mode = MedianMode::Arrangement;
    Scored win = refined.front();
    bool first = true;
    for (auto& s : refined) {
        Scored c{s.dir, direction_profile(m, s.dir, cert)};
        if (c.prof.a < s.prof.a) c = s;  // keep the better certified point of the two searches
        if (first || better(c, win)) win = c;
        first = false;
    }
    res.direction = win.dir;
    res.anchor = win.prof.anchor;
    res.depth = win.prof.a;
    res.exact = d - 1 <= kExactMaxDim && m.size() <= kExactMaxPoints;
    return res;
}

}  // namespace depthlab
