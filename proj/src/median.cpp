#include "depthlab/median.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace depthlab {

namespace {

using Kind = Error::Kind;

constexpr double kTie = 1e-12;

bool lex_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

struct Scored {
    Vec x;
    double depth;
};

// Higher depth wins; equal depth (within kTie) falls back to the lexicographically smaller point.
bool better(const Scored& a, const Scored& b) {
    if (a.depth > b.depth + kTie) return true;
    if (b.depth > a.depth + kTie) return false;
    return lex_less(a.x, b.x);
}

bool exact_ok(const DiscreteMeasure& m) { return m.dim() <= kExactMaxDim && m.size() <= kExactMaxPoints; }

double certified_depth(const DiscreteMeasure& m, const Vec& x) {
    if (exact_ok(m)) return point_depth_exact(m, x).depth;
    return point_depth_sampled(m, x, 20000, 0x5eed).depth;
}

Vec coordinate_median(const DiscreteMeasure& m) {
    Vec out(m.dim());
    std::vector<std::pair<double, double>> col(m.size());
    for (int k = 0; k < m.dim(); ++k) {
        for (size_t i = 0; i < m.size(); ++i) col[i] = {m.point(i)[k], m.weight(i)};
        std::sort(col.begin(), col.end());
        double acc = 0.0;
        out[k] = col.back().first;
        for (const auto& [v, w] : col) {
            acc += w;
            if (acc >= 0.5) {
                out[k] = v;
                break;
            }
        }
    }
    return out;
}

double spread(const DiscreteMeasure& m) {
    Vec c = m.mean();
    double s = 0.0;
    for (size_t i = 0; i < m.size(); ++i) s += m.weight(i) * (m.point(i) - c).squaredNorm();
    s = std::sqrt(s);
    return s > 0 ? s : 1.0;
}

// Coordinate and random-direction pattern search.
template <class F>
Scored pattern_search(const F& S, Vec x, double h0, int iters, double min_step, const std::vector<Vec>& moves,
                      long& evals) {
    double f = S(x);
    ++evals;
    double h = h0;
    for (int it = 0; it < iters && h > min_step * h0; ++it) {
        bool improved = false;
        for (const auto& mv : moves) {
            Vec y = x + h * mv;
            double fy = S(y);
            ++evals;
            if (fy > f + kTie) {
                x = y;
                f = fy;
                improved = true;
                break;
            }
        }
        if (!improved) h *= 0.5;
    }
    return {x, f};
}

MedianResult certify_best(const DiscreteMeasure& m, std::vector<Scored> cands, int certify, long evals) {
    std::sort(cands.begin(), cands.end(), better);
    MedianResult res;
    res.exact = exact_ok(m);
    std::vector<Scored> cert;
    int n = std::min<int>(std::max(1, certify), static_cast<int>(cands.size()));
    for (int i = 0; i < n; ++i) {
        cert.push_back({cands[i].x, certified_depth(m, cands[i].x)});
        ++evals;
    }
    std::sort(cert.begin(), cert.end(), better);
    Scored best = cert.front();
    // Depth regions are convex: the mean of the certified maximizers is a maximizer too, and
    // sits further inside the deepest region than any single search endpoint.
    Vec mean = Vec::Zero(m.dim());
    int k = 0;
    for (const auto& s : cert)
        if (s.depth >= best.depth - kTie) {
            mean += s.x;
            ++k;
        }
    if (k > 1) {
        Scored c{mean / k, certified_depth(m, mean / k)};
        ++evals;
        if (c.depth >= best.depth - kTie) best = c;
    }
    res.point = best.x;
    res.depth = best.depth;
    res.candidates_evaluated = evals;
    return res;
}

std::vector<Vec> search_moves(int d, std::mt19937_64& rng) {
    std::vector<Vec> moves;
    for (int k = 0; k < d; ++k) {
        moves.push_back(Vec::Unit(d, k));
        moves.push_back(-Vec::Unit(d, k));
    }
    for (int k = 0; k < 2 * d; ++k) {
        Vec u = random_unit(d, rng);
        moves.push_back(u);
        moves.push_back(-u);
    }
    return moves;
}

MedianResult multistart(const DiscreteMeasure& m, const MedianBudget& b) {
    const int d = m.dim();
    std::mt19937_64 rng(b.seed);
    SampledDepth S(m, b.exact_search ? 8 : std::max(8, b.directions), b.seed ^ 0x9e3779b97f4a7c15ULL);
    auto moves = search_moves(d, rng);
    const double h0 = 0.5 * spread(m);
    std::vector<Vec> starts{m.mean(), coordinate_median(m)};
    std::uniform_int_distribution<size_t> pick(0, m.size() - 1);
    std::exponential_distribution<double> ex(1.0);
    for (int s = 0; s < b.starts; ++s) {
        Vec x = Vec::Zero(d);
        double tot = 0.0;
        for (int k = 0; k <= d; ++k) {
            double w = ex(rng);
            x += w * m.point(pick(rng));
            tot += w;
        }
        starts.push_back(x / tot);
    }
    long evals = 0;
    std::vector<Scored> cands;
    if (b.exact_search && exact_ok(m)) {
        auto F = [&](const Vec& x) { return point_depth_exact(m, x).depth; };
        for (const auto& x0 : starts)
            cands.push_back(pattern_search(F, x0, h0, b.refine_iters, b.min_step, moves, evals));
    } else {
        for (const auto& x0 : starts)
            cands.push_back(pattern_search(S, x0, h0, b.refine_iters, b.min_step, moves, evals));
        // Sampled depth regions are intersections of half-spaces, so the mean of tied maximizers
        // is a maximizer as well; it sits centrally, where the exact depth tends to hold up.
        double top = -1.0;
        for (const auto& c : cands) top = std::max(top, c.depth);
        Vec mean = Vec::Zero(d);
        int k = 0;
        for (const auto& c : cands)
            if (c.depth >= top - kTie) {
                mean += c.x;
                ++k;
            }
        if (k > 1) {
            mean /= k;
            double sm = S(mean);
            ++evals;
            if (sm >= top - kTie) {
                std::vector<Scored> rest{{mean, std::max(sm, top)}};
                for (auto& c : cands)
                    if (c.depth < top - kTie) rest.push_back(std::move(c));
                cands = std::move(rest);
            }
        }
    }
    return certify_best(m, cands, b.certify, evals);
}

MedianResult grid_search(const DiscreteMeasure& m, const MedianBudget& b) {
    const int d = m.dim();
    const int g = std::max(2, b.grid);
    Vec lo = m.point(0), hi = m.point(0);
    for (const auto& p : m.points()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    SampledDepth S(m, std::max(8, b.directions), b.seed ^ 0x9e3779b97f4a7c15ULL);
    long evals = 0;
    std::vector<Scored> pts;
    long total = 1;
    for (int k = 0; k < d; ++k) total *= g;
    if (total > 2000000) fail(Kind::Limit, "tukey_median: grid too large");
    for (long idx = 0; idx < total; ++idx) {
        Vec x(d);
        long r = idx;
        for (int k = 0; k < d; ++k) {
            int t = r % g;
            r /= g;
            x[k] = lo[k] + (hi[k] - lo[k]) * (t + 0.5) / g;
        }
        pts.push_back({x, S(x)});
        ++evals;
    }
    std::sort(pts.begin(), pts.end(), better);
    std::mt19937_64 rng(b.seed);
    auto moves = search_moves(d, rng);
    double h0 = 0.5 * (hi - lo).maxCoeff() / g;
    if (!(h0 > 0)) h0 = 1.0;
    std::vector<Scored> cands;
    int keep = std::min<int>(std::max(1, b.starts), static_cast<int>(pts.size()));
    for (int i = 0; i < keep; ++i) cands.push_back(pattern_search(S, pts[i].x, h0, b.refine_iters, b.min_step, moves, evals));
    return certify_best(m, cands, b.certify, evals);
}

// ---- exact planar search over the arrangement of lines through pairs of data points ----

struct Line {
    Vec n;  // unit normal
    double c;
    double below;  // mass strictly on <n,x> < c
    double above;  // mass strictly on <n,x> > c
};

struct Constraint {
    Vec n;
    double c;  // keep <n, x> <= c
};

using Polygon = std::vector<Vec>;

Polygon clip(const Polygon& poly, const Constraint& h) {
    Polygon out;
    const size_t k = poly.size();
    if (k == 0) return out;
    const double tol = 1e-12 * (1.0 + std::abs(h.c));
    for (size_t i = 0; i < k; ++i) {
        const Vec& a = poly[i];
        const Vec& b = poly[(i + 1) % k];
        double fa = h.n.dot(a) - h.c, fb = h.n.dot(b) - h.c;
        bool ina = fa <= tol, inb = fb <= tol;
        if (ina) out.push_back(a);
        if (ina != inb && k > 1) {
            double t = fa / (fa - fb);
            out.push_back(a + t * (b - a));
        }
    }
    Polygon dedup;
    for (const auto& v : out)
        if (dedup.empty() || (v - dedup.back()).norm() > 1e-13) dedup.push_back(v);
    while (dedup.size() > 1 && (dedup.front() - dedup.back()).norm() <= 1e-13) dedup.pop_back();
    return dedup;
}

std::vector<Line> pair_lines(const DiscreteMeasure& m, double scale) {
    std::vector<Line> lines;
    const size_t n = m.size();
    const double tol = 1e-10 * scale;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            Vec dvec = m.point(j) - m.point(i);
            double len = dvec.norm();
            if (len <= tol) continue;
            Vec nn(2);
            nn << -dvec[1] / len, dvec[0] / len;
            Line L{nn, nn.dot(m.point(i)), 0.0, 0.0};
            for (size_t k = 0; k < n; ++k) {
                double s = nn.dot(m.point(k)) - L.c;
                if (s < -tol)
                    L.below += m.weight(k);
                else if (s > tol)
                    L.above += m.weight(k);
            }
            lines.push_back(std::move(L));
        }
    return lines;
}

// Superset of {x : depth(x) > level} (strict) or {x : depth(x) >= level}.
Polygon level_region(const std::vector<Line>& lines, const Polygon& box, double level, bool strict) {
    Polygon P = box;
    for (const auto& L : lines) {
        bool cut_below = strict ? L.below <= level + kTie : L.below < level - kTie;
        bool cut_above = strict ? L.above <= level + kTie : L.above < level - kTie;
        if (cut_below) P = clip(P, {-L.n, -L.c});
        if (cut_above) P = clip(P, {L.n, L.c});
        if (P.empty()) break;
    }
    return P;
}

// Intersections of lines crossing the polygon's bounding box, restricted to that box.
std::vector<Vec> arrangement_vertices_in(const std::vector<Line>& lines, const Polygon& P) {
    Vec lo = P.front(), hi = P.front();
    for (const auto& v : P) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    const double pad = 1e-9 * (1.0 + std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()));
    lo.array() -= pad;
    hi.array() += pad;
    std::vector<const Line*> crossing;
    for (const auto& L : lines) {
        double mn = INFINITY, mx = -INFINITY;
        for (int cx = 0; cx < 2; ++cx)
            for (int cy = 0; cy < 2; ++cy) {
                Vec corner(2);
                corner << (cx ? hi[0] : lo[0]), (cy ? hi[1] : lo[1]);
                double s = L.n.dot(corner) - L.c;
                mn = std::min(mn, s);
                mx = std::max(mx, s);
            }
        if (mn <= 0 && mx >= 0) crossing.push_back(&L);
    }
    std::vector<Vec> out;
    for (size_t a = 0; a < crossing.size(); ++a)
        for (size_t b = a + 1; b < crossing.size(); ++b) {
            Eigen::Matrix2d A;
            A.row(0) = crossing[a]->n.transpose();
            A.row(1) = crossing[b]->n.transpose();
            double det = A.determinant();
            if (std::abs(det) < 1e-14) continue;
            Eigen::Vector2d rhs(crossing[a]->c, crossing[b]->c);
            Vec x = A.inverse() * rhs;
            if ((x.array() >= lo.array()).all() && (x.array() <= hi.array()).all()) out.push_back(x);
        }
    return out;
}

MedianResult arrangement(const DiscreteMeasure& m, const MedianBudget& b) {
    if (m.dim() != 2) fail(Kind::Limit, "tukey_median: arrangement mode requires d = 2");
    if (m.size() > 200) fail(Kind::Limit, "tukey_median: arrangement mode requires n <= 200");
    long evals = 0;
    auto eval = [&](const Vec& x) {
        ++evals;
        return Scored{x, point_depth_exact(m, x).depth};
    };
    // Lower bound from data points, centroid and coordinate median.
    Scored best = eval(m.mean());
    for (const auto& x : {coordinate_median(m)}) {
        Scored s = eval(x);
        if (better(s, best)) best = s;
    }
    for (const auto& p : m.points()) {
        Scored s = eval(p);
        if (better(s, best)) best = s;
    }
    const double scale = spread(m);
    auto lines = pair_lines(m, scale);
    Vec lo = m.point(0), hi = m.point(0);
    for (const auto& p : m.points()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    lo.array() -= 1.0;
    hi.array() += 1.0;
    Polygon box;
    for (auto [x, y] : {std::pair{lo[0], lo[1]}, {hi[0], lo[1]}, {hi[0], hi[1]}, {lo[0], hi[1]}}) {
        Vec v(2);
        v << x, y;
        box.push_back(v);
    }
    // Raise the level until the strict superlevel region is empty.
    for (int round = 0; round < 1000; ++round) {
        Polygon P = level_region(lines, box, best.depth, true);
        if (P.empty()) break;
        bool raised = false;
        std::vector<Vec> probes = P;
        Vec cen = Vec::Zero(2);
        for (const auto& v : P) cen += v;
        probes.push_back(cen / static_cast<double>(P.size()));
        for (const auto& x : probes) {
            Scored s = eval(x);
            if (s.depth > best.depth + kTie) {
                best = s;
                raised = true;
            }
        }
        if (raised) continue;
        for (const auto& x : arrangement_vertices_in(lines, P)) {
            Scored s = eval(x);
            if (s.depth > best.depth + kTie) {
                best = s;
                raised = true;
            }
        }
        if (!raised) break;
    }
    // Report the centroid of the deepest region, the classical choice among tied maximizers.
    Polygon R = level_region(lines, box, best.depth, false);
    Scored pick = best;
    if (!R.empty()) {
        Vec cen = Vec::Zero(2);
        for (const auto& v : R) cen += v;
        Scored c = eval(cen / static_cast<double>(R.size()));
        if (c.depth >= best.depth - kTie) pick = c;
    }
    (void)b;
    MedianResult res;
    res.point = pick.x;
    res.depth = pick.depth;
    res.candidates_evaluated = evals;
    res.exact = true;
    return res;
}

// Moves n inside its open cell {sign <n, y_k> fixed} to maximize min_k |<n, y_k>| over unit y_k.
// Masses of H(n) are unchanged; a centred normal leaves room for perturbation.
Vec center_in_cell(const std::vector<Vec>& ys, Vec n) {
    std::vector<double> sg(ys.size());
    for (size_t k = 0; k < ys.size(); ++k) {
        double v = n.dot(ys[k]);
        if (std::abs(v) < 1e-12) return n;  // on a cell wall; leave as is
        sg[k] = v > 0 ? 1.0 : -1.0;
    }
    auto margin = [&](const Vec& u) {
        double f = INFINITY;
        for (size_t k = 0; k < ys.size(); ++k) f = std::min(f, sg[k] * u.dot(ys[k]));
        return f;
    };
    double f = margin(n);
    double step = 0.1;
    for (int it = 0; it < 400 && step > 1e-7; ++it) {
        Vec dir = Vec::Zero(n.size());
        for (size_t k = 0; k < ys.size(); ++k)
            if (sg[k] * n.dot(ys[k]) <= f + 0.25 * step) dir += sg[k] * ys[k];
        dir -= dir.dot(n) * n;
        if (dir.norm() < 1e-15) break;
        Vec cand = (n + step * dir.normalized()).normalized();
        double fc = margin(cand);
        if (fc > f) {
            n = cand;
            f = fc;
        } else {
            step *= 0.5;
        }
    }
    return n;
}

}  // namespace

MedianResult tukey_median(const DiscreteMeasure& m, const MedianBudget& budget) {
    // A single support point (possibly repeated) is its own median.
    bool single = true;
    for (const auto& p : m.points())
        if ((p - m.point(0)).norm() > 1e-12 * (1.0 + m.point(0).norm())) single = false;
    if (single) {
        MedianResult r;
        r.point = m.point(0);
        r.depth = 1.0;
        r.candidates_evaluated = 1;
        return r;
    }
    switch (budget.mode) {
        case MedianMode::Arrangement: return arrangement(m, budget);
        case MedianMode::Multistart: return multistart(m, budget);
        case MedianMode::Grid: return grid_search(m, budget);
    }
    fail(Kind::InvalidArgument, "tukey_median: unknown mode");
}

NormalSet min_normal_set(const DiscreteMeasure& m, const Vec& o, double tol) {
    if (!(tol > 0)) fail(Kind::InvalidArgument, "min_normal_set: tol must be positive");
    NormalSet out;
    double level;
    if (exact_ok(m)) {
        auto cells = minimizing_cells(m, o);
        level = cells.level;
        for (const auto& n : cells.normals) out.normals.emplace_back(n);
    } else {
        level = point_depth_sampled(m, o, 20000, 0x5eed).depth;
    }
    out.level = level;
    for (const auto& u : sample_directions(m.dim(), 10000, 0x4e4f524dULL, SampleMode::Sphere)) {
        HalfSpace h(u, u.vec().dot(o));
        if (halfspace_mass(m, h) <= level + tol) out.normals.push_back(u);
    }
    return out;
}

WitnessResult witness_tuple(const DiscreteMeasure& m, const Vec& o, double tol) {
    const int d = m.dim();
    if (o.size() != d) fail(Kind::DimensionMismatch, "witness_tuple: dimension mismatch");
    NormalSet ns = min_normal_set(m, o, tol);
    if (!(ns.level > 1e-12))  // masses are float sums; an empty closed half-space can read 1e-16
        fail(Kind::Precondition, "witness_tuple: depth(o) = 0, the minimizing normals lie in a hemisphere");
    if (!(ns.level < 1.0 / d)) {
        std::ostringstream os;
        os << "witness_tuple: depth(o) = " << ns.level << " is not below 1/d";
        fail(Kind::Precondition, os.str());
    }
    // Spread-out subset by farthest-point selection, then best interior margin over (d+1)-subsets.
    std::vector<Vec> ys;
    for (const auto& p : m.points()) {
        Vec y = p - o;
        if (y.norm() > 1e-12 * (1.0 + o.norm())) ys.push_back(y.normalized());
    }
    std::vector<Vec> pool;
    for (const auto& u : ns.normals) pool.push_back(u.vec());
    const size_t cap = d <= 2 ? 60 : (d == 3 ? 32 : 18);
    std::vector<Vec> reps;
    if (!pool.empty()) {
        std::vector<double> dist(pool.size(), INFINITY);
        size_t cur = 0;
        while (reps.size() < std::min(cap, pool.size())) {
            reps.push_back(pool[cur]);
            size_t far = 0;
            double fd = -1.0;
            for (size_t i = 0; i < pool.size(); ++i) {
                dist[i] = std::min(dist[i], (pool[i] - pool[cur]).norm());
                if (dist[i] > fd) {
                    fd = dist[i];
                    far = i;
                }
            }
            if (fd <= 1e-12) break;
            cur = far;
        }
    }
    for (auto& r : reps) r = center_in_cell(ys, r);
    if (static_cast<int>(reps.size()) < d + 1) {
        std::ostringstream os;
        os << "witness_tuple: only " << reps.size() << " distinct minimizing normals; best interior margin 0";
        fail(Kind::NotFound, os.str());
    }
    const int k = d + 1;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    double best = -INFINITY;
    std::vector<int> best_idx;
    const int r = static_cast<int>(reps.size());
    std::vector<Vec> sub(k);
    while (true) {
        for (int t = 0; t < k; ++t) sub[t] = reps[idx[t]];
        double mg = interior_margin(sub).margin;
        if (mg > best) {
            best = mg;
            best_idx = idx;
        }
        int t = k - 1;
        while (t >= 0 && idx[t] == r - k + t) --t;
        if (t < 0) break;
        ++idx[t];
        for (int q = t + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
    if (best < kLambdaMin) {
        std::ostringstream os;
        os << "witness_tuple: no (d+1)-subtuple with 0 inside; best interior margin " << best;
        fail(Kind::NotFound, os.str());
    }
    WitnessResult w;
    w.margin = best;
    w.depth = ns.level;
    std::vector<Vec> outer;
    for (int t : best_idx) {
        w.minimizing.push_back(reps[t]);
        outer.push_back(-reps[t]);
    }
    w.tuple = tuple_from_normals(outer);
    return w;
}

Recentered recenter(const DiscreteMeasure& m, const MedianBudget& budget) {
    MedianResult med = tukey_median(m, budget);
    return {m.translated(-med.point), med};
}

}  // namespace depthlab
