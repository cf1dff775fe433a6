#include "depthlab/suites.hpp"

#include "depthlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace depthlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = 180.0 / kPi;

Row base_row(const std::string& suite, const std::string& instance, int d, long n, std::uint64_t seed) {
    Row r;
    r.suite = suite;
    r.instance = instance;
    r.d = d;
    r.n = n;
    r.seed = seed;
    return r;
}

Row named(Row r, const std::string& check) {
    r.check = check;
    return r;
}

std::string pad(int k, int width = 2) {
    std::string s = std::to_string(k);
    return std::string(width > static_cast<int>(s.size()) ? width - s.size() : 0, '0') + s;
}

Report flatten(std::vector<std::vector<Row>> parts) {
    Report r;
    for (auto& p : parts)
        for (auto& row : p) r.rows.push_back(std::move(row));
    return r;
}

std::vector<int> dims_or(const SuiteParams& p, std::vector<int> fallback) {
    return p.dims.empty() ? fallback : p.dims;
}

int count_or(const SuiteParams& p, int fallback) { return p.instances >= 0 ? p.instances : fallback; }

// Median of a suite measure: exact arrangement in the plane for small n, multistart otherwise.
MedianBudget centre_budget(int d, size_t n, std::uint64_t seed) {
    MedianBudget b;
    b.seed = seed;
    if (d == 2 && n <= 200) b.mode = MedianMode::Arrangement;
    return b;
}

// The depth function of a discrete measure has a flat top; near its edge the minimizing normals
// can sit in one hemisphere. Any maximizer is a median: among maximizers on the segment from the
// found median to the mean, recentre at the one whose witness has the widest interior margin.
struct Anchored {
    DiscreteMeasure m;  // translated so the anchor is the origin
    GeneratingTuple A;
    double margin = -1.0;
    std::string error;
};

Anchored anchor_witness(const DiscreteMeasure& raw, const MedianBudget& budget) {
    Recentered rc = recenter(raw, budget);
    const int d = raw.dim();
    const Vec shift = raw.mean() - rc.median.point;
    Anchored out;
    out.m = rc.measure;
    out.error = "no maximizer on the segment carries a witness";
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        DiscreteMeasure cand = rc.measure.translated(-t * shift);
        if (t > 0.0 && point_depth(cand, Vec::Zero(d)).depth < rc.median.depth - kCheckTol) continue;
        try {
            WitnessResult wr = witness_tuple(cand, Vec::Zero(d), 1e-9);
            if (wr.margin > out.margin) {
                out.margin = wr.margin;
                out.A = wr.tuple;
                out.m = cand;
                out.error.clear();
            }
        } catch (const Error& e) {
            if (e.kind() != Error::Kind::NotFound) throw;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Witness instances shared by the bmes, bijection and central suites.

struct WitnessInstance {
    std::string id;
    int d = 0;
    long n = 0;
    std::uint64_t seed = 0;
    double sigma = 0.0;
    DiscreteMeasure m;  // recentered: median at the origin
    GeneratingTuple A;
    double weight = 0.0;
    std::string error;  // witness extraction failure
};

WitnessInstance witness_instance(const SuiteParams& p, int k) {
    static const double sigmas[] = {0.01, 0.03, 0.05};
    const auto dims = dims_or(p, {2, 3});
    WitnessInstance w;
    w.d = dims[k % dims.size()];
    w.sigma = sigmas[(k / dims.size()) % 3];
    w.n = p.n > 0 ? p.n : (w.d == 2 ? 150 : 160);
    w.seed = derive_seed(p.seed, "witness", k);
    std::ostringstream id;
    id << "w" << pad(k) << "-d" << w.d << "-s" << w.sigma;
    w.id = id.str();

    MeasureSpec spec;
    spec.kind = MeasureKind::SimplexMixture;
    spec.dim = w.d;
    spec.n = static_cast<int>(w.n);
    spec.seed = w.seed;
    spec.params["sigma"] = w.sigma;
    DiscreteMeasure raw = generate_measure(spec).transformed(random_rotation(w.d, w.seed ^ 0x5bd1e995ULL));
    Anchored an = anchor_witness(raw, centre_budget(w.d, raw.size(), w.seed));
    w.m = an.m;
    w.A = an.A;
    w.error = an.error;
    if (w.error.empty()) w.weight = tuple_weight(w.m, w.A);
    return w;
}

// Small rotation in a random plane, angle uniform in [1, 5] degrees.
Mat small_rotation(int d, std::uint64_t seed, double* angle_deg) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(1.0, 5.0);
    Vec u = random_unit(d, rng);
    Vec v = random_unit(d, rng);
    v -= v.dot(u) * u;
    while (v.norm() < 1e-6) {
        v = random_unit(d, rng);
        v -= v.dot(u) * u;
    }
    *angle_deg = ang(rng);
    return plane_rotation(u, v.normalized(), *angle_deg / kDeg);
}

struct PairInstance {
    WitnessInstance w;
    GeneratingTuple B;
    double angle_deg = 0.0;
    double eps = 0.0;
    bool matched = false;
    MatchReport match;
    std::string error;
};

double bijection_eps(int d) { return 1.0 / ((d + 1.0) * (3.0 * d + 2.0)); }
double bmes_eps(int d) { return 1.0 / ((d + 1.0) * (2.0 * d + 1.0)); }

PairInstance pair_instance(const SuiteParams& p, int k) {
    PairInstance q;
    q.w = witness_instance(p, k);
    q.eps = std::isnan(p.eps) ? bijection_eps(q.w.d) : p.eps;
    if (!q.w.error.empty()) return q;
    Mat R = small_rotation(q.w.d, derive_seed(p.seed, "rotation", k), &q.angle_deg);
    q.B = rotate_tuple(q.w.A, R);
    try {
        q.match = match_tuples(q.w.m, q.w.A, q.B, q.eps);
        q.matched = true;
    } catch (const Error& e) {
        if (e.kind() != Error::Kind::Precondition) throw;
        q.error = e.what();
    }
    return q;
}

Row witness_failure(const std::string& suite, const WitnessInstance& w) {
    Row r = named(base_row(suite, w.id, w.d, w.n, w.seed), "witness_tuple");
    r.expected = kLambdaMin;
    r.observed = 0.0;
    r.slack = -kLambdaMin;
    r.pass = false;
    return r;
}

Row map_failure(Row r) {
    r.check = "structural_map";
    r.expected = 1.0;
    r.observed = 0.0;
    r.slack = -1.0;
    r.pass = false;
    return r;
}

// Optimal assignment of vectors to cluster directions, minimizing the largest angle (degrees).
double assignment_max_angle(const std::vector<Vec>& vs, const std::vector<Vec>& dirs) {
    if (vs.size() != dirs.size()) return 180.0;
    std::vector<int> perm(dirs.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double worst = 0.0;
        for (size_t i = 0; i < vs.size(); ++i) worst = std::max(worst, angle_between(vs[i], dirs[perm[i]]) * kDeg);
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Mixture for the structural map checks, recentered. Cluster c holds points i with i % (d+1) == c.
struct MixtureInstance {
    DiscreteMeasure m;
    std::vector<Vec> clusters;  // cluster means in recentered coordinates
};

MixtureInstance mixture_instance(int d, int n, std::uint64_t seed) {
    MeasureSpec spec;
    spec.kind = MeasureKind::SimplexMixture;
    spec.dim = d;
    spec.n = n;
    spec.seed = seed;
    spec.params["sigma"] = 0.01;
    DiscreteMeasure raw = generate_measure(spec);
    MixtureInstance mi;
    mi.m = anchor_witness(raw, centre_budget(d, raw.size(), seed)).m;
    mi.clusters.assign(d + 1, Vec::Zero(d));
    std::vector<int> cnt(d + 1, 0);
    for (size_t i = 0; i < mi.m.size(); ++i) {
        mi.clusters[i % (d + 1)] += mi.m.point(i);
        ++cnt[i % (d + 1)];
    }
    for (int c = 0; c <= d; ++c) mi.clusters[c] /= cnt[c];
    return mi;
}

double tmap_level(int d) { return 1.0 / (d + 1) + 0.5 / (3.0 * (d + 1) * (d + 1) * (d + 1)); }

// Regular cone around +z (d = 3) or +y (d = 2) with an axisymmetric measure inside it; points
// outside are the mirror images through the origin.
struct AxisInstance {
    DiscreteMeasure m;
    SimplicialCone B;
    Vec axis;
};

AxisInstance axis_instance(int d, int per_orbit, std::uint64_t seed) {
    AxisInstance a;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    a.axis = Vec::Zero(d);
    a.axis[d - 1] = 1.0;
    a.B.apex = Vec::Zero(d);
    const double s = 0.5, c = std::sqrt(0.75);  // facet tilt
    std::vector<Mat> group;                      // symmetries of the cone
    if (d == 2) {
        Vec n1(2), n2(2);
        n1 << c, -s;
        n2 << -c, -s;
        a.B.constraints = {HalfSpace::through_origin(n1), HalfSpace::through_origin(n2)};
        Mat I = Mat::Identity(2, 2), F = I;
        F(0, 0) = -1.0;
        group = {I, F};
    } else {
        for (int j = 0; j < 3; ++j) {
            const double t = 2.0 * kPi * j / 3.0;
            Vec nj(3);
            nj << c * std::cos(t), c * std::sin(t), -s;
            a.B.constraints.push_back(HalfSpace::through_origin(nj));
        }
        Mat F = Mat::Identity(3, 3);
        F(1, 1) = -1.0;
        for (int j = 0; j < 3; ++j) {
            const double t = 2.0 * kPi * j / 3.0;
            Mat Rz = Mat::Identity(3, 3);
            Rz(0, 0) = std::cos(t);
            Rz(0, 1) = -std::sin(t);
            Rz(1, 0) = std::sin(t);
            Rz(1, 1) = std::cos(t);
            group.push_back(Rz);
            group.push_back(Rz * F);
        }
    }
    std::vector<Vec> pts;
    while (static_cast<int>(pts.size()) < per_orbit * static_cast<int>(group.size())) {
        Vec x(d);
        for (int i = 0; i < d; ++i) x[i] = 2.0 * u01(rng) - 1.0;
        x[d - 1] = u01(rng);
        if (!cone_contains(a.B, x, -1e-3) || x.norm() < 0.05) continue;  // strictly inside
        for (const auto& g : group) pts.push_back(g * x);
    }
    const size_t inside = pts.size();
    for (size_t i = 0; i < inside; ++i) pts.push_back(-pts[i]);
    a.m = make_measure(pts, std::vector<double>(pts.size(), 1.0));
    return a;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

bool Report::passed() const { return failures() == 0; }

long Report::failures() const {
    return std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.gating && !r.pass; });
}

void append(Report& dst, const Report& src) { dst.rows.insert(dst.rows.end(), src.rows.begin(), src.rows.end()); }

Row at_least(Row r, double expected, double observed) {
    r.expected = expected;
    r.observed = observed;
    r.slack = observed - expected;
    r.pass = r.slack >= -kCheckTol;
    return r;
}

Row at_most(Row r, double expected, double observed) {
    r.expected = expected;
    r.observed = observed;
    r.slack = expected - observed;
    r.pass = r.slack >= -kCheckTol;
    return r;
}

Row strictly_above(Row r, double expected, double observed) {
    r = at_least(r, expected, observed);
    r.pass = r.slack > 0.0;
    return r;
}

Row strictly_below(Row r, double expected, double observed) {
    r = at_most(r, expected, observed);
    r.pass = r.slack > 0.0;
    return r;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"rado", "theorem1", "bmes", "bijection", "central", "tmap"};
    return names;
}

bool is_suite(const std::string& name) {
    const auto& v = suite_names();
    return std::find(v.begin(), v.end(), name) != v.end();
}

Report run_suite(const std::string& name, const SuiteParams& p) {
    if (name == "rado") return rado_suite(p);
    if (name == "theorem1") return theorem1_suite(p);
    if (name == "bmes") return bmes_suite(p);
    if (name == "bijection") return bijection_suite(p);
    if (name == "central") return central_suite(p);
    if (name == "tmap") return tmap_suite(p);
    fail(Error::Kind::InvalidArgument, "unknown suite '" + name + "'");
}

MedianBudget rado_budget(int d, std::uint64_t seed) {
    MedianBudget b;
    b.seed = seed;
    if (d <= 2) {
        b.exact_search = true;
        b.starts = 4;
    } else if (d >= 4) {
        // exact depth in R^4 is the cost driver; one certified candidate
        b.starts = 2;
        b.directions = 256;
        b.refine_iters = 120;
        b.certify = 1;
    }
    return b;
}

Report rado_suite(const SuiteParams& p) {
    static const MeasureKind kinds[] = {MeasureKind::Gaussian, MeasureKind::UniformBall, MeasureKind::SimplexMixture,
                                        MeasureKind::CrossPolytope};
    const auto dims = dims_or(p, {2, 3, 4});
    const int per = count_or(p, 50);
    const int n = p.n > 0 ? p.n : 500;
    const size_t total = dims.size() * static_cast<size_t>(per);
    auto parts = parallel_map(total, p.threads, [&](size_t idx) {
        const int d = dims[idx / per];
        const int k = static_cast<int>(idx % per);
        const MeasureKind kind = kinds[k % 4];
        MeasureSpec spec;
        spec.kind = kind;
        spec.dim = d;
        spec.n = n;
        spec.seed = derive_seed(p.seed, "rado", d * 100000ULL + k);
        spec.params["sigma"] = 0.05;
        DiscreteMeasure m = generate_measure(spec);
        MedianResult med = tukey_median(m, rado_budget(d, spec.seed));
        Row r = named(base_row("rado", "d" + std::to_string(d) + "-" + pad(k) + "-" + to_string(kind), d, n, spec.seed),
                      "median_depth");
        return std::vector<Row>{at_least(r, 1.0 / (d + 1) - 2.0 / n, med.depth)};
    });
    return flatten(std::move(parts));
}

Report theorem1_suite(const SuiteParams& p) {
    struct Inst {
        MeasureKind kind;
        double sigma;
    };
    static const Inst family[] = {
        {MeasureKind::SimplexMixture, 0.01}, {MeasureKind::SimplexMixture, 0.05}, {MeasureKind::SimplexMixture, 0.1},
        {MeasureKind::CrossPolytope, 0.01},  {MeasureKind::CrossPolytope, 0.05},  {MeasureKind::CrossPolytope, 0.1},
        {MeasureKind::Gaussian, 1.0},        {MeasureKind::Gaussian, 1.0},        {MeasureKind::Gaussian, 1.0},
        {MeasureKind::UniformBall, 1.0},     {MeasureKind::UniformBall, 1.0},     {MeasureKind::UniformBall, 1.0}};
    const int count = count_or(p, 12);
    const int d = 3;
    const double rado = line_rado_threshold(d) - 0.02;
    const double improved = line_improved_threshold(d) - 0.02;
    auto parts = parallel_map(static_cast<size_t>(count), p.threads, [&](size_t k) {
        const Inst& in = family[k % 12];
        const int n = p.n > 0 ? p.n : 150 + 10 * static_cast<int>(k % 6);
        MeasureSpec spec;
        spec.kind = in.kind;
        spec.dim = d;
        spec.n = n;
        spec.seed = derive_seed(p.seed, "theorem1", k);
        spec.params["sigma"] = in.sigma;
        DiscreteMeasure m = generate_measure(spec);
        LineSearchParams lp;
        lp.grid_count = p.grid_count;
        lp.refine_top = p.refine_top;
        lp.seed = spec.seed;
        LineSearchResult res = deep_line_search(m, lp);
        std::string id = "m" + pad(static_cast<int>(k)) + "-" + to_string(in.kind);
        Row r = base_row("theorem1", id, d, n, spec.seed);
        std::vector<Row> out;
        out.push_back(at_least(named(r, "line_depth_rado"), rado, res.depth));
        Row imp = at_least(named(r, "line_depth_improved"), improved, res.depth);
        imp.gating = false;  // heuristic search: per-instance shortfalls are recorded
        out.push_back(imp);
        return out;
    });
    Report rep = flatten(std::move(parts));
    long hits = std::count_if(rep.rows.begin(), rep.rows.end(),
                              [](const Row& r) { return r.check == "line_depth_improved" && r.pass; });
    Row agg = named(base_row("theorem1", "all", d, 0, p.seed), "improved_count");
    rep.rows.push_back(at_least(agg, std::ceil(10.0 * count / 12.0), static_cast<double>(hits)));
    return rep;
}

Report bmes_suite(const SuiteParams& p) {
    const int count = count_or(p, 20);
    auto parts = parallel_map(static_cast<size_t>(count), p.threads, [&](size_t k) {
        WitnessInstance w = witness_instance(p, static_cast<int>(k));
        if (!w.error.empty()) return std::vector<Row>{witness_failure("bmes", w)};
        const double eps = std::isnan(p.eps) ? bmes_eps(w.d) : p.eps;
        Row r = base_row("bmes", w.id, w.d, w.n, w.seed);
        std::vector<Row> out;
        const double eps_max = bmes_eps(w.d);
        if (!(eps > 0.0) || eps > eps_max * (1.0 + 1e-12)) {
            out.push_back(at_most(named(r, "epsilon_precondition"), eps_max, eps));
            out.back().pass = false;  // a nonpositive epsilon also fails
            return out;
        }
        const double wbound = 1.0 / (w.d + 1) + eps;
        Row wr = strictly_below(named(r, "weight_precondition"), wbound, w.weight);
        if (!wr.pass) {
            wr.gating = false;  // outside the lemma's hypotheses: recorded, not asserted
            out.push_back(wr);
            return out;
        }
        out.push_back(wr);
        BmesReport b = bmes_report(w.m, w.A, eps);
        out.push_back(at_least(named(r, "bmes_sum"), b.sum_bound, b.sum));
        double lo = *std::min_element(b.cone_masses.begin(), b.cone_masses.end());
        double hi = *std::max_element(b.cone_masses.begin(), b.cone_masses.end());
        out.push_back(at_least(named(r, "bmes_low"), b.low, lo));
        out.push_back(at_most(named(r, "bmes_high"), b.high, hi));
        return out;
    });
    return flatten(std::move(parts));
}

Report bijection_suite(const SuiteParams& p) {
    const int count = count_or(p, 20);
    auto parts = parallel_map(static_cast<size_t>(count), p.threads, [&](size_t k) {
        PairInstance q = pair_instance(p, static_cast<int>(k));
        if (!q.w.error.empty()) return std::vector<Row>{witness_failure("bijection", q.w)};
        Row r = base_row("bijection", q.w.id, q.w.d, q.w.n, q.w.seed);
        std::vector<Row> out;
        if (!q.matched) {
            Row pr = named(r, "precondition");
            pr.expected = 1.0;
            pr.observed = 0.0;
            pr.slack = -1.0;
            pr.pass = false;
            out.push_back(pr);
            return out;
        }
        const MatchReport& mr = q.match;
        out.push_back(at_least(named(r, "unique_perfect_matching"), 1.0, (mr.perfect && mr.unique) ? 1.0 : 0.0));
        out.push_back(at_most(named(r, "off_matching_max"), mr.edge_threshold, mr.max_off));
        out.push_back(strictly_above(named(r, "matched_min"), mr.matched_bound, mr.min_matched));
        return out;
    });
    return flatten(std::move(parts));
}

Report central_suite(const SuiteParams& p) {
    const int count = count_or(p, 20);
    auto pairs = parallel_map(static_cast<size_t>(count), p.threads, [&](size_t k) {
        PairInstance q = pair_instance(p, static_cast<int>(k));
        std::vector<Row> out;
        if (!q.w.error.empty()) {
            out.push_back(witness_failure("central", q.w));
            return out;
        }
        if (!q.matched || !q.match.perfect) {
            Row pr = named(base_row("central", q.w.id, q.w.d, q.w.n, q.w.seed), "matching");
            pr.expected = 1.0;
            pr.slack = -1.0;
            out.push_back(pr);
            return out;
        }
        auto ca = cones_of(q.w.A).cones;
        auto cb = cones_of(q.B).cones;
        for (int i = 0; i <= q.w.d; ++i) {
            const std::string id = q.w.id + "-c" + std::to_string(i);
            Row r = base_row("central", id, q.w.d, q.w.n, q.w.seed);
            CentralOptions opt;
            opt.seed = derive_seed(q.w.seed, "containment", i);
            try {
                ContainmentReport c = containment_check(q.w.m, ca[i], cb[q.match.sigma[i]], p.rays, opt);
                out.push_back(at_most(named(r, "rays_outside_partner"), 0.0, static_cast<double>(c.rays_outside)));
                out.push_back(at_least(named(r, "central_vectors_in_partner"), 2.0,
                                       static_cast<double>(c.e_b_in_bp) + static_cast<double>(c.e_bp_in_b)));
            } catch (const Error& e) {
                if (e.kind() != Error::Kind::Precondition) throw;
                // the pair is outside the mass hypotheses; recorded only
                Row h = named(r, "mass_hypotheses");
                h.expected = a_zero(q.w.d);
                h.observed = std::max(cone_mass(q.w.m, ca[i]), cone_mass(q.w.m, cb[q.match.sigma[i]]));
                h.slack = h.expected - h.observed;
                h.pass = false;
                h.gating = false;
                out.push_back(h);
            }
        }
        return out;
    });
    Report rep = flatten(std::move(pairs));

    // Axisymmetric instances: the central vector must sit on the symmetry axis.
    std::vector<std::pair<int, int>> jobs;
    for (int d : {2, 3})
        for (int s = 0; s < p.axis_seeds; ++s) jobs.push_back({d, s});
    auto axis = parallel_map(jobs.size(), p.threads, [&](size_t j) {
        const int d = jobs[j].first, s = jobs[j].second;
        const std::uint64_t seed = derive_seed(p.seed, "axis", d * 1000 + s);
        AxisInstance a = axis_instance(d, d == 2 ? 40 : 15, seed);
        CentralVector cv = central_vector(a.m, a.B, p.sphere_samples, seed);
        Row r = base_row("central", "axis-d" + std::to_string(d) + "-" + pad(s), d, static_cast<long>(a.m.size()), seed);
        std::vector<Row> out;
        out.push_back(strictly_below(named(r, "axis_angle_deg"), 2.0, angle_between(cv.e.vec(), a.axis) * kDeg));
        out.push_back(at_most(named(r, "unit_norm_error"), 1e-12, std::abs(cv.e.vec().norm() - 1.0)));
        out.back().pass = out.back().observed <= 1e-12;  // tolerance is the bound itself
        return out;
    });
    append(rep, flatten(std::move(axis)));
    return rep;
}

Report tmap_suite(const SuiteParams& p) {
    const auto dims = dims_or(p, {2, 3});
    const int per = count_or(p, 3);
    auto mixture_n = [&](int d) { return p.n > 0 ? p.n : (d == 2 ? 150 : 160); };
    auto options = [&](std::uint64_t seed) {
        MapOptions o;
        o.seed = seed;
        o.tuple_samples = p.tuple_samples;
        return o;
    };

    const size_t total = dims.size() * static_cast<size_t>(per);
    auto maps = parallel_map(total, p.threads, [&](size_t idx) {
        const int d = dims[idx / per];
        const int k = static_cast<int>(idx % per);
        const std::uint64_t seed = derive_seed(p.seed, "tmap", d * 1000 + k);
        Row r = base_row("tmap", "d" + std::to_string(d) + "-" + pad(k), d, mixture_n(d), seed);
        MixtureInstance mi = mixture_instance(d, mixture_n(d), seed);
        StructuralTuple st;
        try {
            st = structural_map(mi.m, tmap_level(d), options(seed));
        } catch (const Error& e) {
            if (e.kind() != Error::Kind::NotFound && e.kind() != Error::Kind::Precondition) throw;
            return std::vector<Row>{map_failure(r)};
        }
        std::vector<Row> out;
        out.push_back(strictly_above(named(r, "margin"), 0.0, st.margin));
        out.push_back(strictly_below(named(r, "cluster_angle_deg"), 10.0, assignment_max_angle(st.vectors, mi.clusters)));
        return out;
    });
    Report rep = flatten(std::move(maps));

    auto eq = parallel_map(static_cast<size_t>(p.trials), p.threads, [&](size_t t) {
        const int d = dims[t % dims.size()];
        const std::uint64_t seed = derive_seed(p.seed, "equivariance", t);
        MixtureInstance mi = mixture_instance(d, mixture_n(d), seed);
        Mat R = random_rotation(d, seed ^ 0x2545f4914f6cdd1dULL);
        const double a = tmap_level(d);
        Row r = base_row("tmap", "eq" + pad(static_cast<int>(t)) + "-d" + std::to_string(d), d, mixture_n(d), seed);
        StructuralTuple base, rot;
        try {
            base = structural_map(mi.m, a, options(seed));
            rot = structural_map(mi.m.transformed(R), a, options(seed));
        } catch (const Error& e) {
            if (e.kind() != Error::Kind::NotFound && e.kind() != Error::Kind::Precondition) throw;
            return std::vector<Row>{map_failure(r)};
        }
        std::vector<Vec> mapped;
        for (const auto& v : base.vectors) mapped.push_back(R * v);
        return std::vector<Row>{
            strictly_below(named(r, "equivariance_hausdorff"), 0.05, scaled_hausdorff(mapped, rot.vectors))};
    });
    append(rep, flatten(std::move(eq)));
    return rep;
}

}  // namespace depthlab
