#include "depthlab/depth.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace depthlab {

namespace {

using Kind = Error::Kind;

constexpr double kPeriod = 4.0;  // pseudo-angle period
constexpr double kAngleTol = 1e-11;
constexpr double kSubspaceTol = 1e-10;
constexpr double kValueTol = 1e-12;

// Nonzero unit vectors with weights, stored row-major.
struct Cloud {
    int dim = 0;
    std::vector<double> x;
    std::vector<double> w;
    size_t n() const { return w.size(); }
    const double* at(size_t i) const { return x.data() + i * dim; }
    void push(const double* v, double wt) {
        x.insert(x.end(), v, v + dim);
        w.push_back(wt);
    }
};

// Called with (value, u) for candidate optimal cells at the outermost level.
using Sink = std::function<void(double, const Vec&)>;

struct OpenMin {
    double value = 0.0;
    Vec u;
};

struct Event {
    double angle;
    double delta;
};

// LSD radix sort by angle in [0, 4), quantized to 48 bits (far below the tie tolerance).
void radix_sort_angles(std::vector<Event>& a, std::vector<Event>& tmp) {
    const size_t n = a.size();
    thread_local std::vector<std::uint64_t> keys_tls, kt_tls;
    auto& keys = keys_tls;
    auto& kt = kt_tls;
    keys.resize(n);
    kt.resize(n);
    tmp.resize(n);
    for (size_t i = 0; i < n; ++i) keys[i] = static_cast<std::uint64_t>(a[i].angle * 70368744177664.0);  // 2^46
    for (int shift = 0; shift < 48; shift += 8) {
        size_t count[257] = {0};
        for (size_t i = 0; i < n; ++i) ++count[((keys[i] >> shift) & 0xff) + 1];
        for (int b = 0; b < 256; ++b) count[b + 1] += count[b];
        for (size_t i = 0; i < n; ++i) {
            size_t pos = count[(keys[i] >> shift) & 0xff]++;
            tmp[pos] = a[i];
            kt[pos] = keys[i];
        }
        a.swap(tmp);
        keys.swap(kt);
    }
}

// Diamond pseudo-angle in [0, 4): monotone in the polar angle, quarter turns add exactly 1.
double pseudo_angle(double x, double y) {
    double t = std::abs(x) + std::abs(y);
    double p = y >= 0 ? (x >= 0 ? y / t : 1.0 - x / t) : (x < 0 ? 2.0 - y / t : 3.0 + x / t);
    return p >= 4.0 ? p - 4.0 : p;
}

Vec pseudo_to_vec(double p) {
    p = std::fmod(p, 4.0);
    if (p < 0) p += 4.0;
    int q = std::min(3, static_cast<int>(p));
    double f = p - q;
    double x, y;
    switch (q) {
        case 0: x = 1.0 - f; y = f; break;
        case 1: x = -f; y = 1.0 - f; break;
        case 2: x = f - 1.0; y = -f; break;
        default: x = f; y = f - 1.0; break;
    }
    Vec v(2);
    v << x, y;
    return v.normalized();
}

// Minimum over open arcs of the circle of sum{w : <u, p> > 0}; p are nonzero 2D vectors.
// Returns the value and the arc-midpoint direction; optionally reports every optimal arc.
double sweep_circle(const std::vector<double>& xy, const std::vector<double>& w, Vec& best_dir,
                    std::vector<std::pair<double, Vec>>* arcs) {
    const size_t n = w.size();
    if (n == 0) {
        best_dir = Vec::Unit(2, 0);
        if (arcs) arcs->push_back({0.0, best_dir});
        return 0.0;
    }
    // u sees p on its positive side on the open arc (phi - 1, phi + 1) in pseudo-angle units.
    // Sort the point angles once; both event lists are rotations of that order.
    struct Buffers {
        std::vector<Event> ph, ea, eb, ev, scratch;
    };
    thread_local Buffers tls;
    Buffers& buf = tls;  // one TLS lookup instead of one per access
    auto& ph = buf.ph;
    auto& ea = buf.ea;
    auto& eb = buf.eb;
    auto& ev = buf.ev;
    ph.clear();
    for (size_t k = 0; k < n; ++k) ph.push_back({pseudo_angle(xy[2 * k], xy[2 * k + 1]), w[k]});
    radix_sort_angles(ph, buf.scratch);
    auto cmp = [](const Event& p, const Event& q) { return p.angle < q.angle; };
    const size_t s1 = std::lower_bound(ph.begin(), ph.end(), Event{1.0, 0.0}, cmp) - ph.begin();
    const size_t s3 = std::lower_bound(ph.begin(), ph.end(), Event{3.0, 0.0}, cmp) - ph.begin();
    ea.resize(n);
    eb.resize(n);
    size_t t = 0;
    for (size_t k = s1; k < n; ++k) ea[t++] = {ph[k].angle - 1.0, ph[k].delta};
    for (size_t k = 0; k < s1; ++k) ea[t++] = {ph[k].angle + 3.0, ph[k].delta};
    t = 0;
    for (size_t k = s3; k < n; ++k) eb[t++] = {ph[k].angle - 3.0, -ph[k].delta};
    for (size_t k = 0; k < s3; ++k) eb[t++] = {ph[k].angle + 1.0, -ph[k].delta};
    ev.resize(2 * n);
    std::merge(ea.begin(), ea.end(), eb.begin(), eb.end(), ev.begin(), cmp);
    const size_t m = ev.size();
    // Start right after the widest circular gap so that no tie group wraps around.
    size_t start = 0;
    double widest = -1.0;
    for (size_t i = 0; i < m; ++i) {
        double next = (i + 1 < m) ? ev[i + 1].angle : ev[0].angle + kPeriod;
        double gap = next - ev[i].angle;
        if (gap > widest) {
            widest = gap;
            start = (i + 1) % m;
        }
    }
    double theta0 = ev[start].angle - 0.5 * widest;
    Vec u0 = pseudo_to_vec(theta0);
    double count = 0.0;
    for (size_t k = 0; k < n; ++k) count += (u0[0] * xy[2 * k] + u0[1] * xy[2 * k + 1] > 0) ? w[k] : 0.0;

    double best = count;
    double best_theta = theta0;
    struct Arc {
        double value, mid;
    };
    thread_local std::vector<Arc> all_tls;
    auto& all = all_tls;
    all.clear();
    if (arcs) all.push_back({count, theta0});

    // Linearize: rotate so the sweep starts at ev[start], unwrapping angles past the period.
    std::rotate(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(start), ev.end());
    for (size_t k = m - start; k < m && start > 0; ++k) ev[k].angle += kPeriod;
    size_t i = 0;
    while (i < m) {
        double group_end = ev[i].angle;
        size_t j = i;
        while (j < m && ev[j].angle - group_end <= kAngleTol) {
            count += ev[j].delta;
            group_end = ev[j].angle;
            ++j;
        }
        if (j >= m) break;  // the arc after the last group is the starting arc
        double mid = 0.5 * (group_end + ev[j].angle);
        if (count < best - kValueTol) {
            best = count;
            best_theta = mid;
        }
        if (arcs) all.push_back({count, mid});
        i = j;
    }
    best_dir = pseudo_to_vec(best_theta);
    if (arcs)
        for (const auto& a : all)
            if (a.value <= best + kValueTol) arcs->push_back({a.value, pseudo_to_vec(a.mid)});
    return best;
}

// Orthonormal columns spanning the vectors in rows idx of c; empty if dependent.
bool span_basis(const Cloud& c, const std::vector<size_t>& idx, Mat& Q) {
    Q.resize(c.dim, static_cast<Eigen::Index>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) {
        Vec v = Eigen::Map<const Vec>(c.at(idx[j]), c.dim);
        for (int pass = 0; pass < 2; ++pass)
            for (size_t t = 0; t < j; ++t) v -= Q.col(t).dot(v) * Q.col(t);
        double nv = v.norm();
        if (nv <= 1e-9) return false;
        Q.col(j) = v / nv;
    }
    return true;
}

OpenMin open_min(const Cloud& c, const Sink* sink);

OpenMin open_min_full_rank(const Cloud& c, const Sink* sink) {
    const int d = c.dim;
    const size_t n = c.n();
    OpenMin res;
    if (d == 1) {
        double pos = 0.0, neg = 0.0;
        for (size_t k = 0; k < n; ++k) (c.x[k] > 0 ? pos : neg) += c.w[k];
        res.u = Vec::Constant(1, pos <= neg ? 1.0 : -1.0);
        res.value = std::min(pos, neg);
        if (sink) {
            if (pos <= neg + kValueTol) (*sink)(pos, Vec::Constant(1, 1.0));
            if (neg <= pos + kValueTol) (*sink)(neg, Vec::Constant(1, -1.0));
        }
        return res;
    }
    if (d == 2) {
        std::vector<std::pair<double, Vec>> arcs;
        res.value = sweep_circle(c.x, c.w, res.u, sink ? &arcs : nullptr);
        if (sink)
            for (auto& [val, u] : arcs) (*sink)(val, u);
        return res;
    }

    // d >= 3: every open cell has an edge, i.e. a relatively open arc of the circle L = M^perp where
    // M is spanned by d-2 of the points. Near such an arc, signs of points off M are fixed by the arc
    // and signs of points inside M are free, so the cell minimum splits into arc part + M part.
    const int s = d - 2;
    res.value = std::numeric_limits<double>::infinity();
    std::vector<size_t> idx(s);
    for (int t = 0; t < s; ++t) idx[t] = t;
    std::vector<double> lxy;
    std::vector<double> lw;
    lxy.reserve(2 * n);
    lw.reserve(n);
    Mat Qm;
    Cloud mc;
    mc.dim = s;
    std::vector<std::pair<double, Vec>> arcs;
    std::vector<double> tmp(s);
    while (true) {
        if (span_basis(c, idx, Qm)) {
            Mat Q = complete_basis(Qm);
            Mat Ql = Q.rightCols(2);
            lxy.clear();
            lw.clear();
            mc.x.clear();
            mc.w.clear();
            for (size_t k = 0; k < n; ++k) {
                const double* y = c.at(k);
                double a = 0.0, b = 0.0;
                for (int r = 0; r < d; ++r) {
                    a += Ql(r, 0) * y[r];
                    b += Ql(r, 1) * y[r];
                }
                if (a * a + b * b > kSubspaceTol * kSubspaceTol) {
                    lxy.push_back(a);
                    lxy.push_back(b);
                    lw.push_back(c.w[k]);
                } else {
                    double nn = 0.0;
                    for (int t = 0; t < s; ++t) {
                        double v = 0.0;
                        for (int r = 0; r < d; ++r) v += Qm(r, t) * y[r];
                        tmp[t] = v;
                        nn += v * v;
                    }
                    nn = std::sqrt(nn);
                    for (int t = 0; t < s; ++t) tmp[t] /= nn;
                    mc.push(tmp.data(), c.w[k]);
                }
            }
            OpenMin inner = open_min(mc, nullptr);
            Vec dir2;
            arcs.clear();
            double arc_val = sweep_circle(lxy, lw, dir2, sink ? &arcs : nullptr);
            double total = arc_val + inner.value;
            auto lift = [&](const Vec& t) {
                double cw = t[0], sw = t[1];
                double eps = 1.0;
                for (size_t k = 0; k < lw.size(); ++k)
                    eps = std::min(eps, std::abs(cw * lxy[2 * k] + sw * lxy[2 * k + 1]));
                Vec u = cw * Ql.col(0) + sw * Ql.col(1) + 0.5 * eps * (Qm * inner.u);
                return Vec(u.normalized());
            };
            if (total < res.value - kValueTol) {
                res.value = total;
                res.u = lift(dir2);
            }
            if (sink)
                for (auto& [val, mid] : arcs)
                    if (val + inner.value <= res.value + kValueTol) (*sink)(val + inner.value, lift(mid));
        }
        // next combination
        int t = s - 1;
        while (t >= 0 && idx[t] == n - s + t) --t;
        if (t < 0) break;
        ++idx[t];
        for (int r = t + 1; r < s; ++r) idx[r] = idx[r - 1] + 1;
    }
    return res;
}

OpenMin open_min(const Cloud& c, const Sink* sink) {
    const int d = c.dim;
    const size_t n = c.n();
    if (n == 0) {
        OpenMin r;
        r.value = 0.0;
        r.u = Vec::Unit(d, 0);
        if (sink) (*sink)(0.0, r.u);
        return r;
    }
    if (d == 1) return open_min_full_rank(c, sink);
    if (n <= static_cast<size_t>(d)) {
        // Independent vectors: the single all-negative cell has value 0.
        Mat Y(static_cast<Eigen::Index>(n), d);
        for (size_t k = 0; k < n; ++k)
            for (int r = 0; r < d; ++r) Y(k, r) = c.at(k)[r];
        Mat G = Y * Y.transpose();
        Eigen::LDLT<Mat> ldlt(G);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
            ldlt.vectorD().minCoeff() > kSubspaceTol * kSubspaceTol) {
            OpenMin r;
            r.value = 0.0;
            r.u = (-(Y.transpose() * ldlt.solve(Vec::Ones(static_cast<Eigen::Index>(n))))).normalized();
            if (sink) (*sink)(0.0, r.u);
            return r;
        }
    }
    // Reduce to the span of the points when they are not full rank.
    Mat Y(static_cast<Eigen::Index>(n), d);
    for (size_t k = 0; k < n; ++k)
        for (int r = 0; r < d; ++r) Y(k, r) = c.at(k)[r];
    Eigen::JacobiSVD<Mat> svd(Y, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > kSubspaceTol) ++rank;
    if (rank >= d) return open_min_full_rank(c, sink);
    Mat V = svd.matrixV().leftCols(rank);
    Cloud r;
    r.dim = rank;
    std::vector<double> tmp(rank);
    for (size_t k = 0; k < n; ++k) {
        Vec y = Eigen::Map<const Vec>(c.at(k), d);
        Vec z = V.transpose() * y;
        z.normalize();
        for (int t = 0; t < rank; ++t) tmp[t] = z[t];
        r.push(tmp.data(), c.w[k]);
    }
    Sink lifted;
    if (sink) lifted = [&](double v, const Vec& u) { (*sink)(v, V * u); };
    OpenMin sub = open_min(r, sink ? &lifted : nullptr);
    OpenMin out;
    out.value = sub.value;
    out.u = (V * sub.u).normalized();
    return out;
}

struct Prepared {
    Cloud cloud;
    std::vector<size_t> index;  // original point index of each cloud row
    double zero_mass = 0.0;
};

Prepared prepare(const DiscreteMeasure& m, const Vec& q) {
    if (q.size() != m.dim()) fail(Kind::DimensionMismatch, "point_depth: dimension mismatch");
    Prepared p;
    p.cloud.dim = m.dim();
    const double ztol = 1e-12 * (1.0 + q.norm());
    for (size_t i = 0; i < m.size(); ++i) {
        Vec y = m.point(i) - q;
        double ny = y.norm();
        if (ny <= ztol) {
            p.zero_mass += m.weight(i);
            continue;
        }
        y /= ny;
        p.cloud.push(y.data(), m.weight(i));
        p.index.push_back(i);
    }
    return p;
}

// Closed mass of {x : <u, x - q> >= 0} for a generic u, summed in index order.
double attained(const DiscreteMeasure& m, const Vec& q, const Vec& u) {
    const double ztol = 1e-12 * (1.0 + q.norm());
    double s = 0.0;
    for (size_t i = 0; i < m.size(); ++i) {
        Vec y = m.point(i) - q;
        if (y.norm() <= ztol || u.dot(y) > 0) s += m.weight(i);
    }
    return std::min(1.0, s);
}

void check_exact_limits(const DiscreteMeasure& m) {
    if (m.dim() > kExactMaxDim)
        fail(Kind::Limit, "exact depth supports dim <= 4 (got " + std::to_string(m.dim()) + ")");
    if (m.size() > kExactMaxPoints)
        fail(Kind::Limit, "exact depth supports n <= 5000 (got " + std::to_string(m.size()) + ")");
}

}  // namespace

DepthResult point_depth_exact(const DiscreteMeasure& m, const Vec& q) {
    check_exact_limits(m);
    Prepared p = prepare(m, q);
    OpenMin om = open_min(p.cloud, nullptr);
    DepthResult r;
    r.mode = DepthMode::Exact;
    r.depth = attained(m, q, om.u);
    r.witness = UnitVector(-om.u);
    return r;
}

MinimizingCells minimizing_cells(const DiscreteMeasure& m, const Vec& o) {
    check_exact_limits(m);
    Prepared p = prepare(m, o);
    std::vector<std::pair<double, Vec>> seen;
    double best = std::numeric_limits<double>::infinity();
    Sink sink = [&](double v, const Vec& u) {
        if (v < best - kValueTol) {
            best = v;
            std::erase_if(seen, [&](const auto& e) { return e.first > best + kValueTol; });
        }
        if (v <= best + kValueTol) seen.push_back({v, u});
    };
    OpenMin om = open_min(p.cloud, &sink);
    best = std::min(best, om.value);

    // Group by sign vector; a cell is convex, so the normalized average of its samples stays inside.
    std::map<std::vector<bool>, std::pair<Vec, std::vector<Vec>>> cells;
    const size_t n = p.cloud.n();
    for (const auto& [v, u] : seen) {
        if (v > best + kValueTol) continue;
        std::vector<bool> key(n);
        for (size_t k = 0; k < n; ++k) key[k] = Eigen::Map<const Vec>(p.cloud.at(k), p.cloud.dim).dot(u) > 0;
        auto& slot = cells[key];
        if (slot.second.empty()) slot.first = Vec::Zero(u.size());
        slot.first += u;
        slot.second.push_back(u);
    }
    MinimizingCells out;
    out.level = p.zero_mass + best;
    for (auto& [key, acc] : cells) {
        Vec u = acc.first;
        bool ok = u.norm() > 1e-9;
        if (ok) {
            u.normalize();
            for (size_t k = 0; k < n && ok; ++k) {
                double s = Eigen::Map<const Vec>(p.cloud.at(k), p.cloud.dim).dot(u);
                ok = (s > 0) == key[k] && std::abs(s) > 0;
            }
        }
        if (!ok) u = acc.second.front();
        out.normals.push_back(-u);
    }
    return out;
}

SampledDepth::SampledDepth(const DiscreteMeasure& m, const std::vector<UnitVector>& dirs) {
    for (const auto& u : dirs) dirs_.push_back(u.vec());
    build(m);
}

SampledDepth::SampledDepth(const DiscreteMeasure& m, int k, std::uint64_t seed) {
    for (const auto& u : sample_directions(m.dim(), k, seed, SampleMode::Sphere)) dirs_.push_back(u.vec());
    build(m);
}

void SampledDepth::build(const DiscreteMeasure& m) {
    proj_.resize(dirs_.size());
    prefix_.resize(dirs_.size());
    std::vector<std::pair<double, double>> tmp(m.size());
    for (size_t j = 0; j < dirs_.size(); ++j) {
        for (size_t i = 0; i < m.size(); ++i) tmp[i] = {dirs_[j].dot(m.point(i)), m.weight(i)};
        std::sort(tmp.begin(), tmp.end());
        auto& pr = proj_[j];
        auto& pf = prefix_[j];
        pr.resize(m.size());
        pf.resize(m.size() + 1);
        pf[0] = 0.0;
        for (size_t i = 0; i < m.size(); ++i) {
            pr[i] = tmp[i].first;
            pf[i + 1] = pf[i] + tmp[i].second;
        }
    }
}

double SampledDepth::operator()(const Vec& x) const {
    double best = 1.0;
    for (size_t j = 0; j < dirs_.size(); ++j) {
        const auto& pr = proj_[j];
        const auto& pf = prefix_[j];
        double t = dirs_[j].dot(x);
        size_t lo = std::lower_bound(pr.begin(), pr.end(), t - 1e-12) - pr.begin();
        size_t hi = std::upper_bound(pr.begin(), pr.end(), t + 1e-12) - pr.begin();
        double below = pf[hi];                // projections <= t
        double above = pf.back() - pf[lo];    // projections >= t
        best = std::min(best, std::min(below, above));
    }
    return std::max(0.0, best);
}

DepthResult point_depth_sampled(const DiscreteMeasure& m, const Vec& q, int k, std::uint64_t seed) {
    if (q.size() != m.dim()) fail(Kind::DimensionMismatch, "point_depth: dimension mismatch");
    if (k < 1) fail(Kind::InvalidArgument, "point_depth: sampled mode needs k >= 1");
    auto dirs = sample_directions(m.dim(), k, seed, SampleMode::Sphere);
    double best = 2.0;
    Vec best_u;
    for (const auto& u : dirs) {
        double s = 0.0;
        for (size_t i = 0; i < m.size(); ++i)
            if (u.vec().dot(m.point(i) - q) >= -1e-12) s += m.weight(i);
        if (s < best) {
            best = s;
            best_u = u.vec();
        }
    }
    DepthResult r;
    r.mode = DepthMode::Sampled;
    r.depth = std::min(1.0, best);
    r.witness = UnitVector(-best_u);
    return r;
}

DepthResult point_depth(const DiscreteMeasure& m, const Vec& q, const DepthQuery& how) {
    switch (how.mode) {
        case DepthMode::Exact: return point_depth_exact(m, q);
        case DepthMode::Sampled: return point_depth_sampled(m, q, how.k, how.seed);
        case DepthMode::Oracle: return depth_oracle(m, q);
    }
    fail(Kind::InvalidArgument, "point_depth: unknown mode");
}

DepthResult flat_depth(const DiscreteMeasure& m, const Flat& f) {
    if (f.ambient() != m.dim()) fail(Kind::DimensionMismatch, "flat_depth: dimension mismatch");
    Mat C = complement_basis(f);
    DiscreteMeasure pm = project_measure(m, f);
    Vec o = project_point(f.base, C);
    DepthResult r = point_depth_exact(pm, o);
    // Report the witness in ambient coordinates; it is orthogonal to the flat.
    r.witness = UnitVector(C * r.witness.vec());
    return r;
}

}  // namespace depthlab
