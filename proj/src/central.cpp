#include "depthlab/central.hpp"

#include "depthlab/depth.hpp"
#include "depthlab/median.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace depthlab {

namespace {

using Kind = Error::Kind;

// Coordinates on the affine cross-section {x : <c, x> = 1}: x = c + P y.
struct Section {
    Vec c;
    Mat P;  // d x (d-1), orthonormal, orthogonal to c
    Vec lift(const Vec& y) const { return c + P * y; }
};

Section make_section(const Vec& c) {
    Section s;
    s.c = c.normalized();
    Mat Q(c.size(), 1);
    Q.col(0) = s.c;
    s.P = complete_basis(Q).rightCols(c.size() - 1);
    return s;
}

// Half-space of the section induced by <n, x> <= 0: <P^T n, y> <= -<n, c>.
struct Cut {
    Vec a;
    double b;
};

Cut section_cut(const Section& s, const Vec& n) { return {s.P.transpose() * n, -n.dot(s.c)}; }

using Poly = std::vector<Vec>;

Poly clip_poly(const Poly& poly, const Cut& h) {
    Poly out;
    const size_t k = poly.size();
    if (k == 0) return out;
    const double scale = h.a.norm();
    if (scale < 1e-15) return h.b >= 0 ? poly : Poly{};
    for (size_t i = 0; i < k; ++i) {
        const Vec& p = poly[i];
        const Vec& q = poly[(i + 1) % k];
        double fp = (h.a.dot(p) - h.b) / scale, fq = (h.a.dot(q) - h.b) / scale;
        bool inp = fp <= 1e-14, inq = fq <= 1e-14;
        if (inp) out.push_back(p);
        if (inp != inq && k > 1) out.push_back(p + (fp / (fp - fq)) * (q - p));
    }
    Poly dedup;
    for (const auto& v : out)
        if (dedup.empty() || (v - dedup.back()).norm() > 1e-14) dedup.push_back(v);
    while (dedup.size() > 1 && (dedup.front() - dedup.back()).norm() <= 1e-14) dedup.pop_back();
    return dedup;
}

// 1-dimensional sections are intervals; store them as a two-point polygon.
Poly clip_interval(const Poly& iv, const Cut& h) {
    if (iv.empty()) return iv;
    double lo = iv[0][0], hi = iv[1][0];
    double a = h.a[0];
    if (std::abs(a) < 1e-15) return h.b >= 0 ? iv : Poly{};
    double bound = h.b / a;
    if (a > 0)
        hi = std::min(hi, bound);
    else
        lo = std::max(lo, bound);
    if (lo > hi + 1e-14) return {};
    Vec l(1), r(1);
    l << lo;
    r << std::max(lo, hi);
    return {l, r};
}

std::vector<Vec> points_in(const DiscreteMeasure& m, const SimplicialCone& B, std::vector<double>* w = nullptr) {
    std::vector<Vec> out;
    for (size_t i = 0; i < m.size(); ++i)
        if (cone_contains(B, m.point(i))) {
            out.push_back(m.point(i));
            if (w) w->push_back(m.weight(i));
        }
    return out;
}

// Uniform direction in the spherical cap of angular radius rho around unit axis c.
template <class Rng>
Vec cap_sample(const Vec& c, const Mat& P, double rho, Rng& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int d = static_cast<int>(c.size());
    if (d == 2) {
        double th = (2.0 * U(rng) - 1.0) * rho;
        return std::cos(th) * c + std::sin(th) * P.col(0);
    }
    // d == 3: height uniform on [cos rho, 1] gives uniform area.
    double z = 1.0 - U(rng) * (1.0 - std::cos(rho));
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = 2.0 * std::numbers::pi * U(rng);
    return z * c + r * (std::cos(phi) * P.col(0) + std::sin(phi) * P.col(1));
}

struct CapSampler {
    Vec c;
    Mat P;
    double rho = 0.0;
};

CapSampler cap_for(const CentralConeApprox& C) {
    Vec c = Vec::Zero(C.axis.size());
    for (const auto& r : C.rays) c += r;
    c.normalize();
    double rho = 0.0;
    for (const auto& r : C.rays) rho = std::max(rho, angle_between(c, r));
    CapSampler s;
    s.c = c;
    Mat Q(c.size(), 1);
    Q.col(0) = c;
    s.P = complete_basis(Q).rightCols(c.size() - 1);
    s.rho = std::min(std::numbers::pi, rho * (1.0 + 1e-9) + 1e-12);
    return s;
}

}  // namespace

double default_central_t(int d) { return static_cast<double>(d) / (d + 1); }

bool CentralConeApprox::contains(const Vec& x, double tol) const {
    if (x.size() != axis.size()) fail(Kind::DimensionMismatch, "central cone: dimension mismatch");
    if (rays.empty()) return false;
    for (const auto& n : facets)
        if (n.dot(x) > tol * std::max(1.0, x.norm())) return false;
    return axis.dot(x) >= -tol;
}

CentralConeApprox central_cone(const DiscreteMeasure& m, const SimplicialCone& B, double t, int samples,
                               std::uint64_t seed) {
    const int d = m.dim();
    if (B.dim() != d) fail(Kind::DimensionMismatch, "central_cone: dimension mismatch");
    if (d < 2 || d > 3) fail(Kind::Limit, "central_cone: supported for d = 2 and d = 3");
    if (!(t > (d - 1.0) / d && t <= 1.0)) {
        std::ostringstream os;
        os << "central_cone: t = " << t << " outside ((d-1)/d, 1]";
        fail(Kind::InvalidArgument, os.str());
    }
    B.validate();
    std::vector<double> w;
    auto pts = points_in(m, B, &w);
    double mass = 0.0;
    for (double x : w) mass += x;
    if (!(mass > 0.0)) fail(Kind::Precondition, "central_cone: the cone has zero mass");

    CentralConeApprox C;
    C.base = B;
    C.t = t;
    C.base_mass = mass;
    C.axis = B.dual_axis();

    // Candidate normals: sampled directions, then normals of hyperplanes through 0 and d-1 points of B.
    std::vector<Vec> cand;
    if (samples > 0)
        for (const auto& u : sample_directions(d, samples, seed, SampleMode::Sphere)) cand.push_back(u.vec());
    if (d == 2) {
        for (const auto& p : pts) {
            Vec n(2);
            n << -p[1], p[0];
            if (n.norm() > 1e-12) cand.push_back(n.normalized());
        }
    } else {
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j) {
                Eigen::Vector3d a = pts[i], b = pts[j];
                Eigen::Vector3d n = a.cross(b);
                if (n.norm() > 1e-12 * a.norm() * b.norm()) cand.push_back(Vec(n.normalized()));
            }
    }
    const double need = t * mass - 1e-12;
    auto keep = [&](const Vec& n) {
        double s = 0.0;
        for (size_t k = 0; k < pts.size(); ++k)
            if (n.dot(pts[k]) <= kDefaultTol) s += w[k];
        return s >= need;
    };
    const size_t sampled = samples > 0 ? static_cast<size_t>(samples) : 0;
    for (size_t k = 0; k < cand.size(); ++k) {
        if (keep(cand[k])) C.constraints.push_back(HalfSpace::through_origin(cand[k]));
        // Exact candidates are tried with both orientations.
        if (k >= sampled && keep(-cand[k])) C.constraints.push_back(HalfSpace::through_origin(-cand[k]));
    }

    // Cross-section of B intersected with every retained constraint.
    Section s = make_section(C.axis);
    Poly poly;
    for (const auto& r : B.extreme_rays()) poly.push_back(s.P.transpose() * (r / C.axis.dot(r)));
    if (d == 2) {
        double lo = std::min(poly[0][0], poly[1][0]), hi = std::max(poly[0][0], poly[1][0]);
        Vec l(1), r(1);
        l << lo;
        r << hi;
        poly = {l, r};
    }
    auto apply = [&](const Vec& n) {
        Cut h = section_cut(s, n);
        poly = d == 2 ? clip_interval(poly, h) : clip_poly(poly, h);
    };
    for (const auto& h : B.constraints) apply(h.normal.vec());
    for (const auto& h : C.constraints) {
        if (poly.empty()) break;
        apply(h.normal.vec());
    }
    for (const auto& y : poly) C.rays.push_back(s.lift(y).normalized());
    // Facet normals through the origin, oriented away from the cone.
    if (d == 2 && C.rays.size() == 2) {
        for (int k = 0; k < 2; ++k) {
            const Vec& r = C.rays[k];
            Vec n(2);
            n << -r[1], r[0];
            if (n.dot(C.rays[1 - k]) > 0 || (n.dot(C.rays[1 - k]) == 0 && n.dot(C.axis) > 0)) n = -n;
            C.facets.push_back(n);
        }
    } else if (d == 3 && C.rays.size() >= 3) {
        Vec inside = Vec::Zero(3);
        for (const auto& r : C.rays) inside += r;
        for (size_t k = 0; k < C.rays.size(); ++k) {
            Eigen::Vector3d a = C.rays[k], b = C.rays[(k + 1) % C.rays.size()];
            Eigen::Vector3d n = a.cross(b);
            if (n.norm() < 1e-15) continue;
            Vec nv = n.normalized();
            if (nv.dot(inside) > 0) nv = -nv;
            C.facets.push_back(nv);
        }
    } else if (d == 3 && !C.rays.empty()) {
        // Degenerate (lower-dimensional) section: fall back to the full constraint list.
        for (const auto& h : B.constraints) C.facets.push_back(h.normal.vec());
        for (const auto& h : C.constraints) C.facets.push_back(h.normal.vec());
    }
    return C;
}

std::vector<Vec> sample_cone_rays(const CentralConeApprox& C, long count, std::uint64_t seed) {
    std::vector<Vec> out;
    if (C.rays.empty() || count <= 0) return out;
    CapSampler cs = cap_for(C);
    std::mt19937_64 rng(seed);
    long guard = 0;
    const long limit = std::max<long>(1000000, 1000 * count);
    while (static_cast<long>(out.size()) < count && guard++ < limit) {
        Vec x = cap_sample(cs.c, cs.P, cs.rho, rng);
        if (C.contains(x)) out.push_back(x);
    }
    return out;
}

CentralVector central_vector(const CentralConeApprox& C, long sphere_samples, std::uint64_t seed) {
    if (sphere_samples < 1) fail(Kind::InvalidArgument, "central_vector: sphere_samples must be positive");
    if (C.rays.empty()) fail(Kind::NotFound, "central_vector: the central cone approximation is empty");
    const int d = static_cast<int>(C.axis.size());
    CapSampler cs = cap_for(C);
    std::mt19937_64 rng(seed);
    Vec sum = Vec::Zero(d), sq = Vec::Zero(d);
    long acc = 0;
    for (long k = 0; k < sphere_samples; ++k) {
        Vec x = cap_sample(cs.c, cs.P, cs.rho, rng);
        if (!C.contains(x)) continue;
        sum += x;
        sq += x.cwiseProduct(x);
        ++acc;
    }
    if (acc == 0) {
        std::ostringstream os;
        os << "central_vector: none of " << sphere_samples << " sphere samples fell in the central cone";
        fail(Kind::NotFound, os.str());
    }
    CentralVector out;
    Vec mean = sum / static_cast<double>(acc);
    Vec var = (sq / static_cast<double>(acc) - mean.cwiseProduct(mean)).cwiseMax(0.0);
    out.e = UnitVector(mean);
    out.angular_se = std::sqrt(var.sum() / static_cast<double>(acc)) / mean.norm();
    out.accepted = acc;
    out.drawn = sphere_samples;
    return out;
}

CentralVector central_vector(const DiscreteMeasure& m, const SimplicialCone& B, long sphere_samples,
                             std::uint64_t seed, int constraint_samples) {
    auto C = central_cone(m, B, default_central_t(m.dim()), constraint_samples, seed);
    return central_vector(C, sphere_samples, seed ^ 0x6a09e667f3bcc909ULL);
}

ContainmentReport containment_check(const DiscreteMeasure& m, const SimplicialCone& B, const SimplicialCone& Bp,
                                    long rays, const CentralOptions& opt) {
    const int d = m.dim();
    ContainmentReport r;
    r.mass_b = cone_mass(m, B);
    r.mass_bp = cone_mass(m, Bp);
    r.mass_both = cone_pair_mass(m, B, Bp);
    r.max_bound = a_zero(d);
    r.both_bound = r2_bound(d);
    if (std::max(r.mass_b, r.mass_bp) > r.max_bound || r.mass_both < r.both_bound) {
        std::ostringstream os;
        os << "containment_check: hypotheses fail (masses " << r.mass_b << ", " << r.mass_bp << " vs max "
           << r.max_bound << "; intersection " << r.mass_both << " vs " << r.both_bound << ")";
        fail(Kind::Precondition, os.str());
    }
    const double t = default_central_t(d);
    r.inner_chain = r.mass_both >= t * r.mass_bp - 1e-12 && r.mass_both >= t * r.mass_b - 1e-12;
    auto C = central_cone(m, B, t, opt.constraint_samples, opt.seed);
    auto Cp = central_cone(m, Bp, t, opt.constraint_samples, opt.seed);
    for (const auto& x : sample_cone_rays(Cp, rays, opt.seed ^ 0x1)) {
        ++r.rays_checked;
        if (!cone_contains(B, x)) ++r.rays_outside;
    }
    for (const auto& x : sample_cone_rays(C, rays, opt.seed ^ 0x2)) {
        ++r.rays_checked;
        if (!cone_contains(Bp, x)) ++r.rays_outside;
    }
    auto e = central_vector(C, opt.sphere_samples, opt.seed ^ 0x3);
    auto ep = central_vector(Cp, opt.sphere_samples, opt.seed ^ 0x4);
    r.e_b_in_bp = cone_contains(Bp, e.e.vec());
    r.e_bp_in_b = cone_contains(B, ep.e.vec());
    return r;
}

Vec CentralCache::get(const SimplicialCone& B) {
    std::vector<bool> key(m_.size());
    for (size_t i = 0; i < m_.size(); ++i) key[i] = cone_contains(B, m_.point(i));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Vec e = central_vector(m_, B, opt_.sphere_samples, opt_.seed, opt_.constraint_samples).e.vec();
    cache_.emplace(std::move(key), e);
    return e;
}

Membership family_membership(const DiscreteMeasure& m, double a, const OrderedFamily& family,
                             const std::vector<Vec>& normals) {
    const int d = m.dim();
    Membership out;
    if (static_cast<int>(normals.size()) != d + 1) fail(Kind::InvalidArgument, "family_membership: need d+1 normals");
    out.tuple = tuple_from_normals(normals);
    if (!is_generating(out.tuple.halves).generating) return out;
    out.weight = tuple_weight(m, out.tuple);
    if (out.weight > a) return out;
    const double eps = a_zero(d) - 1.0 / (d + 1);
    const double bound = r2_bound(d);
    try {
        for (const auto& ref : family.tuples) {
            auto rep = match_tuples(m, ref, out.tuple, eps);
            if (!rep.perfect || !rep.unique) return out;
            for (int i = 0; i <= d; ++i)
                if (rep.sigma[i] != i || !(rep.masses(i, i) > bound)) return out;
        }
    } catch (const Error&) {
        return out;  // degenerate cones
    }
    out.member = true;
    return out;
}

Vec e_component(const DiscreteMeasure& m, double a, const OrderedFamily& family, const std::vector<Vec>& normals,
                int i, CentralCache* cache, const CentralOptions& opt) {
    const int d = m.dim();
    if (i < 0 || i > d) fail(Kind::InvalidArgument, "e_component: index out of range");
    auto mem = family_membership(m, a, family, normals);
    if (!mem.member || mem.weight >= a) return Vec::Zero(d);
    auto cones = cones_of(mem.tuple);
    Vec e = cache ? cache->get(cones.cones[i])
                  : central_vector(m, cones.cones[i], opt.sphere_samples, opt.seed, opt.constraint_samples).e.vec();
    return (a - mem.weight) * e;
}

namespace {

// Exponential map at unit c of tangent vector v.
Vec exp_map(const Vec& c, const Vec& v) {
    double r = v.norm();
    if (r < 1e-15) return c;
    return std::cos(r) * c + std::sin(r) * (v / r);
}

double sphere_area(int d) {
    // Surface area of S^{d-1}.
    return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

// Density of exp_c(N(0, s^2 I_{d-1})) relative to the normalized uniform measure on S^{d-1}.
double perturb_density(const Vec& c, const Vec& n, double s) {
    const int d = static_cast<int>(c.size());
    double r = angle_between(c, n);
    if (r >= std::numbers::pi - 1e-9) return 0.0;
    double gauss = std::exp(-0.5 * r * r / (s * s)) / std::pow(2.0 * std::numbers::pi * s * s, (d - 1) / 2.0);
    double jac = r < 1e-12 ? 1.0 : std::pow(r / std::sin(r), d - 2);
    return gauss * jac * sphere_area(d);
}

}  // namespace

StructuralTuple structural_map(const DiscreteMeasure& m, double a, const MapOptions& opt) {
    const int d = m.dim();
    if (d < 2 || d > 3) fail(Kind::Limit, "structural_map: supported for d = 2 and d = 3");
    const double lo = 1.0 / (d + 1), a0 = a_zero(d);
    if (!(a > lo && a < a0)) {
        std::ostringstream os;
        os << "structural_map: a = " << a << " outside (" << lo << ", " << a0 << ")";
        fail(Kind::InvalidArgument, os.str());
    }
    if (opt.tuple_samples < 1) fail(Kind::InvalidArgument, "structural_map: tuple_samples must be positive");
    const Vec origin = Vec::Zero(d);
    StructuralTuple out;
    out.depth = point_depth_exact(m, origin).depth;
    if (out.depth >= a) {
        std::ostringstream os;
        os << "structural_map: depth of the origin " << out.depth << " is not below a = " << a;
        fail(Kind::Precondition, os.str());
    }
    auto wit = witness_tuple(m, origin, 1e-9);
    out.reference = wit.tuple;
    auto family = build_ordered_family(m, a, {wit.tuple});
    const auto centers = wit.tuple.normals();

    CentralOptions copt;
    copt.constraint_samples = opt.constraint_samples;
    copt.sphere_samples = opt.sphere_samples;
    copt.seed = opt.seed ^ 0xbb67ae8584caa73bULL;
    CentralCache cache(m, copt);

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> G(0.0, opt.perturb_scale);
    std::vector<Mat> tangent;
    for (const auto& c : centers) {
        Mat Q(d, 1);
        Q.col(0) = c;
        tangent.push_back(complete_basis(Q).rightCols(d - 1));
    }
    std::vector<Vec> acc(d + 1, Vec::Zero(d));
    std::vector<Vec> normals(d + 1);
    for (long s = 0; s < opt.tuple_samples; ++s) {
        bool uniform = U(rng) >= opt.perturb_share;
        for (int i = 0; i <= d; ++i) {
            if (uniform) {
                normals[i] = random_unit(d, rng);
            } else {
                Vec v(d - 1);
                for (int k = 0; k < d - 1; ++k) v[k] = G(rng);
                normals[i] = exp_map(centers[i], tangent[i] * v).normalized();
            }
        }
        auto mem = family_membership(m, a, family, normals);
        if (!mem.member || mem.weight >= a) continue;
        double ratio = 1.0;
        for (int i = 0; i <= d; ++i) ratio *= perturb_density(centers[i], normals[i], opt.perturb_scale);
        double W = 1.0 / ((1.0 - opt.perturb_share) + opt.perturb_share * ratio);
        auto cones = cones_of(mem.tuple);
        for (int i = 0; i <= d; ++i) acc[i] += W * (a - mem.weight) * cache.get(cones.cones[i]);
        ++out.nonzero;
        if (uniform) ++out.uniform_nonzero;
    }
    if (out.nonzero == 0) {
        std::ostringstream os;
        os << "structural_map: no nonzero contribution in " << opt.tuple_samples
           << " tuple samples (depth " << out.depth << " < a; sampling too coarse)";
        fail(Kind::NotFound, os.str());
    }
    for (auto& v : acc) out.vectors.push_back(v / static_cast<double>(opt.tuple_samples));
    out.margin = interior_margin(out.vectors).margin;
    return out;
}

double scaled_hausdorff(const std::vector<Vec>& A, const std::vector<Vec>& B) {
    auto scaled = [](const std::vector<Vec>& X) {
        double mx = 0.0;
        for (const auto& v : X) mx = std::max(mx, v.norm());
        std::vector<Vec> out;
        for (const auto& v : X) out.push_back(mx > 0 ? Vec(v / mx) : v);
        return out;
    };
    auto a = scaled(A), b = scaled(B);
    auto directed = [](const std::vector<Vec>& X, const std::vector<Vec>& Y) {
        double h = 0.0;
        for (const auto& x : X) {
            double best = INFINITY;
            for (const auto& y : Y) best = std::min(best, (x - y).norm());
            h = std::max(h, best);
        }
        return h;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace depthlab
