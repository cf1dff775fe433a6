#include "depthlab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace depthlab {

using Kind = Error::Kind;

std::vector<Vec> GeneratingTuple::normals() const {
    std::vector<Vec> out;
    for (const auto& h : halves) out.push_back(h.normal.vec());
    return out;
}

GeneratingTuple tuple_from_normals(const std::vector<Vec>& outer_normals) {
    GeneratingTuple t;
    for (const auto& n : outer_normals) t.halves.push_back(HalfSpace::through_origin(n));
    return t;
}

GeneratingTuple rotate_tuple(const GeneratingTuple& t, const Mat& R) {
    std::vector<Vec> ns;
    for (const auto& h : t.halves) ns.push_back(R * h.normal.vec());
    return tuple_from_normals(ns);
}

InteriorMargin interior_margin(const std::vector<Vec>& vs) {
    InteriorMargin out;
    if (vs.empty()) return out;
    const auto d = vs.front().size();
    if (static_cast<Eigen::Index>(vs.size()) != d + 1) fail(Kind::InvalidArgument, "interior_margin: need d+1 vectors");
    Mat A(d + 1, d + 1);
    for (Eigen::Index j = 0; j <= d; ++j) {
        if (vs[j].size() != d) fail(Kind::DimensionMismatch, "interior_margin: dimension mismatch");
        A.block(0, j, d, 1) = vs[j];
        A(d, j) = 1.0;
    }
    Eigen::FullPivLU<Mat> lu(A);
    lu.setThreshold(1e-12);
    if (lu.rank() < d + 1) {
        out.margin = 0.0;
        out.lambda.assign(d + 1, 0.0);
        return out;
    }
    Vec rhs = Vec::Zero(d + 1);
    rhs[d] = 1.0;
    Vec lam = lu.solve(rhs);
    out.lambda.assign(lam.data(), lam.data() + lam.size());
    out.margin = lam.minCoeff();
    return out;
}

GeneratingCheck is_generating(const std::vector<HalfSpace>& halves) {
    if (halves.empty()) fail(Kind::InvalidArgument, "is_generating: empty tuple");
    const auto d = halves.front().normal.dim();
    if (static_cast<Eigen::Index>(halves.size()) != d + 1)
        fail(Kind::InvalidArgument, "is_generating: expected " + std::to_string(d + 1) + " half-spaces, got " +
                                        std::to_string(halves.size()));
    std::vector<Vec> ns;
    for (const auto& h : halves) {
        if (h.offset != 0.0) fail(Kind::InvalidArgument, "is_generating: half-spaces must pass through the origin");
        ns.push_back(h.normal.vec());
    }
    auto im = interior_margin(ns);
    return {im.margin >= kGeneratingMargin, im.margin};
}

ConeTuple cones_of(const GeneratingTuple& t) {
    const int d = t.dim();
    if (static_cast<int>(t.halves.size()) != d + 1) fail(Kind::InvalidArgument, "cones_of: tuple needs d+1 halves");
    ConeTuple out;
    for (int i = 0; i <= d; ++i) {
        SimplicialCone B;
        B.apex = Vec::Zero(d);
        for (int j = 0; j <= d; ++j)
            if (j != i) B.constraints.push_back(t.halves[j]);
        try {
            B.validate();
        } catch (const Error&) {
            fail(Kind::InvalidArgument, "cones_of: normals of cone " + std::to_string(i) + " are linearly dependent");
        }
        out.cones.push_back(std::move(B));
    }
    return out;
}

double tuple_weight(const DiscreteMeasure& m, const GeneratingTuple& t) {
    if (t.dim() != m.dim()) fail(Kind::DimensionMismatch, "tuple_weight: dimension mismatch");
    double mn = 1.0;
    for (const auto& h : t.halves) mn = std::min(mn, halfspace_mass(m, h));
    return std::clamp(1.0 - mn, 0.0, 1.0);
}

BmesReport bmes_report(const DiscreteMeasure& m, const GeneratingTuple& t, double eps) {
    const int d = t.dim();
    if (d != m.dim()) fail(Kind::DimensionMismatch, "bmes_report: dimension mismatch");
    const double eps_max = 1.0 / ((d + 1.0) * (2.0 * d + 1.0));
    if (!(eps > 0.0) || eps > eps_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "bmes_report: epsilon " << eps << " outside (0, " << eps_max << "]";
        fail(Kind::Precondition, os.str());
    }
    BmesReport r;
    r.d = d;
    r.eps = eps;
    r.weight = tuple_weight(m, t);
    const double base = 1.0 / (d + 1);
    if (!(r.weight < base + eps)) {
        std::ostringstream os;
        os << "bmes_report: tuple weight " << r.weight << " is not below 1/(d+1) + eps = " << base + eps;
        fail(Kind::Precondition, os.str());
    }
    auto ct = cones_of(t);
    for (const auto& B : ct.cones) {
        r.cone_masses.push_back(cone_mass(m, B));
        r.sum += r.cone_masses.back();
    }
    r.sum_bound = 1.0 - (d + 1) * eps;
    r.sum_slack = r.sum - r.sum_bound;
    r.sum_pass = r.sum_slack > 0;
    r.low = base - (2.0 * d + 1) * eps;
    r.high = base + eps;
    r.range_slack = INFINITY;
    for (double x : r.cone_masses) r.range_slack = std::min({r.range_slack, x - r.low, r.high - x});
    r.range_pass = r.range_slack > 0;
    return r;
}

double cone_pair_mass(const DiscreteMeasure& m, const SimplicialCone& a, const SimplicialCone& b, double tol) {
    double s = 0.0;
    for (size_t k = 0; k < m.size(); ++k)
        if (cone_contains(a, m.point(k), tol) && cone_contains(b, m.point(k), tol)) s += m.weight(k);
    return std::min(1.0, s);
}

namespace {

// Kuhn's augmenting paths on a dense (d+1) x (d+1) adjacency matrix.
bool augment(int u, const std::vector<std::vector<bool>>& adj, std::vector<int>& match_right,
             std::vector<bool>& seen) {
    for (size_t v = 0; v < adj[u].size(); ++v) {
        if (!adj[u][v] || seen[v]) continue;
        seen[v] = true;
        if (match_right[v] < 0 || augment(match_right[v], adj, match_right, seen)) {
            match_right[v] = u;
            return true;
        }
    }
    return false;
}

}  // namespace

MatchReport match_tuples(const DiscreteMeasure& m, const GeneratingTuple& A, const GeneratingTuple& B, double eps,
                         double edge_threshold) {
    const int d = A.dim();
    if (B.dim() != d || m.dim() != d) fail(Kind::DimensionMismatch, "match_tuples: dimension mismatch");
    const double eps_max = 1.0 / ((d + 1.0) * (3.0 * d + 2.0));
    if (!(eps > 0.0) || eps > eps_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "match_tuples: epsilon " << eps << " outside (0, " << eps_max << "]";
        fail(Kind::Precondition, os.str());
    }
    const double base = 1.0 / (d + 1);
    for (const auto* t : {&A, &B}) {
        double w = tuple_weight(m, *t);
        if (!(w < base + eps)) {
            std::ostringstream os;
            os << "match_tuples: tuple weight " << w << " is not below 1/(d+1) + eps = " << base + eps;
            fail(Kind::Precondition, os.str());
        }
    }
    auto ca = cones_of(A), cb = cones_of(B);
    MatchReport r;
    r.epsilon_used = eps;
    r.edge_threshold = edge_threshold;
    r.masses = Mat::Zero(d + 1, d + 1);
    std::vector<std::vector<bool>> adj(d + 1, std::vector<bool>(d + 1));
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
            r.masses(i, j) = cone_pair_mass(m, ca.cones[i], cb.cones[j]);
            adj[i][j] = r.masses(i, j) > edge_threshold;
        }
    std::vector<int> match_right(d + 1, -1);
    int size = 0;
    for (int u = 0; u <= d; ++u) {
        std::vector<bool> seen(d + 1, false);
        if (augment(u, adj, match_right, seen)) ++size;
    }
    r.perfect = size == d + 1;
    r.sigma.assign(d + 1, -1);
    for (int v = 0; v <= d; ++v)
        if (match_right[v] >= 0) r.sigma[match_right[v]] = v;
    r.matched_bound = base - (3.0 * d + 2) * eps;
    r.min_matched = INFINITY;
    r.max_off = 0.0;
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
            if (r.perfect && r.sigma[i] == j)
                r.min_matched = std::min(r.min_matched, r.masses(i, j));
            else
                r.max_off = std::max(r.max_off, r.masses(i, j));
        }
    if (!r.perfect) r.min_matched = 0.0;
    r.unique = r.perfect && r.max_off <= edge_threshold;
    r.bound_pass = r.perfect && r.min_matched > r.matched_bound;
    return r;
}

GeneratingTuple permute_tuple(const GeneratingTuple& t, const std::vector<int>& perm) {
    GeneratingTuple out;
    for (int p : perm) out.halves.push_back(t.halves.at(p));
    return out;
}

OrderedFamily build_ordered_family(const DiscreteMeasure& m, double a, const std::vector<GeneratingTuple>& tuples,
                                   double edge_threshold) {
    if (tuples.empty()) fail(Kind::InvalidArgument, "build_ordered_family: empty family");
    const int d = tuples.front().dim();
    const double lo = 1.0 / (d + 1), hi = a_zero(d);
    if (!(a > lo && a < hi)) {
        std::ostringstream os;
        os << "build_ordered_family: level " << a << " outside (" << lo << ", " << hi << ")";
        fail(Kind::Precondition, os.str());
    }
    for (size_t k = 0; k < tuples.size(); ++k) {
        double w = tuple_weight(m, tuples[k]);
        if (w > a) {
            std::ostringstream os;
            os << "build_ordered_family: tuple " << k << " has weight " << w << " > a = " << a;
            fail(Kind::Precondition, os.str());
        }
    }
    // Weights <= a < a0, so every pair satisfies the matching lemma with eps = a0 - 1/(d+1).
    const double eps = hi - lo;
    OrderedFamily fam;
    fam.level = a;
    fam.reference_index = 0;
    std::vector<int> id(d + 1);
    std::iota(id.begin(), id.end(), 0);
    fam.tuples.push_back(tuples.front());
    fam.perms.push_back(id);
    for (size_t k = 1; k < tuples.size(); ++k) {
        auto rep = match_tuples(m, tuples.front(), tuples[k], eps, edge_threshold);
        if (!rep.perfect || !rep.unique) {
            std::ostringstream os;
            os << "build_ordered_family: tuple " << k << " has no unique perfect matching with the reference";
            fail(Kind::NotFound, os.str());
        }
        fam.tuples.push_back(permute_tuple(tuples[k], rep.sigma));
        fam.perms.push_back(rep.sigma);
    }
    const double bound = r2_bound(d);
    std::vector<ConeTuple> cones;
    for (const auto& t : fam.tuples) cones.push_back(cones_of(t));
    for (size_t p = 0; p < cones.size(); ++p)
        for (size_t q = p + 1; q < cones.size(); ++q)
            for (int i = 0; i <= d; ++i) {
                double x = cone_pair_mass(m, cones[p].cones[i], cones[q].cones[i]);
                fam.min_r2_mass = std::min(fam.min_r2_mass, x);
                if (!(x > bound)) {
                    std::ostringstream os;
                    os << "build_ordered_family: (R2) fails for tuples " << p << " and " << q << " at cone " << i
                       << ": mass " << x << " <= " << bound;
                    fail(Kind::Precondition, os.str());
                }
            }
    return fam;
}

GeneratingTuple canonical_order(const GeneratingTuple& t) {
    std::vector<int> perm(t.halves.size());
    std::iota(perm.begin(), perm.end(), 0);
    auto ns = t.normals();
    std::sort(perm.begin(), perm.end(), [&](int a, int b) {
        return std::lexicographical_compare(ns[a].data(), ns[a].data() + ns[a].size(), ns[b].data(),
                                            ns[b].data() + ns[b].size());
    });
    return permute_tuple(t, perm);
}

}  // namespace depthlab
