// Brute-force depth: try sign patterns in ascending mass order and test each for realizability
// with Fourier-Motzkin elimination. Shares no code with the arrangement engine on purpose.
#include "depthlab/depth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace depthlab {

namespace {

struct Row {
    std::vector<double> a;  // a . u >= b
    double b;
};

constexpr double kFmTol = 1e-10;

// Returns true and fills u when {a_k . u >= b_k} is feasible.
bool fm_solve(std::vector<Row> rows, int dim, std::vector<double>& u) {
    std::vector<std::vector<Row>> stages;
    for (int j = 0; j < dim; ++j) {
        stages.push_back(rows);
        std::vector<Row> pos, neg, next;
        for (auto& r : rows) {
            double c = r.a[j];
            if (std::abs(c) <= kFmTol) {
                next.push_back(r);
                continue;
            }
            double s = std::abs(c);
            for (double& x : r.a) x /= s;
            r.b /= s;
            (c > 0 ? pos : neg).push_back(r);
        }
        for (const auto& p : pos)
            for (const auto& q : neg) {
                Row r{std::vector<double>(dim), p.b + q.b};
                for (int k = 0; k < dim; ++k) r.a[k] = p.a[k] + q.a[k];
                r.a[j] = 0.0;
                next.push_back(std::move(r));
            }
        rows.clear();
        for (auto& r : next) {
            bool empty = true;
            for (int k = j + 1; k < dim; ++k)
                if (std::abs(r.a[k]) > kFmTol) empty = false;
            if (empty) {
                if (r.b > kFmTol) return false;  // 0 >= b with b > 0
                continue;
            }
            rows.push_back(std::move(r));
        }
    }
    // Back substitution: choose each variable inside its interval given the later ones.
    u.assign(dim, 0.0);
    for (int j = dim - 1; j >= 0; --j) {
        double lo = -INFINITY, hi = INFINITY;
        for (const auto& r : stages[j]) {
            double c = r.a[j];
            if (std::abs(c) <= kFmTol) continue;
            double rest = r.b;
            for (int k = j + 1; k < dim; ++k) rest -= r.a[k] * u[k];
            double bound = rest / c;
            if (c > 0)
                lo = std::max(lo, bound);
            else
                hi = std::min(hi, bound);
        }
        if (lo > hi + kFmTol) return false;
        if (std::isinf(lo) && std::isinf(hi))
            u[j] = 0.0;
        else if (std::isinf(lo))
            u[j] = hi - 1.0;
        else if (std::isinf(hi))
            u[j] = lo + 1.0;
        else
            u[j] = 0.5 * (lo + hi);
    }
    return true;
}

}  // namespace

DepthResult depth_oracle(const DiscreteMeasure& m, const Vec& q) {
    if (q.size() != m.dim()) fail(Error::Kind::DimensionMismatch, "depth_oracle: dimension mismatch");
    if (m.size() > 14 || m.dim() > 3) fail(Error::Kind::Limit, "depth_oracle: needs n <= 14 and dim <= 3");
    const int d = m.dim();
    double zero = 0.0;
    std::vector<Vec> ys;
    std::vector<double> ws;
    for (size_t i = 0; i < m.size(); ++i) {
        Vec y = m.point(i) - q;
        if (y.norm() <= 1e-12 * (1.0 + q.norm()))
            zero += m.weight(i);
        else {
            ys.push_back(y);
            ws.push_back(m.weight(i));
        }
    }
    DepthResult r;
    r.mode = DepthMode::Oracle;
    const size_t n = ys.size();
    if (n == 0) {
        r.depth = std::min(1.0, zero);
        r.witness = UnitVector(Vec::Unit(d, 0));
        return r;
    }
    // Subsets S of points strictly on the positive side of u, cheapest first.
    const size_t total = size_t{1} << n;
    std::vector<std::pair<double, size_t>> order(total);
    for (size_t mask = 0; mask < total; ++mask) {
        double s = 0.0;
        for (size_t k = 0; k < n; ++k)
            if (mask >> k & 1) s += ws[k];
        order[mask] = {s, mask};
    }
    std::sort(order.begin(), order.end());
    std::vector<double> u;
    for (const auto& [mass, mask] : order) {
        std::vector<Row> rows;
        for (size_t k = 0; k < n; ++k) {
            double sgn = (mask >> k & 1) ? 1.0 : -1.0;
            Row row{std::vector<double>(d), 1.0};
            for (int c = 0; c < d; ++c) row.a[c] = sgn * ys[k][c];
            rows.push_back(std::move(row));
        }
        if (fm_solve(rows, d, u)) {
            Vec uv = Eigen::Map<Vec>(u.data(), d);
            r.depth = std::min(1.0, zero + mass);
            r.witness = UnitVector(-uv);
            return r;
        }
    }
    fail(Error::Kind::NotFound, "depth_oracle: no realizable sign pattern (numerical failure)");
}

}  // namespace depthlab
