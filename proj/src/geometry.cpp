#include "depthlab/geometry.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace depthlab {

void fail(Error::Kind k, const std::string& msg) { throw Error(k, msg); }

void require_dims(const Vec& a, const Vec& b, const char* what) {
    if (a.size() != b.size()) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a.size() << " vs " << b.size() << ")";
        fail(Error::Kind::DimensionMismatch, os.str());
    }
}

UnitVector::UnitVector(const Vec& v) {
    if (v.size() < 1) fail(Error::Kind::InvalidArgument, "unit vector: empty");
    if (!v.allFinite()) fail(Error::Kind::InvalidArgument, "unit vector: non-finite coordinate");
    double n = v.norm();
    if (!(n > 0.0)) fail(Error::Kind::InvalidArgument, "unit vector: zero vector");
    v_ = v / n;
}

UnitVector UnitVector::from_unit(const Vec& v) {
    const double nv = v.norm();
    if (!(std::abs(nv - 1.0) <= 1e-9)) fail(Error::Kind::InvalidArgument, "UnitVector::from_unit: norm is not 1");
    UnitVector u;
    u.v_ = std::abs(nv - 1.0) > 1e-12 ? Vec(v / nv) : v;
    return u;
}

Side halfspace_side(const HalfSpace& h, const Vec& x, double tol) {
    require_dims(h.normal.vec(), x, "halfspace_side");
    if (tol < 0) fail(Error::Kind::InvalidArgument, "halfspace_side: negative tolerance");
    double s = h.normal.vec().dot(x) - h.offset;
    if (std::abs(s) <= tol) return Side::Boundary;
    return s < 0 ? Side::Inside : Side::Outside;
}

Flat::Flat(Vec b, std::vector<Vec> dirs) : base(std::move(b)) {
    for (const Vec& d : dirs) {
        require_dims(base, d, "flat");
        basis.emplace_back(d);
    }
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i + 1; j < basis.size(); ++j)
            if (std::abs(basis[i].vec().dot(basis[j].vec())) > 1e-10)
                fail(Error::Kind::InvalidArgument, "flat: basis not orthogonal");
    if (static_cast<Eigen::Index>(basis.size()) >= base.size())
        fail(Error::Kind::InvalidArgument, "flat: k must be below the ambient dimension");
}

Mat complete_basis(const Mat& Q) {
    const Eigen::Index d = Q.rows();
    Mat out(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < Q.cols(); ++j) out.col(k++) = Q.col(j);
    for (Eigen::Index e = 0; e < d && k < d; ++e) {
        Vec v = Vec::Unit(d, e);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < k; ++j) v -= out.col(j).dot(v) * out.col(j);
        double n = v.norm();
        if (n > 1e-6) out.col(k++) = v / n;
    }
    return out;
}

Mat complement_basis(const Flat& f) {
    const Eigen::Index d = f.ambient();
    if (f.k() >= d) fail(Error::Kind::InvalidArgument, "project_point: k >= d");
    Mat Q(d, f.k());
    for (int j = 0; j < f.k(); ++j) Q.col(j) = f.basis[j].vec();
    Mat full = complete_basis(Q);
    return full.rightCols(d - f.k());
}

Vec project_point(const Vec& x, const Mat& complement) {
    if (x.size() != complement.rows())
        fail(Error::Kind::DimensionMismatch, "project_point: dimension mismatch");
    return complement.transpose() * x;
}

Vec project_point(const Vec& x, const Flat& f) {
    require_dims(x, f.base, "project_point");
    return project_point(x, complement_basis(f));
}

Mat SimplicialCone::normal_matrix() const {
    Mat N(constraints.size(), apex.size());
    for (size_t i = 0; i < constraints.size(); ++i) N.row(i) = constraints[i].normal.vec().transpose();
    return N;
}

void SimplicialCone::validate(double tol) const {
    if (static_cast<Eigen::Index>(constraints.size()) != apex.size())
        fail(Error::Kind::InvalidArgument, "simplicial cone: need exactly d constraints");
    for (const auto& h : constraints) require_dims(h.normal.vec(), apex, "simplicial cone");
    if (std::abs(normal_matrix().determinant()) <= tol)
        fail(Error::Kind::InvalidArgument, "simplicial cone: constraint normals are linearly dependent");
}

Vec SimplicialCone::dual_axis() const {
    Vec c = Vec::Zero(apex.size());
    for (const auto& h : constraints) c -= h.normal.vec();
    return c.normalized();
}

std::vector<Vec> SimplicialCone::extreme_rays() const {
    // Column j of -N^{-1} is zero against every constraint but j and negative on j's normal.
    Mat R = -normal_matrix().inverse();
    std::vector<Vec> rays;
    for (Eigen::Index j = 0; j < R.cols(); ++j) rays.push_back(R.col(j).normalized());
    return rays;
}

bool cone_contains(const SimplicialCone& B, const Vec& x, double tol) {
    require_dims(B.apex, x, "cone_contains");
    for (const auto& h : B.constraints)
        if (h.normal.vec().dot(x - B.apex) - h.offset > tol) return false;
    return true;
}

Vec canonical_sign(const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] > 0) return v;
        if (v[i] < 0) return -v;
    }
    return v;
}

Direction::Direction(const Vec& v) : rep_(UnitVector::from_unit(canonical_sign(UnitVector(v).vec()))) {}

namespace {

// Plastic-number generalization: alpha_j = 1/phi_d^j with phi_d the root of x^{d+1} = x + 1.
std::vector<double> kronecker_alphas(int dim) {
    double phi = 2.0;
    for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
    std::vector<double> a(dim);
    for (int j = 0; j < dim; ++j) a[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
    return a;
}

std::vector<UnitVector> grid_directions(int dim, int count) {
    std::vector<UnitVector> out;
    out.reserve(count);
    if (dim == 1) {
        for (int k = 0; k < count; ++k) out.push_back(UnitVector(Vec::Ones(1)));
        return out;
    }
    if (dim == 2) {
        for (int k = 0; k < count; ++k) {
            double t = std::numbers::pi * k / count;
            Vec v(2);
            v << std::cos(t), std::sin(t);
            out.push_back(UnitVector::from_unit(canonical_sign(v)));
        }
        return out;
    }
    if (dim == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            double z = 1.0 - (k + 0.5) / count;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = golden * k;
            Vec v(3);
            v << r * std::cos(phi), r * std::sin(phi), z;
            out.push_back(UnitVector(canonical_sign(v)));
        }
        return out;
    }
    auto alpha = kronecker_alphas(dim);
    for (int k = 0; k < count; ++k) {
        Vec g(dim);
        for (int j = 0; j < dim; ++j) {
            double u = std::fmod(0.5 + alpha[j] * (k + 1), 1.0);
            u = std::clamp(u, 1e-12, 1.0 - 1e-12);
            g[j] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
        }
        if (g.norm() < 1e-12) g = Vec::Unit(dim, 0);
        out.push_back(UnitVector(canonical_sign(g)));
    }
    return out;
}

}  // namespace

std::vector<UnitVector> sample_directions(int dim, int count, std::uint64_t seed, SampleMode mode) {
    if (dim < 1) fail(Error::Kind::InvalidArgument, "sample_directions: dim must be >= 1");
    if (count < 1) fail(Error::Kind::InvalidArgument, "sample_directions: count must be positive");
    if (mode == SampleMode::Grid) return grid_directions(dim, count);
    std::mt19937_64 rng(seed);
    std::vector<UnitVector> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        Vec v = random_unit(dim, rng);
        if (mode == SampleMode::Projective) v = canonical_sign(v);
        out.push_back(UnitVector::from_unit(v));
    }
    return out;
}

double angle_between(const Vec& a, const Vec& b) {
    require_dims(a, b, "angle_between");
    double c = a.dot(b) / (a.norm() * b.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

Mat random_rotation(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) A(i, j) = g(rng);
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ();
    Mat R = qr.matrixQR();
    for (int j = 0; j < dim; ++j)
        if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    if (Q.determinant() < 0) Q.col(0) = -Q.col(0);
    return Q;
}

Mat plane_rotation(const Vec& u, const Vec& v, double angle) {
    const Eigen::Index d = u.size();
    Mat P = Mat::Identity(d, d);
    double c = std::cos(angle), s = std::sin(angle);
    P += (c - 1.0) * (u * u.transpose() + v * v.transpose()) + s * (v * u.transpose() - u * v.transpose());
    return P;
}

}  // namespace depthlab
