#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kDefaultTol = 1e-9;

// Raised on any violated precondition; the C API maps it to an error code.
class Error : public std::runtime_error {
public:
    enum class Kind { InvalidArgument, DimensionMismatch, Limit, Precondition, NotFound, Io };
    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

[[noreturn]] void fail(Error::Kind k, const std::string& msg);
void require_dims(const Vec& a, const Vec& b, const char* what);

// A vector whose norm is 1 within 1e-12. Construction normalizes.
class UnitVector {
public:
    UnitVector() = default;
    explicit UnitVector(const Vec& v);
    static UnitVector from_unit(const Vec& v);  // rejects norms off 1 by more than 1e-9
    const Vec& vec() const { return v_; }
    Eigen::Index dim() const { return v_.size(); }
    double operator[](Eigen::Index i) const { return v_[i]; }
    UnitVector operator-() const { return from_unit(-v_); }

private:
    Vec v_;
};

// {x : <normal, x> <= offset}
struct HalfSpace {
    UnitVector normal;
    double offset = 0.0;

    HalfSpace() = default;
    HalfSpace(const UnitVector& n, double off) : normal(n), offset(off) {}
    static HalfSpace through_origin(const Vec& n) { return {UnitVector(n), 0.0}; }
    HalfSpace flipped() const { return {-normal, -offset}; }
};

enum class Side { Inside, Boundary, Outside };

Side halfspace_side(const HalfSpace& h, const Vec& x, double tol = kDefaultTol);

// k-flat: base + span(basis). basis is orthonormal.
struct Flat {
    Vec base;
    std::vector<UnitVector> basis;

    Flat() = default;
    Flat(Vec b, std::vector<Vec> dirs);
    Eigen::Index ambient() const { return base.size(); }
    int k() const { return static_cast<int>(basis.size()); }
};

// Orthonormal basis of the complement of f's direction space, as columns.
// Deterministic: Gram-Schmidt on the flat basis followed by e_1..e_d.
Mat complement_basis(const Flat& f);
Vec project_point(const Vec& x, const Flat& f);
Vec project_point(const Vec& x, const Mat& complement);

struct SimplicialCone {
    Vec apex;
    std::vector<HalfSpace> constraints;

    Eigen::Index dim() const { return apex.size(); }
    Mat normal_matrix() const;  // rows are constraint normals
    void validate(double tol = 1e-10) const;
    // Unit vector c with <c,x> > 0 on the cone minus apex.
    Vec dual_axis() const;
    // Unit generators of the extreme rays.
    std::vector<Vec> extreme_rays() const;
};

bool cone_contains(const SimplicialCone& B, const Vec& x, double tol = kDefaultTol);

// Canonical projective representative: first nonzero coordinate positive.
class Direction {
public:
    Direction() = default;
    explicit Direction(const Vec& v);
    const UnitVector& rep() const { return rep_; }
    const Vec& vec() const { return rep_.vec(); }

private:
    UnitVector rep_;
};

Vec canonical_sign(const Vec& v);

enum class SampleMode { Sphere, Projective, Grid };

std::vector<UnitVector> sample_directions(int dim, int count, std::uint64_t seed, SampleMode mode);

// Uniform point on S^{dim-1} from a generator (Gaussian normalization).
template <class Rng>
Vec random_unit(int dim, Rng& rng);

// Completes the orthonormal columns of Q (d x k, k <= d) to a d x d orthonormal basis.
Mat complete_basis(const Mat& Q);

// Angle in radians between two nonzero vectors.
double angle_between(const Vec& a, const Vec& b);

// Random rotation matrix (Haar), deterministic in seed.
Mat random_rotation(int dim, std::uint64_t seed);
// Rotation by angle (radians) inside the plane spanned by unit u and a unit v orthogonal to it.
Mat plane_rotation(const Vec& u, const Vec& v, double angle);

}  // namespace depthlab

#include <random>

namespace depthlab {
template <class Rng>
Vec random_unit(int dim, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(dim);
    double n2 = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v[i] = g(rng);
        n2 = v.squaredNorm();
    } while (n2 < 1e-300);
    return v / std::sqrt(n2);
}
}  // namespace depthlab
