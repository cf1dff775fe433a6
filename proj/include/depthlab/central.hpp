#pragma once

#include "depthlab/measures.hpp"
#include "depthlab/structure.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace depthlab {

// Finite-constraint approximation of the central cone C(B). Supported for d = 2, 3.
struct CentralConeApprox {
    SimplicialCone base;
    std::vector<HalfSpace> constraints;  // retained members of H(B, t)
    double t = 0.0;
    Vec axis;                   // dual axis of B; <axis, x> > 0 on B \ {0}
    std::vector<Vec> rays;      // unit generators of the approximation (cross-section vertices)
    std::vector<Vec> facets;    // outer normals of the approximation's facets, through the origin
    double base_mass = 0.0;
    bool contains(const Vec& x, double tol = kDefaultTol) const;
};

double default_central_t(int d);  // d / (d + 1)

CentralConeApprox central_cone(const DiscreteMeasure& m, const SimplicialCone& B, double t, int samples,
                               std::uint64_t seed);

struct CentralVector {
    UnitVector e;
    double angular_se = 0.0;  // standard error of the direction, radians
    long accepted = 0;
    long drawn = 0;
};

// Monte Carlo average of uniform sphere samples in the approximation (cap-restricted proposal).
CentralVector central_vector(const CentralConeApprox& C, long sphere_samples, std::uint64_t seed);
CentralVector central_vector(const DiscreteMeasure& m, const SimplicialCone& B, long sphere_samples,
                             std::uint64_t seed, int constraint_samples = 2000);

// Uniform sample of rays of the approximation.
std::vector<Vec> sample_cone_rays(const CentralConeApprox& C, long count, std::uint64_t seed);

struct ContainmentReport {
    double mass_b = 0.0, mass_bp = 0.0, mass_both = 0.0;
    double max_bound = 0.0;   // a0
    double both_bound = 0.0;  // 1/(d+1) - (3d+2)/(3(d+1)^3)
    long rays_checked = 0;
    long rays_outside = 0;    // rays of C(B') outside B plus rays of C(B) outside B'
    bool e_b_in_bp = false;
    bool e_bp_in_b = false;
    bool inner_chain = false; // mass(B n B') >= d/(d+1) mass(B') and the same with roles swapped
    bool passed() const { return rays_outside == 0 && e_b_in_bp && e_bp_in_b; }
};

struct CentralOptions {
    int constraint_samples = 2000;
    long sphere_samples = 10000;
    std::uint64_t seed = 0;
};

// Throws Error(Precondition) when the two mass hypotheses fail.
ContainmentReport containment_check(const DiscreteMeasure& m, const SimplicialCone& B, const SimplicialCone& Bp,
                                    long rays = 10000, const CentralOptions& opt = {});

// Central vectors keyed by the set of support points inside the cone: C(B) only depends on it.
class CentralCache {
public:
    CentralCache(const DiscreteMeasure& m, CentralOptions opt) : m_(m), opt_(opt) {}
    Vec get(const SimplicialCone& B);
    size_t size() const { return cache_.size(); }

private:
    const DiscreteMeasure& m_;
    CentralOptions opt_;
    std::map<std::vector<bool>, Vec> cache_;
};

// Family membership of the ordered tuple [H(n_1), ..., H(n_{d+1})] at level a.
struct Membership {
    bool member = false;
    double weight = 1.0;
    GeneratingTuple tuple;
};
Membership family_membership(const DiscreteMeasure& m, double a, const OrderedFamily& family,
                             const std::vector<Vec>& normals);

Vec e_component(const DiscreteMeasure& m, double a, const OrderedFamily& family, const std::vector<Vec>& normals,
                int i, CentralCache* cache = nullptr, const CentralOptions& opt = {});

struct MapOptions {
    long tuple_samples = 4000;
    long sphere_samples = 4000;
    int constraint_samples = 1000;
    std::uint64_t seed = 0;
    double perturb_scale = 0.1;   // radians
    double perturb_share = 0.9;   // mixture weight of the perturbation proposal
};

struct StructuralTuple {
    std::vector<Vec> vectors;
    double margin = 0.0;
    long nonzero = 0;          // samples in the family with weight < a
    long uniform_nonzero = 0;  // of those, drawn from the uniform component
    double depth = 0.0;        // depth of the origin
    GeneratingTuple reference;
};

// m must be centred: its median at the origin.
StructuralTuple structural_map(const DiscreteMeasure& m, double a, const MapOptions& opt = {});

// Hausdorff distance between two unordered tuples after scaling each to unit max norm.
double scaled_hausdorff(const std::vector<Vec>& A, const std::vector<Vec>& B);

}  // namespace depthlab
