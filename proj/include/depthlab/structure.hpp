#pragma once

#include "depthlab/geometry.hpp"
#include "depthlab/measures.hpp"

#include <string>
#include <vector>

namespace depthlab {

// d+1 origin half-spaces whose intersection is {0}.
struct GeneratingTuple {
    std::vector<HalfSpace> halves;
    int dim() const { return halves.empty() ? 0 : static_cast<int>(halves.front().normal.dim()); }
    std::vector<Vec> normals() const;
};

GeneratingTuple tuple_from_normals(const std::vector<Vec>& outer_normals);
GeneratingTuple rotate_tuple(const GeneratingTuple& t, const Mat& R);

// Interior margin of 0 in conv{v_1..v_{d+1}}: the barycentric weights lambda with sum 1 and
// sum lambda_i v_i = 0, and min lambda_i. Negative or zero when 0 is not interior.
struct InteriorMargin {
    double margin = -1.0;
    std::vector<double> lambda;
};
InteriorMargin interior_margin(const std::vector<Vec>& vs);

struct GeneratingCheck {
    bool generating = false;
    double margin = -1.0;
};
inline constexpr double kGeneratingMargin = 1e-9;
GeneratingCheck is_generating(const std::vector<HalfSpace>& halves);

struct ConeTuple {
    std::vector<SimplicialCone> cones;
};
ConeTuple cones_of(const GeneratingTuple& t);

double tuple_weight(const DiscreteMeasure& m, const GeneratingTuple& t);

inline double a_zero(int d) { return 1.0 / (d + 1) + 1.0 / (3.0 * (d + 1) * (d + 1) * (d + 1)); }
inline double r2_bound(int d) { return 1.0 / (d + 1) - (3.0 * d + 2) / (3.0 * (d + 1) * (d + 1) * (d + 1)); }

struct BmesReport {
    int d = 0;
    double eps = 0.0;
    double weight = 0.0;
    std::vector<double> cone_masses;
    double sum = 0.0;
    double sum_bound = 0.0;  // 1 - (d+1) eps
    double low = 0.0;        // 1/(d+1) - (2d+1) eps
    double high = 0.0;       // 1/(d+1) + eps
    bool sum_pass = false;
    double sum_slack = 0.0;
    bool range_pass = false;
    double range_slack = 0.0;  // min over cones of the distance to the nearer bound
    bool passed() const { return sum_pass && range_pass; }
};
BmesReport bmes_report(const DiscreteMeasure& m, const GeneratingTuple& t, double eps);

inline constexpr double kEdgeThreshold = 1e-6;

struct MatchReport {
    std::vector<int> sigma;  // cone i of A pairs with cone sigma[i] of B
    Mat masses;              // masses(i, j) = mass(A_i ∩ B_j)
    double epsilon_used = 0.0;
    double edge_threshold = kEdgeThreshold;
    bool perfect = false;
    bool unique = false;          // every off-matching mass <= threshold
    double max_off = 0.0;
    double min_matched = 0.0;
    double matched_bound = 0.0;   // 1/(d+1) - (3d+2) eps
    bool bound_pass = false;
    bool passed() const { return perfect && unique && bound_pass; }
};
MatchReport match_tuples(const DiscreteMeasure& m, const GeneratingTuple& A, const GeneratingTuple& B, double eps,
                         double edge_threshold = kEdgeThreshold);

// Mass of the intersection of two closed cones.
double cone_pair_mass(const DiscreteMeasure& m, const SimplicialCone& a, const SimplicialCone& b,
                      double tol = kDefaultTol);

// Reorders halves so that new half i is old half perm[i].
GeneratingTuple permute_tuple(const GeneratingTuple& t, const std::vector<int>& perm);

struct OrderedFamily {
    std::vector<GeneratingTuple> tuples;  // reordered consistently with tuples[reference_index]
    double level = 0.0;
    int reference_index = 0;
    std::vector<std::vector<int>> perms;  // perms[k][i]: original index of half i in tuple k
    double min_r2_mass = 1.0;
};
OrderedFamily build_ordered_family(const DiscreteMeasure& m, double a, const std::vector<GeneratingTuple>& tuples,
                                   double edge_threshold = kEdgeThreshold);

// Reference ordering for tests: halves sorted lexicographically by normal.
GeneratingTuple canonical_order(const GeneratingTuple& t);

}  // namespace depthlab
