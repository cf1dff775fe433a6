#pragma once

#include "depthlab/geometry.hpp"
#include "depthlab/measures.hpp"

#include <cstdint>
#include <vector>

namespace depthlab {

enum class DepthMode { Exact, Sampled, Oracle };

struct DepthResult {
    double depth = 0.0;
    // Outer normal n of a minimizing closed half-space {x : <n, x - q> <= 0}.
    UnitVector witness;
    DepthMode mode = DepthMode::Exact;
};

inline constexpr int kExactMaxDim = 4;
inline constexpr size_t kExactMaxPoints = 5000;

DepthResult point_depth_exact(const DiscreteMeasure& m, const Vec& q);
DepthResult point_depth_sampled(const DiscreteMeasure& m, const Vec& q, int k, std::uint64_t seed);

struct DepthQuery {
    DepthMode mode = DepthMode::Exact;
    int k = 1000;            // sampled mode
    std::uint64_t seed = 0;  // sampled mode
};
DepthResult point_depth(const DiscreteMeasure& m, const Vec& q, const DepthQuery& how = {});

// Brute force over sign patterns; independent of the exact engine. n <= 14, dim <= 3.
DepthResult depth_oracle(const DiscreteMeasure& m, const Vec& q);

DepthResult flat_depth(const DiscreteMeasure& m, const Flat& f);

// Representatives of every open cell of directions u minimizing mass{<u, x - o> > 0},
// returned as outer normals n = -u, one per cell (averaged over the cell's samples).
struct MinimizingCells {
    double level = 0.0;
    std::vector<Vec> normals;
};
MinimizingCells minimizing_cells(const DiscreteMeasure& m, const Vec& o);

// Fast upper bound on depth from a fixed direction set with sorted projections.
class SampledDepth {
public:
    SampledDepth(const DiscreteMeasure& m, const std::vector<UnitVector>& dirs);
    SampledDepth(const DiscreteMeasure& m, int k, std::uint64_t seed);
    double operator()(const Vec& x) const;
    size_t directions() const { return dirs_.size(); }

private:
    void build(const DiscreteMeasure& m);
    std::vector<Vec> dirs_;
    std::vector<std::vector<double>> proj_;    // sorted projections per direction
    std::vector<std::vector<double>> prefix_;  // prefix weight sums aligned with proj_
};

}  // namespace depthlab
