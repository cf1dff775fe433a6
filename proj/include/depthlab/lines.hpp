#pragma once

#include "depthlab/median.hpp"

#include <cstdint>

namespace depthlab {

struct ProfileResult {
    double a = 0.0;  // best median depth in the projection along the direction
    Vec median;      // in the coordinates of the projected space
    Vec anchor;      // lifted back to the ambient space (a point on the line)
};

ProfileResult direction_profile(const DiscreteMeasure& m, const Direction& dir, const MedianBudget& budget = {});

struct LineSearchParams {
    int grid_count = 2000;
    int refine_iters = 6;   // shrinking-neighbourhood rounds
    int refine_top = 6;     // scan winners that get refined
    int neighbours = 10;    // perturbed directions per round
    std::uint64_t seed = 0;
};

struct LineSearchResult {
    Direction direction;
    Vec anchor;
    double depth = 0.0;
    int iterations = 0;
    bool exact = false;  // depth of the final line certified by the exact planar engine
    double rado = 0.0;
    double improved = 0.0;
};

// Thresholds for lines in R^dim: 1/dim and 1/dim + 1/(3 dim^3).
inline double line_rado_threshold(int dim) { return 1.0 / dim; }
inline double line_improved_threshold(int dim) { return 1.0 / dim + 1.0 / (3.0 * dim * dim * dim); }

LineSearchResult deep_line_search(const DiscreteMeasure& m, const LineSearchParams& params = {});

}  // namespace depthlab
