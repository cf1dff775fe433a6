#pragma once

#include "depthlab/depth.hpp"
#include "depthlab/measures.hpp"
#include "depthlab/structure.hpp"

#include <cstdint>
#include <vector>

namespace depthlab {

enum class MedianMode { Arrangement, Multistart, Grid };

struct MedianBudget {
    MedianMode mode = MedianMode::Multistart;
    std::uint64_t seed = 0;
    int starts = 8;          // multistart: random starts on top of centroid and coordinate median
    int directions = 512;    // sampled directions steering the local search
    int refine_iters = 200;  // pattern-search steps per start
    int grid = 9;            // grid mode: points per axis
    int certify = 4;         // best local optima certified with exact depth
    bool exact_search = false;  // steer the search with exact depth (cheap in the plane)
    double min_step = 1e-6;     // pattern search stops below min_step * initial step
};

struct MedianResult {
    Vec point;
    double depth = 0.0;
    long candidates_evaluated = 0;
    bool exact = true;  // depth computed by the exact engine
};

MedianResult tukey_median(const DiscreteMeasure& m, const MedianBudget& budget = {});

struct NormalSet {
    std::vector<UnitVector> normals;
    double level = 0.0;
};

NormalSet min_normal_set(const DiscreteMeasure& m, const Vec& o, double tol);

inline constexpr double kLambdaMin = 1e-6;

struct WitnessResult {
    GeneratingTuple tuple;   // origin-anchored relative to o
    double margin = 0.0;
    double depth = 0.0;
    std::vector<Vec> minimizing;  // the chosen normals from the minimizing set
};

// Throws Error(NotFound) with the best margin in the message when no subtuple qualifies.
WitnessResult witness_tuple(const DiscreteMeasure& m, const Vec& o, double tol);

struct Recentered {
    DiscreteMeasure measure;
    MedianResult median;  // point is the original location of the median
};
Recentered recenter(const DiscreteMeasure& m, const MedianBudget& budget = {});

}  // namespace depthlab
