#pragma once

#include "depthlab/central.hpp"
#include "depthlab/lines.hpp"
#include "depthlab/median.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace depthlab {

// One verification row. Gating rows decide the exit status; the others are recorded shortfalls
// (a heuristic that came up short, an instance outside a lemma's hypotheses).
struct Row {
    std::string suite;
    std::string check;
    std::string instance;
    int d = 0;
    long n = 0;
    std::uint64_t seed = 0;
    double expected = 0.0;
    double observed = 0.0;
    double slack = 0.0;
    bool pass = false;
    bool gating = true;
};

struct Report {
    std::vector<Row> rows;
    bool passed() const;
    long failures() const;  // gating rows that failed
};

void append(Report& dst, const Report& src);

// Comparison tolerance for floating bounds; masses are sums of weights.
inline constexpr double kCheckTol = 1e-12;

// Row helpers: pass iff observed >= expected (at_least) or observed <= expected (at_most),
// both within kCheckTol; strict variants require a positive gap.
Row at_least(Row r, double expected, double observed);
Row at_most(Row r, double expected, double observed);
Row strictly_above(Row r, double expected, double observed);
Row strictly_below(Row r, double expected, double observed);

struct SuiteParams {
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<int> dims;     // empty: the suite's default dimensions
    int instances = -1;        // seeds per dimension, measures or pairs; <0: default
    int n = -1;                // points per measure; <0: default
    int grid_count = 2000;     // theorem1
    int refine_top = 6;        // theorem1
    long rays = 10000;         // central: sampled rays per cone
    long sphere_samples = 100000;  // central: axis check
    int axis_seeds = 3;        // central: axis check repetitions
    int trials = 10;           // tmap: equivariance trials
    long tuple_samples = 4000; // tmap
    double eps = std::numeric_limits<double>::quiet_NaN();  // bmes / bijection override
};

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

Report run_suite(const std::string& name, const SuiteParams& p);

Report rado_suite(const SuiteParams& p);
Report theorem1_suite(const SuiteParams& p);
Report bmes_suite(const SuiteParams& p);
Report bijection_suite(const SuiteParams& p);
Report central_suite(const SuiteParams& p);
Report tmap_suite(const SuiteParams& p);

// Median budget used by the rado suite, by dimension.
MedianBudget rado_budget(int d, std::uint64_t seed);

}  // namespace depthlab
