// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--csv-dir DIR]   (per-criterion CSVs are written when a directory is given)
#include "depthlab/parallel.hpp"
#include "depthlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace depthlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string csv_dir;

void dump(const std::string& name, const Report& r) {
    if (csv_dir.empty()) return;
    std::filesystem::create_directories(csv_dir);
    std::ofstream(std::filesystem::path(csv_dir) / (name + ".csv"), std::ios::binary) << to_csv(r);
}

// Gating rows of the given checks: count, failures.
struct Tally {
    long rows = 0, failed = 0;
};
Tally tally(const Report& r, const std::set<std::string>& checks) {
    Tally t;
    for (const auto& row : r.rows)
        if (row.gating && (checks.empty() || checks.count(row.check))) {
            ++t.rows;
            if (!row.pass) ++t.failed;
        }
    return t;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

Outcome oracle_equivalence() {
    auto t0 = Clock::now();
    long agree = 0, total = 0;
    std::string first_bad;
    for (int d : {2, 3}) {
        for (int inst = 0; inst < 100; ++inst) {
            std::mt19937_64 rng(derive_seed(1, "oracle", d * 1000 + inst));
            const int n = 5 + inst % 8;
            std::uniform_int_distribution<int> wt(1, 5), lat(-3, 3);
            std::normal_distribution<double> g;
            const bool lattice = inst % 2 == 0;  // coarse lattice: many ties and collinearities
            std::vector<Vec> pts;
            std::vector<double> w;
            long W = 0;
            for (int i = 0; i < n; ++i) {
                Vec p(d);
                for (int k = 0; k < d; ++k) p[k] = lattice ? lat(rng) : g(rng);
                pts.push_back(p);
                int wi = wt(rng);
                w.push_back(wi);
                W += wi;
            }
            auto m = make_measure(pts, w);
            std::vector<Vec> queries = {m.mean(), pts[0]};
            Vec q(d);
            for (int k = 0; k < d; ++k) q[k] = lattice ? 0.5 * lat(rng) : g(rng);
            queries.push_back(q);
            for (const auto& x : queries) {
                long e = std::lround(point_depth(m, x).depth * W);
                long o = std::lround(depth_oracle(m, x).depth * W);
                ++total;
                if (e == o) ++agree;
                else if (first_bad.empty()) first_bad = " first mismatch d=" + std::to_string(d) + " instance " +
                                                        std::to_string(inst);
            }
        }
    }
    double s = seconds_since(t0);
    Outcome o;
    o.pass = agree == total && s < 60.0;
    o.detail = std::to_string(agree) + "/" + std::to_string(total) + " integer agreements over 200 instances, " +
               fmt("%.1f s (limit 60 s)", s) + first_bad;
    return o;
}

Outcome rado() {
    auto t0 = Clock::now();
    Report r = rado_suite(SuiteParams{});
    double s = seconds_since(t0);
    dump("criterion2_rado", r);
    Tally t = tally(r, {"median_depth"});
    double worst = INFINITY;
    for (const auto& row : r.rows) worst = std::min(worst, row.slack);
    Outcome o;
    o.pass = t.failed == 0 && t.rows == 150 && s < 300.0;
    o.detail = std::to_string(t.rows - t.failed) + "/" + std::to_string(t.rows) +
               fmt(" medians above 1/(d+1) - 2/n, min slack %.4f, %.1f s (limit 300 s)", worst, s);
    return o;
}

Outcome theorem_one() {
    auto t0 = Clock::now();
    Report r = theorem1_suite(SuiteParams{});
    double s = seconds_since(t0);
    dump("criterion3_theorem1", r);
    long rado_ok = 0, improved_ok = 0, count = 0;
    std::string shortfalls;
    for (const auto& row : r.rows) {
        if (row.check == "line_depth_rado") {
            ++count;
            if (row.pass) ++rado_ok;
        }
        if (row.check == "line_depth_improved") {
            if (row.pass) ++improved_ok;
            else shortfalls += " " + row.instance + fmt("(%.4f)", row.observed);
        }
    }
    Outcome o;
    o.pass = r.failures() == 0 && count == 12 && rado_ok == 12 && improved_ok >= 10 && s < 600.0;
    o.detail = "lines >= 1/3 - 0.02 on " + std::to_string(rado_ok) + "/12, >= 1/3 + 1/81 - 0.02 on " +
               std::to_string(improved_ok) + "/12 (need 10)" + fmt(", %.1f s (limit 600 s)", s) +
               (shortfalls.empty() ? "" : "; shortfalls:" + shortfalls);
    return o;
}

Outcome bmes() {
    Report r = bmes_suite(SuiteParams{});
    dump("criterion4_bmes", r);
    Tally t = tally(r, {"bmes_sum", "bmes_low", "bmes_high"});
    long skipped = 0;
    for (const auto& row : r.rows)
        if (row.check == "weight_precondition" && !row.pass) ++skipped;
    Outcome o;
    o.pass = r.failures() == 0 && t.rows > 0;
    o.detail = std::to_string(t.rows - t.failed) + "/" + std::to_string(t.rows) + " b-mes assertions hold; " +
               std::to_string(skipped) + " instances outside the weight precondition";
    return o;
}

Report central_report;  // shared by criteria 6 and 7

Outcome bijection() {
    Report r = bijection_suite(SuiteParams{});
    dump("criterion5_bijection", r);
    Tally t = tally(r, {});
    Outcome o;
    o.pass = r.failures() == 0 && t.rows > 0;
    o.detail = std::to_string(t.rows - t.failed) + "/" + std::to_string(t.rows) +
               " matching rows pass (unique perfect matching, off-matching <= 1e-6, matched mass bound)";
    return o;
}

Outcome containment() {
    central_report = central_suite(SuiteParams{});
    dump("criterion6_7_central", central_report);
    Tally rays = tally(central_report, {"rays_outside_partner"});
    Tally vecs = tally(central_report, {"central_vectors_in_partner"});
    long skipped = 0;
    for (const auto& row : central_report.rows)
        if (row.check == "mass_hypotheses" && !row.pass) ++skipped;
    Outcome o;
    o.pass = rays.rows > 0 && rays.failed == 0 && vecs.failed == 0 && vecs.rows == rays.rows;
    o.detail = std::to_string(rays.rows - rays.failed) + "/" + std::to_string(rays.rows) +
               " cone pairs with every sampled ray in the partner cone, " + std::to_string(vecs.rows - vecs.failed) +
               "/" + std::to_string(vecs.rows) + " with both central vectors inside; " + std::to_string(skipped) +
               " pairs outside the mass hypotheses";
    return o;
}

Outcome central_vector_estimator() {
    Tally ang = tally(central_report, {"axis_angle_deg"});
    Tally nrm = tally(central_report, {"unit_norm_error"});
    double worst = 0.0;
    for (const auto& row : central_report.rows)
        if (row.check == "axis_angle_deg") worst = std::max(worst, row.observed);
    Outcome o;
    o.pass = ang.rows >= 3 && ang.failed == 0 && nrm.failed == 0 && nrm.rows == ang.rows;
    o.detail = std::to_string(ang.rows - ang.failed) + "/" + std::to_string(ang.rows) +
               fmt(" axisymmetric runs within 2 deg (worst %.4f deg), unit norm within 1e-12", worst);
    return o;
}

Report tmap_report;
double tmap_seconds = 0.0;

Outcome structural() {
    auto t0 = Clock::now();
    tmap_report = tmap_suite(SuiteParams{});
    tmap_seconds = seconds_since(t0);
    dump("criterion8_9_tmap", tmap_report);
    Tally mg = tally(tmap_report, {"margin"});
    Tally cl = tally(tmap_report, {"cluster_angle_deg"});
    Tally sm = tally(tmap_report, {"structural_map", "witness_tuple"});
    double worst = 0.0;
    for (const auto& row : tmap_report.rows)
        if (row.check == "cluster_angle_deg") worst = std::max(worst, row.observed);
    Outcome o;
    o.pass = mg.rows == 6 && mg.failed == 0 && cl.failed == 0 && cl.rows == 6 && sm.failed == 0 &&
             tmap_seconds < 600.0;
    o.detail = std::to_string(mg.rows - mg.failed) + "/" + std::to_string(mg.rows) + " positive margins, " +
               std::to_string(cl.rows - cl.failed) + "/" + std::to_string(cl.rows) +
               fmt(" within 10 deg of distinct clusters (worst %.3f deg), %.1f s (limit 600 s)", worst, tmap_seconds);
    return o;
}

Outcome equivariance() {
    Tally eq = tally(tmap_report, {"equivariance_hausdorff"});
    double worst = 0.0;
    for (const auto& row : tmap_report.rows)
        if (row.check == "equivariance_hausdorff") worst = std::max(worst, row.observed);
    Outcome o;
    o.pass = eq.rows == 10 && eq.failed == 0;
    o.detail = std::to_string(eq.rows - eq.failed) + "/" + std::to_string(eq.rows) +
               fmt(" trials within 0.05 scaled Hausdorff (worst %.2e)", worst);
    return o;
}

Outcome determinism() {
    // every suite twice at 1 thread and once at 8; rado and theorem1 at reduced size, the rest at full size
    auto t0 = Clock::now();
    std::vector<std::pair<std::string, SuiteParams>> runs;
    SuiteParams base;
    base.seed = 7;
    {
        SuiteParams p = base;
        p.instances = 3;
        p.n = 150;
        runs.push_back({"rado", p});
    }
    {
        SuiteParams p = base;
        p.instances = 2;
        p.grid_count = 150;
        p.refine_top = 2;
        runs.push_back({"theorem1", p});
    }
    for (const char* s : {"bmes", "bijection", "central", "tmap"}) runs.push_back({s, base});
    std::string mismatched;
    for (auto& [name, p] : runs) {
        p.threads = 1;
        std::string a = to_csv(run_suite(name, p));
        std::string b = to_csv(run_suite(name, p));
        p.threads = 8;
        std::string c = to_csv(run_suite(name, p));
        if (a != b || a != c) mismatched += " " + name;
    }
    Outcome o;
    o.pass = mismatched.empty();
    o.detail = std::to_string(runs.size()) + " suites, threads 1/1/8" +
               (mismatched.empty() ? ": identical CSV" : ": differing CSV in" + mismatched) +
               fmt(", %.1f s", seconds_since(t0));
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--csv-dir") csv_dir = argv[i + 1];
    std::setvbuf(stdout, nullptr, _IOLBF, 0);

    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {
        {1, "oracle equivalence", oracle_equivalence},
        {2, "Rado centerpoint floor", rado},
        {3, "deep lines in R^3", theorem_one},
        {4, "b-mes bounds", bmes},
        {5, "bijection of cones", bijection},
        {6, "central cone containment", containment},
        {7, "central vector estimator", central_vector_estimator},
        {8, "structural map tuples", structural},
        {9, "structural map equivariance", equivariance},
        {10, "determinism across threads", determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2d %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
