#include "depthlab/runner.hpp"

#include "depthlab/parallel.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace depthlab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------------------------
// Config access with field paths.

struct Node {
    const json* j;
    std::string path;

    bool has(const std::string& key) const { return j->contains(key); }
    Node at(const std::string& key) const { return {&(*j)[key], path + "." + key}; }
    Node at(size_t i) const { return {&(*j)[i], path + "[" + std::to_string(i) + "]"}; }

    void require_object() const {
        if (!j->is_object()) throw ConfigError(path, "expected an object");
    }
    void allow(std::initializer_list<const char*> keys) const {
        require_object();
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = j->begin(); it != j->end(); ++it)
            if (!ok.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown field");
    }

    double num() const {
        if (!j->is_number()) throw ConfigError(path, "expected a number");
        return j->get<double>();
    }
    long integer(long lo = std::numeric_limits<long>::min(), long hi = std::numeric_limits<long>::max()) const {
        if (!j->is_number_integer()) throw ConfigError(path, "expected an integer");
        if (j->is_number_unsigned() && j->get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
            throw ConfigError(path, "out of range");
        long v = j->get<long>();
        if (v < lo || v > hi) {
            std::ostringstream os;
            os << "must lie in [" << lo << ", " << hi << "], got " << v;
            throw ConfigError(path, os.str());
        }
        return v;
    }
    std::uint64_t seed() const {
        if (j->is_number_unsigned()) return j->get<std::uint64_t>();
        if (j->is_number_integer() && j->get<long long>() >= 0) return static_cast<std::uint64_t>(j->get<long long>());
        throw ConfigError(path, "expected a 64-bit unsigned integer seed");
    }
    bool boolean() const {
        if (!j->is_boolean()) throw ConfigError(path, "expected true or false");
        return j->get<bool>();
    }
    std::string str() const {
        if (!j->is_string()) throw ConfigError(path, "expected a string");
        return j->get<std::string>();
    }
    Vec vec(int dim = -1) const {
        if (!j->is_array() || j->empty()) throw ConfigError(path, "expected a nonempty array of numbers");
        Vec v(static_cast<Eigen::Index>(j->size()));
        for (size_t i = 0; i < j->size(); ++i) v[i] = at(i).num();
        if (dim >= 0 && v.size() != dim)
            throw ConfigError(path, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(v.size()));
        return v;
    }
    std::vector<Node> items() const {
        if (!j->is_array()) throw ConfigError(path, "expected an array");
        std::vector<Node> out;
        for (size_t i = 0; i < j->size(); ++i) out.push_back(at(i));
        return out;
    }

    double num_or(const std::string& key, double fb) const { return has(key) ? at(key).num() : fb; }
    long int_or(const std::string& key, long fb, long lo = std::numeric_limits<long>::min(),
                long hi = std::numeric_limits<long>::max()) const {
        return has(key) ? at(key).integer(lo, hi) : fb;
    }
    bool bool_or(const std::string& key, bool fb) const { return has(key) ? at(key).boolean() : fb; }
    std::string str_or(const std::string& key, const std::string& fb) const { return has(key) ? at(key).str() : fb; }
};

struct Context {
    std::string command;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir;
    std::string base_dir;
    json extra = json::object();  // command-specific summary fields
};

std::string resolve(const Context& cx, const std::string& p) {
    fs::path q(p);
    if (q.is_absolute() || cx.base_dir.empty()) return q.string();
    return (fs::path(cx.base_dir) / q).string();
}

// ---------------------------------------------------------------------------------------------
// Measures

DiscreteMeasure measure_from(const Context& cx, const Node& root) {
    if (!root.has("measure")) throw ConfigError("config.measure", "missing (a measure spec is required)");
    Node m = root.at("measure");
    m.allow({"kind", "dim", "n", "seed", "sigma", "radius", "scale", "points", "weights", "path"});
    MeasureSpec spec;
    const std::string kind = m.str_or("kind", m.has("path") ? "file" : (m.has("points") ? "point_masses" : "gaussian"));
    try {
        spec.kind = parse_measure_kind(kind);
    } catch (const Error& e) {
        throw ConfigError(m.path + ".kind", e.what());
    }
    if (spec.kind == MeasureKind::File) {
        if (!m.has("path")) throw ConfigError(m.path + ".path", "missing (kind file needs a path)");
        spec.path = resolve(cx, m.at("path").str());
        if (!fs::exists(spec.path)) throw ConfigError(m.path + ".path", "file not found: " + spec.path);
        try {
            return load_measure(spec.path);
        } catch (const Error& e) {
            throw ConfigError(m.path + ".path", e.what());
        }
    }
    if (spec.kind == MeasureKind::PointMasses) {
        if (!m.has("points")) throw ConfigError(m.path + ".points", "missing (kind point_masses needs points)");
        auto pts = m.at("points").items();
        if (pts.empty()) throw ConfigError(m.path + ".points", "expected at least one point");
        const int d = static_cast<int>(pts.front().vec().size());
        for (auto& p : pts) spec.points.push_back(p.vec(d));
        if (m.has("weights")) {
            auto ws = m.at("weights").items();
            if (ws.size() != spec.points.size())
                throw ConfigError(m.path + ".weights", "expected one weight per point");
            for (auto& w : ws) {
                double x = w.num();
                if (!(x > 0.0)) throw ConfigError(w.path, "weights must be positive");
                spec.weights.push_back(x);
            }
        }
        return generate_measure(spec);
    }
    spec.dim = static_cast<int>(m.int_or("dim", 2, 1, 64));
    spec.n = static_cast<int>(m.int_or("n", 100, 1, 1000000));
    spec.seed = m.has("seed") ? m.at("seed").seed() : cx.seed;
    for (const char* key : {"sigma", "radius", "scale"})
        if (m.has(key)) {
            double v = m.at(key).num();
            if (!(v > 0.0)) throw ConfigError(m.path + "." + key, "must be positive");
            spec.params[key] = v;
        }
    return generate_measure(spec);
}

// ---------------------------------------------------------------------------------------------
// Commands

Row row(const Context& cx, const std::string& check, const std::string& instance, const DiscreteMeasure& m) {
    Row r;
    r.suite = cx.command;
    r.check = check;
    r.instance = instance;
    r.d = m.dim();
    r.n = static_cast<long>(m.size());
    r.seed = cx.seed;
    return r;
}

std::string idx(const std::string& prefix, size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%04zu", prefix.c_str(), i);
    return buf;
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Report cmd_generate(Context& cx, const Node& root) {
    root.allow({"command", "seed", "threads", "out", "measure", "output"});
    DiscreteMeasure m = measure_from(cx, root);
    const std::string name = root.str_or("output", "measure.json");
    const std::string path = (fs::path(cx.out_dir) / name).string();
    save_measure(m, path);
    cx.extra["measure_path"] = path;
    double sum = 0.0;
    for (double w : m.weights()) sum += w;
    Report rep;
    rep.rows.push_back(at_least(row(cx, "points", "measure", m), 1.0, static_cast<double>(m.size())));
    Row w = at_most(row(cx, "weight_sum_error", "measure", m), 1e-12, std::abs(sum - 1.0));
    rep.rows.push_back(w);
    return rep;
}

DepthQuery depth_query(const Context& cx, const Node& d) {
    DepthQuery q;
    const std::string mode = d.str_or("mode", "exact");
    if (mode == "exact") q.mode = DepthMode::Exact;
    else if (mode == "sampled") q.mode = DepthMode::Sampled;
    else if (mode == "oracle") q.mode = DepthMode::Oracle;
    else throw ConfigError(d.path + ".mode", "expected exact, sampled or oracle");
    q.k = static_cast<int>(d.int_or("k", 1000, 1, 100000000));
    q.seed = cx.seed;
    return q;
}

Report cmd_depth(Context& cx, const Node& root) {
    root.allow({"command", "seed", "threads", "out", "measure", "depth"});
    DiscreteMeasure m = measure_from(cx, root);
    if (!root.has("depth")) throw ConfigError("config.depth", "missing (needs queries)");
    Node d = root.at("depth");
    d.allow({"queries", "mode", "k", "expected", "tolerance"});
    DepthQuery q = depth_query(cx, d);
    if (!d.has("queries")) throw ConfigError(d.path + ".queries", "missing");
    auto qs = d.at("queries").items();
    std::vector<double> expected;
    if (d.has("expected")) {
        for (auto& e : d.at("expected").items()) expected.push_back(e.num());
        if (expected.size() != qs.size()) throw ConfigError(d.path + ".expected", "expected one value per query");
    }
    const double tol = d.num_or("tolerance", 1e-12);
    Report rep;
    json pts = json::array();
    for (size_t i = 0; i < qs.size(); ++i) {
        Vec x = qs[i].vec(m.dim());
        DepthResult r = point_depth(m, x, q);
        Row base = row(cx, "depth", idx("q", i), m);
        if (expected.empty()) {
            rep.rows.push_back(at_least(base, 0.0, r.depth));
        } else {
            base.expected = expected[i];
            base.observed = r.depth;
            base.slack = tol - std::abs(r.depth - expected[i]);
            base.pass = base.slack >= 0.0;
            rep.rows.push_back(base);
        }
        pts.push_back({{"query", vec_json(x)}, {"depth", r.depth}, {"witness", vec_json(r.witness.vec())}});
    }
    cx.extra["queries"] = pts;
    return rep;
}

MedianBudget median_budget(const Context& cx, const Node& root) {
    MedianBudget b;
    b.seed = cx.seed;
    if (!root.has("median")) return b;
    Node md = root.at("median");
    md.allow({"mode", "starts", "directions", "refine_iters", "grid", "certify", "exact_search"});
    const std::string mode = md.str_or("mode", "multistart");
    if (mode == "multistart") b.mode = MedianMode::Multistart;
    else if (mode == "arrangement") b.mode = MedianMode::Arrangement;
    else if (mode == "grid") b.mode = MedianMode::Grid;
    else throw ConfigError(md.path + ".mode", "expected multistart, arrangement or grid");
    b.starts = static_cast<int>(md.int_or("starts", b.starts, 0, 100000));
    b.directions = static_cast<int>(md.int_or("directions", b.directions, 1, 10000000));
    b.refine_iters = static_cast<int>(md.int_or("refine_iters", b.refine_iters, 0, 10000000));
    b.grid = static_cast<int>(md.int_or("grid", b.grid, 2, 10000));
    b.certify = static_cast<int>(md.int_or("certify", b.certify, 1, 10000));
    b.exact_search = md.bool_or("exact_search", b.exact_search);
    return b;
}

Report cmd_median(Context& cx, const Node& root) {
    root.allow({"command", "seed", "threads", "out", "measure", "median"});
    DiscreteMeasure m = measure_from(cx, root);
    MedianResult med = tukey_median(m, median_budget(cx, root));
    const double floor = 1.0 / (m.dim() + 1) - 2.0 / static_cast<double>(m.size());
    Report rep;
    rep.rows.push_back(at_least(row(cx, "median_depth", "median", m), floor, med.depth));
    cx.extra["median"] = vec_json(med.point);
    cx.extra["median_depth"] = med.depth;
    cx.extra["median_exact"] = med.exact;
    cx.extra["candidates_evaluated"] = med.candidates_evaluated;
    return rep;
}

Report cmd_line_search(Context& cx, const Node& root) {
    root.allow({"command", "seed", "threads", "out", "measure", "line_search"});
    DiscreteMeasure m = measure_from(cx, root);
    if (m.dim() < 3) throw ConfigError("config.measure.dim", "line search needs dimension >= 3");
    LineSearchParams lp;
    lp.seed = cx.seed;
    double allowance = 0.02;
    if (root.has("line_search")) {
        Node ls = root.at("line_search");
        ls.allow({"grid_count", "refine_iters", "refine_top", "neighbours", "allowance"});
        lp.grid_count = static_cast<int>(ls.int_or("grid_count", lp.grid_count, 1, 100000000));
        lp.refine_iters = static_cast<int>(ls.int_or("refine_iters", lp.refine_iters, 0, 1000));
        lp.refine_top = static_cast<int>(ls.int_or("refine_top", lp.refine_top, 1, 100000));
        lp.neighbours = static_cast<int>(ls.int_or("neighbours", lp.neighbours, 0, 100000));
        allowance = ls.num_or("allowance", allowance);
    }
    LineSearchResult res = deep_line_search(m, lp);
    Report rep;
    rep.rows.push_back(at_least(row(cx, "line_depth_rado", "line", m), res.rado - allowance, res.depth));
    Row imp = at_least(row(cx, "line_depth_improved", "line", m), res.improved - allowance, res.depth);
    imp.gating = false;
    rep.rows.push_back(imp);
    cx.extra["direction"] = vec_json(res.direction.vec());
    cx.extra["anchor"] = vec_json(res.anchor);
    cx.extra["depth"] = res.depth;
    cx.extra["profiles_evaluated"] = res.iterations;
    return rep;
}

Report cmd_landscape(Context& cx, const Node& root) {
    root.allow({"command", "seed", "threads", "out", "measure", "landscape", "median"});
    DiscreteMeasure m = measure_from(cx, root);
    if (m.dim() < 2) throw ConfigError("config.measure.dim", "landscape needs dimension >= 2");
    int count = 200;
    SampleMode mode = SampleMode::Grid;
    if (root.has("landscape")) {
        Node ls = root.at("landscape");
        ls.allow({"directions", "sampling"});
        count = static_cast<int>(ls.int_or("directions", count, 1, 10000000));
        const std::string s = ls.str_or("sampling", "grid");
        if (s == "grid") mode = SampleMode::Grid;
        else if (s == "random") mode = SampleMode::Projective;
        else throw ConfigError(ls.path + ".sampling", "expected grid or random");
    }
    MedianBudget b = median_budget(cx, root);
    if (!root.has("median") && m.dim() == 2) b.exact_search = true;
    auto dirs = sample_directions(m.dim(), count, cx.seed, mode);
    auto profs = parallel_map(dirs.size(), cx.threads, [&](size_t i) {
        return direction_profile(m, Direction(dirs[i].vec()), b).a;
    });
    Report rep;
    json pts = json::array();
    double best = -1.0;
    for (size_t i = 0; i < dirs.size(); ++i) {
        Direction dir(dirs[i].vec());
        rep.rows.push_back(at_least(row(cx, "profile_depth", idx("dir", i), m), 0.0, profs[i]));
        pts.push_back({{"direction", vec_json(dir.vec())}, {"a", profs[i]}});
        best = std::max(best, profs[i]);
    }
    cx.extra["profile"] = pts;
    cx.extra["max"] = best;
    return rep;
}

SuiteParams suite_params(const Context& cx, const Node& v) {
    SuiteParams p;
    p.seed = cx.seed;
    p.threads = cx.threads;
    if (v.has("dims"))
        for (auto& d : v.at("dims").items()) p.dims.push_back(static_cast<int>(d.integer(2, 8)));
    p.instances = static_cast<int>(v.int_or("instances", p.instances, 0, 1000000));
    p.n = static_cast<int>(v.int_or("n", p.n, 1, 1000000));
    p.grid_count = static_cast<int>(v.int_or("grid_count", p.grid_count, 1, 100000000));
    p.refine_top = static_cast<int>(v.int_or("refine_top", p.refine_top, 1, 100000));
    p.rays = v.int_or("rays", p.rays, 1, 100000000);
    p.sphere_samples = v.int_or("sphere_samples", p.sphere_samples, 1, 1000000000);
    p.axis_seeds = static_cast<int>(v.int_or("axis_seeds", p.axis_seeds, 0, 10000));
    p.trials = static_cast<int>(v.int_or("trials", p.trials, 0, 100000));
    p.tuple_samples = v.int_or("tuple_samples", p.tuple_samples, 1, 1000000000);
    if (v.has("eps")) p.eps = v.at("eps").num();
    return p;
}

Report cmd_verify(Context& cx, const Node& root) {
    root.allow({"command", "seed", "threads", "out", "verify"});
    if (!root.has("verify")) throw ConfigError("config.verify", "missing (needs suites)");
    Node v = root.at("verify");
    v.allow({"suites", "suite", "dims", "instances", "n", "grid_count", "refine_top", "rays", "sphere_samples",
             "axis_seeds", "trials", "tuple_samples", "eps"});
    std::vector<std::pair<std::string, std::string>> names;  // name, field path
    if (v.has("suite")) names.push_back({v.at("suite").str(), v.path + ".suite"});
    if (v.has("suites"))
        for (auto& s : v.at("suites").items()) names.push_back({s.str(), s.path});
    if (names.empty()) throw ConfigError(v.path + ".suites", "missing (name at least one suite)");
    for (auto& [n, path] : names)
        if (!is_suite(n)) {
            std::string all;
            for (auto& s : suite_names()) all += (all.empty() ? "" : ", ") + s;
            throw ConfigError(path, "unknown suite '" + n + "' (valid: " + all + ")");
        }
    SuiteParams p = suite_params(cx, v);
    Report rep;
    for (auto& [n, path] : names) append(rep, run_suite(n, p));
    return rep;
}

Report cmd_bench(Context& cx, const Node& root) {
    root.allow({"command", "seed", "threads", "out", "bench"});
    std::vector<std::pair<int, int>> cases = {{2, 1000}, {3, 300}, {4, 100}};
    int repeats = 1;
    if (root.has("bench")) {
        Node b = root.at("bench");
        b.allow({"cases", "repeats"});
        repeats = static_cast<int>(b.int_or("repeats", repeats, 1, 1000));
        if (b.has("cases")) {
            cases.clear();
            for (auto& c : b.at("cases").items()) {
                c.allow({"dim", "n"});
                cases.push_back({static_cast<int>(c.int_or("dim", 2, 1, kExactMaxDim)),
                                 static_cast<int>(c.int_or("n", 100, 1, static_cast<long>(kExactMaxPoints)))});
            }
        }
    }
    Report rep;
    json timings = json::array();
    for (size_t i = 0; i < cases.size(); ++i) {
        MeasureSpec spec;
        spec.kind = MeasureKind::Gaussian;
        spec.dim = cases[i].first;
        spec.n = cases[i].second;
        spec.seed = derive_seed(cx.seed, "bench", i);
        DiscreteMeasure m = generate_measure(spec);
        double depth = 0.0, best = 1e300;
        for (int r = 0; r < repeats; ++r) {
            auto t0 = std::chrono::steady_clock::now();
            depth = point_depth(m, m.mean()).depth;
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        // timings stay out of the CSV so that it remains reproducible
        rep.rows.push_back(at_least(row(cx, "exact_depth_at_mean", idx("case", i), m), 0.0, depth));
        timings.push_back({{"dim", spec.dim}, {"n", spec.n}, {"seconds", best}});
    }
    cx.extra["timings"] = timings;
    return rep;
}

std::optional<std::uint64_t> parse_u64(const std::string& s) {
    if (s.empty()) return std::nullopt;
    for (char c : s)
        if (c < '0' || c > '9') return std::nullopt;
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno == ERANGE || *end) return std::nullopt;
    return static_cast<std::uint64_t>(v);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) o += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return o + "\"";
}

json summary_json(const Context& cx, const Report& rep, int code) {
    json s;
    s["command"] = cx.command;
    s["seed"] = cx.seed;
    s["threads"] = cx.threads;
    s["rows"] = rep.rows.size();
    s["failures"] = rep.failures();
    s["exit_code"] = code;
    json checks = json::object();
    json shortfalls = json::array();
    for (const auto& r : rep.rows) {
        const std::string key = r.suite + "/" + r.check;
        json& c = checks[key];
        if (c.is_null()) c = {{"rows", 0}, {"passed", 0}, {"gating", r.gating}};
        c["rows"] = c["rows"].get<long>() + 1;
        if (r.pass) c["passed"] = c["passed"].get<long>() + 1;
        if (!r.gating && !r.pass) shortfalls.push_back(key + "/" + r.instance);
    }
    s["checks"] = checks;
    s["recorded_shortfalls"] = shortfalls;
    for (auto it = cx.extra.begin(); it != cx.extra.end(); ++it) s[it.key()] = it.value();
    return s;
}

std::optional<std::string> unknown_command(const std::string& command) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) != names.end()) return std::nullopt;
    std::string all;
    for (auto& n : names) all += (all.empty() ? "" : ", ") + n;
    return "unknown command '" + command + "' (valid commands: " + all + ")";
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"generate",  "depth",  "median", "line-search",
                                                   "landscape", "verify", "bench"};
    return names;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // no negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string csv_header() { return "suite,check,instance,d,n,seed,expected,observed,slack,pass\n"; }

std::string to_csv(const Report& r) {
    std::string out = csv_header();
    for (const auto& row : r.rows) {
        out += csv_field(row.suite) + "," + csv_field(row.check) + "," + csv_field(row.instance) + "," +
               std::to_string(row.d) + "," + std::to_string(row.n) + "," + std::to_string(row.seed) + "," +
               format_double(row.expected) + "," + format_double(row.observed) + "," + format_double(row.slack) +
               "," + (row.pass ? "true" : "false") + "\n";
    }
    return out;
}

RunOutcome run_experiment_text(const std::string& command, const std::string& config_text,
                               const std::string& base_dir, const RunOptions& opt) {
    RunOutcome out;
    if (auto bad = unknown_command(command)) {
        out.message = *bad;
        return out;
    }
    try {
        json cfg;
        try {
            cfg = json::parse(config_text);
        } catch (const json::parse_error& e) {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        Node root{&cfg, "config"};
        root.require_object();

        Context cx;
        cx.command = command;
        cx.base_dir = base_dir;
        if (root.has("command") && root.at("command").str() != command)
            throw ConfigError("config.command", "names '" + root.at("command").str() + "' but the command is '" +
                                                    command + "'");
        if (root.has("seed")) cx.seed = root.at("seed").seed();
        if (opt.read_env) {
            if (const char* env = std::getenv("DEPTHLAB_SEED")) {
                auto v = parse_u64(env);
                if (!v) throw ConfigError("DEPTHLAB_SEED", "not a 64-bit unsigned integer");
                cx.seed = *v;
            }
        }
        if (opt.seed) cx.seed = *opt.seed;
        cx.threads = static_cast<int>(root.int_or("threads", 1, 1, 1024));
        if (opt.threads) {
            if (*opt.threads < 1 || *opt.threads > 1024) throw ConfigError("--threads", "must lie in [1, 1024]");
            cx.threads = *opt.threads;
        }
        cx.out_dir = opt.out_dir ? *opt.out_dir : resolve(cx, root.str_or("out", "depthlab_out"));
        std::error_code ec;
        fs::create_directories(cx.out_dir, ec);
        if (ec || !fs::is_directory(cx.out_dir))
            throw ConfigError(opt.out_dir ? "--out" : "config.out", "cannot create directory " + cx.out_dir);

        Report rep;
        auto t0 = std::chrono::steady_clock::now();
        try {
            if (command == "generate") rep = cmd_generate(cx, root);
            else if (command == "depth") rep = cmd_depth(cx, root);
            else if (command == "median") rep = cmd_median(cx, root);
            else if (command == "line-search") rep = cmd_line_search(cx, root);
            else if (command == "landscape") rep = cmd_landscape(cx, root);
            else if (command == "verify") rep = cmd_verify(cx, root);
            else rep = cmd_bench(cx, root);
        } catch (const Error& e) {
            // argument-level errors are usage errors; violated preconditions count as failed checks
            if (e.kind() == Error::Kind::Precondition || e.kind() == Error::Kind::NotFound) {
                out.exit_code = kExitCheckFailed;
                out.message = command + ": " + e.what();
                return out;
            }
            throw ConfigError("config", e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const std::string stem = command;
        out.csv_path = (fs::path(cx.out_dir) / (stem + ".csv")).string();
        out.summary_path = (fs::path(cx.out_dir) / (stem + "_summary.json")).string();
        out.exit_code = rep.passed() ? kExitPass : kExitCheckFailed;
        {
            std::ofstream f(out.csv_path, std::ios::binary);
            f << to_csv(rep);
            if (!f) throw ConfigError("--out", "cannot write " + out.csv_path);
        }
        {
            json s = summary_json(cx, rep, out.exit_code);
            s["csv"] = out.csv_path;
            s["elapsed_seconds"] = elapsed;
            std::ofstream f(out.summary_path, std::ios::binary);
            f << s.dump(2) << "\n";
            if (!f) throw ConfigError("--out", "cannot write " + out.summary_path);
        }
        long shortfalls = std::count_if(rep.rows.begin(), rep.rows.end(),
                                        [](const Row& r) { return !r.gating && !r.pass; });
        std::ostringstream msg;
        msg << command << ": " << rep.rows.size() << " rows, " << rep.failures() << " failed";
        if (shortfalls) msg << ", " << shortfalls << " recorded shortfalls";
        msg << "; report " << out.csv_path;
        out.message = msg.str();
        out.report = std::move(rep);
        return out;
    } catch (const ConfigError& e) {
        out.exit_code = kExitUsage;
        out.message = std::string("config error: ") + e.what();
    } catch (const std::exception& e) {
        out.exit_code = kExitUsage;
        out.message = std::string("error: ") + e.what();
    }
    return out;
}

RunOutcome run_experiment(const std::string& command, const std::string& config_path, const RunOptions& opt) {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) {
        RunOutcome bad;
        bad.message = unknown_command(command).value_or("config error: --config: cannot read " + config_path);
        return bad;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return run_experiment_text(command, ss.str(), fs::path(config_path).parent_path().string(), opt);
}

}  // namespace depthlab
