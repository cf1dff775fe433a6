#include "depthlab/depthlab.h"

#include "depthlab/central.hpp"
#include "depthlab/lines.hpp"
#include "depthlab/median.hpp"
#include "depthlab/runner.hpp"

#include <cstring>
#include <new>
#include <string>

struct dl_measure {
    depthlab::DiscreteMeasure m;
};

namespace {

using namespace depthlab;

thread_local std::string g_error;

dl_status set_error(dl_status s, const std::string& msg) {
    g_error = msg;
    return s;
}

dl_status from_kind(Error::Kind k) {
    switch (k) {
        case Error::Kind::InvalidArgument: return DL_ERR_INVALID_ARGUMENT;
        case Error::Kind::DimensionMismatch: return DL_ERR_DIMENSION;
        case Error::Kind::Limit: return DL_ERR_LIMIT;
        case Error::Kind::Precondition: return DL_ERR_PRECONDITION;
        case Error::Kind::NotFound: return DL_ERR_NOT_FOUND;
        case Error::Kind::Io: return DL_ERR_IO;
    }
    return DL_ERR_INTERNAL;
}

template <class F>
dl_status guarded(F&& f) {
    try {
        g_error.clear();
        f();
        return DL_OK;
    } catch (const Error& e) {
        return set_error(from_kind(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DL_ERR_LIMIT, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DL_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(DL_ERR_INTERNAL, "unknown error");
    }
}

#define DL_REQUIRE(cond, what)                                              \
    do {                                                                    \
        if (!(cond)) return set_error(DL_ERR_INVALID_ARGUMENT, (what));     \
    } while (0)

Vec load_vec(const double* p, int dim) { return Eigen::Map<const Vec>(p, dim); }

void store_vec(const Vec& v, double* out) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

}  // namespace

extern "C" {

const char* dl_version(void) { return "1.0.0"; }

const char* dl_last_error(void) { return g_error.c_str(); }

const char* dl_status_name(dl_status s) {
    switch (s) {
        case DL_OK: return "ok";
        case DL_ERR_INVALID_ARGUMENT: return "invalid argument";
        case DL_ERR_DIMENSION: return "dimension mismatch";
        case DL_ERR_LIMIT: return "limit exceeded";
        case DL_ERR_PRECONDITION: return "precondition violated";
        case DL_ERR_NOT_FOUND: return "not found";
        case DL_ERR_IO: return "i/o error";
        case DL_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

dl_status dl_measure_create(int dim, size_t n, const double* points, const double* weights, dl_measure** out) {
    DL_REQUIRE(out && points, "dl_measure_create: null pointer");
    *out = nullptr;
    return guarded([&] {
        std::vector<Vec> pts;
        std::vector<double> w(n, 1.0);
        for (size_t i = 0; i < n; ++i) {
            pts.push_back(load_vec(points + i * dim, dim));
            if (weights) w[i] = weights[i];
        }
        if (dim < 1) fail(Error::Kind::InvalidArgument, "dl_measure_create: dim must be >= 1");
        *out = new dl_measure{make_measure(pts, w)};
    });
}

dl_status dl_measure_generate(const char* kind, int dim, int n, uint64_t seed, double sigma, dl_measure** out) {
    DL_REQUIRE(out && kind, "dl_measure_generate: null pointer");
    *out = nullptr;
    return guarded([&] {
        MeasureSpec spec;
        spec.kind = parse_measure_kind(kind);
        if (spec.kind == MeasureKind::PointMasses || spec.kind == MeasureKind::File)
            fail(Error::Kind::InvalidArgument, "dl_measure_generate: use dl_measure_create or dl_measure_load");
        spec.dim = dim;
        spec.n = n;
        spec.seed = seed;
        if (sigma > 0.0) spec.params["sigma"] = sigma;
        *out = new dl_measure{generate_measure(spec)};
    });
}

dl_status dl_measure_load(const char* path, dl_measure** out) {
    DL_REQUIRE(out && path, "dl_measure_load: null pointer");
    *out = nullptr;
    return guarded([&] { *out = new dl_measure{load_measure(path)}; });
}

dl_status dl_measure_save(const dl_measure* m, const char* path) {
    DL_REQUIRE(m && path, "dl_measure_save: null pointer");
    return guarded([&] { save_measure(m->m, path); });
}

void dl_measure_free(dl_measure* m) { delete m; }

int dl_measure_dim(const dl_measure* m) { return m ? m->m.dim() : 0; }

size_t dl_measure_size(const dl_measure* m) { return m ? m->m.size() : 0; }

dl_status dl_measure_point(const dl_measure* m, size_t i, double* point, double* weight) {
    DL_REQUIRE(m && point, "dl_measure_point: null pointer");
    DL_REQUIRE(i < m->m.size(), "dl_measure_point: index out of range");
    store_vec(m->m.point(i), point);
    if (weight) *weight = m->m.weight(i);
    return DL_OK;
}

dl_status dl_point_depth(const dl_measure* m, const double* q, dl_depth_mode mode, int k, uint64_t seed,
                         double* depth, double* witness) {
    DL_REQUIRE(m && q && depth, "dl_point_depth: null pointer");
    return guarded([&] {
        DepthQuery how;
        switch (mode) {
            case DL_DEPTH_EXACT: how.mode = DepthMode::Exact; break;
            case DL_DEPTH_SAMPLED: how.mode = DepthMode::Sampled; break;
            case DL_DEPTH_ORACLE: how.mode = DepthMode::Oracle; break;
            default: fail(Error::Kind::InvalidArgument, "dl_point_depth: unknown mode");
        }
        how.k = k;
        how.seed = seed;
        DepthResult r = point_depth(m->m, load_vec(q, m->m.dim()), how);
        *depth = r.depth;
        if (witness) store_vec(r.witness.vec(), witness);
    });
}

dl_status dl_flat_depth(const dl_measure* m, const double* base, const double* basis, int k, double* depth) {
    DL_REQUIRE(m && base && depth && (k == 0 || basis), "dl_flat_depth: null pointer");
    return guarded([&] {
        const int d = m->m.dim();
        if (k < 0 || k >= d) fail(Error::Kind::InvalidArgument, "dl_flat_depth: need 0 <= k < dim");
        std::vector<Vec> dirs;
        for (int i = 0; i < k; ++i) dirs.push_back(load_vec(basis + i * d, d));
        *depth = flat_depth(m->m, Flat(load_vec(base, d), dirs)).depth;
    });
}

dl_status dl_tukey_median(const dl_measure* m, dl_median_mode mode, uint64_t seed, double* point, double* depth) {
    DL_REQUIRE(m && point && depth, "dl_tukey_median: null pointer");
    return guarded([&] {
        MedianBudget b;
        b.seed = seed;
        switch (mode) {
            case DL_MEDIAN_MULTISTART: b.mode = MedianMode::Multistart; break;
            case DL_MEDIAN_ARRANGEMENT: b.mode = MedianMode::Arrangement; break;
            case DL_MEDIAN_GRID: b.mode = MedianMode::Grid; break;
            default: fail(Error::Kind::InvalidArgument, "dl_tukey_median: unknown mode");
        }
        MedianResult r = tukey_median(m->m, b);
        store_vec(r.point, point);
        *depth = r.depth;
    });
}

dl_status dl_deep_line_search(const dl_measure* m, int grid_count, uint64_t seed, double* direction, double* anchor,
                              double* depth) {
    DL_REQUIRE(m && direction && anchor && depth, "dl_deep_line_search: null pointer");
    return guarded([&] {
        LineSearchParams p;
        p.grid_count = grid_count;
        p.seed = seed;
        LineSearchResult r = deep_line_search(m->m, p);
        store_vec(r.direction.vec(), direction);
        store_vec(r.anchor, anchor);
        *depth = r.depth;
    });
}

dl_status dl_witness_tuple(const dl_measure* m, const double* o, double tol, double* normals, double* margin) {
    DL_REQUIRE(m && o && normals, "dl_witness_tuple: null pointer");
    return guarded([&] {
        const int d = m->m.dim();
        WitnessResult w = witness_tuple(m->m, load_vec(o, d), tol);
        auto ns = w.tuple.normals();
        for (size_t i = 0; i < ns.size(); ++i) store_vec(ns[i], normals + i * d);
        if (margin) *margin = w.margin;
    });
}

dl_status dl_structural_map(const dl_measure* m, double a, long tuple_samples, uint64_t seed, double* vectors,
                            double* margin) {
    DL_REQUIRE(m && vectors, "dl_structural_map: null pointer");
    return guarded([&] {
        MapOptions opt;
        opt.seed = seed;
        if (tuple_samples > 0) opt.tuple_samples = tuple_samples;
        StructuralTuple st = structural_map(m->m, a, opt);
        const int d = m->m.dim();
        for (size_t i = 0; i < st.vectors.size(); ++i) store_vec(st.vectors[i], vectors + i * d);
        if (margin) *margin = st.margin;
    });
}

const char* dl_command_names(void) {
    static const std::string names = [] {
        std::string s;
        for (const auto& n : command_names()) s += (s.empty() ? "" : ",") + n;
        return s;
    }();
    return names.c_str();
}

dl_status dl_run_experiment(const char* command, const char* config_path, const dl_run_options* opt, int* exit_code,
                            char* message, size_t message_len) {
    DL_REQUIRE(command && config_path && exit_code, "dl_run_experiment: null pointer");
    return guarded([&] {
        RunOptions ro;
        if (opt) {
            if (opt->has_seed) ro.seed = opt->seed;
            if (opt->threads > 0) ro.threads = opt->threads;
            if (opt->out_dir) ro.out_dir = std::string(opt->out_dir);
        }
        RunOutcome out = run_experiment(command, config_path, ro);
        *exit_code = out.exit_code;
        if (message && message_len > 0) {
            std::strncpy(message, out.message.c_str(), message_len - 1);
            message[message_len - 1] = '\0';
        }
    });
}

}  // extern "C"
