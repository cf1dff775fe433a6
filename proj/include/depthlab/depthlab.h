/* C interface to libdepthlab. All functions return a dl_status; on failure
 * dl_last_error() describes the problem (per thread, valid until the next call). */
#ifndef DEPTHLAB_H
#define DEPTHLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(DEPTHLAB_BUILDING)
#define DL_API __attribute__((visibility("default")))
#else
#define DL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    DL_OK = 0,
    DL_ERR_INVALID_ARGUMENT = 1,
    DL_ERR_DIMENSION = 2,
    DL_ERR_LIMIT = 3,
    DL_ERR_PRECONDITION = 4,
    DL_ERR_NOT_FOUND = 5,
    DL_ERR_IO = 6,
    DL_ERR_INTERNAL = 7
} dl_status;

typedef enum { DL_DEPTH_EXACT = 0, DL_DEPTH_SAMPLED = 1, DL_DEPTH_ORACLE = 2 } dl_depth_mode;
typedef enum { DL_MEDIAN_MULTISTART = 0, DL_MEDIAN_ARRANGEMENT = 1, DL_MEDIAN_GRID = 2 } dl_median_mode;

typedef struct dl_measure dl_measure;

DL_API const char* dl_version(void);
DL_API const char* dl_last_error(void);
DL_API const char* dl_status_name(dl_status s);

/* points: n rows of dim doubles. weights may be NULL (uniform); they are normalized. */
DL_API dl_status dl_measure_create(int dim, size_t n, const double* points, const double* weights, dl_measure** out);
/* kind: simplex_mixture, gaussian, uniform_ball, cross_polytope. sigma <= 0 keeps the default. */
DL_API dl_status dl_measure_generate(const char* kind, int dim, int n, uint64_t seed, double sigma, dl_measure** out);
DL_API dl_status dl_measure_load(const char* path, dl_measure** out);
DL_API dl_status dl_measure_save(const dl_measure* m, const char* path);
DL_API void dl_measure_free(dl_measure* m);
DL_API int dl_measure_dim(const dl_measure* m);
DL_API size_t dl_measure_size(const dl_measure* m);
/* Copies point i (dim doubles) and its weight. */
DL_API dl_status dl_measure_point(const dl_measure* m, size_t i, double* point, double* weight);

/* witness (dim doubles, may be NULL) receives the outer normal of a minimizing half-space. */
DL_API dl_status dl_point_depth(const dl_measure* m, const double* q, dl_depth_mode mode, int k, uint64_t seed,
                                double* depth, double* witness);
/* Flat base + span of k orthonormal rows in basis (k x dim). */
DL_API dl_status dl_flat_depth(const dl_measure* m, const double* base, const double* basis, int k, double* depth);

DL_API dl_status dl_tukey_median(const dl_measure* m, dl_median_mode mode, uint64_t seed, double* point,
                                 double* depth);

/* direction and anchor: dim doubles each. */
DL_API dl_status dl_deep_line_search(const dl_measure* m, int grid_count, uint64_t seed, double* direction,
                                     double* anchor, double* depth);

/* normals: (dim+1) x dim outer normals of the tuple's half-spaces, anchored at o. */
DL_API dl_status dl_witness_tuple(const dl_measure* m, const double* o, double tol, double* normals, double* margin);

/* The measure must be centred (median at the origin). vectors: (dim+1) x dim. */
DL_API dl_status dl_structural_map(const dl_measure* m, double a, long tuple_samples, uint64_t seed,
                                   double* vectors, double* margin);

/* Runs a CLI command. has_seed = 0, threads <= 0 and out_dir NULL keep the config values.
 * exit_code receives 0 (all checks pass), 1 (a check failed) or 2 (usage or config error);
 * message (may be NULL) receives a one-line summary, truncated to message_len. */
typedef struct {
    int has_seed;
    uint64_t seed;
    int threads;
    const char* out_dir;
} dl_run_options;

DL_API const char* dl_command_names(void); /* comma separated */
DL_API dl_status dl_run_experiment(const char* command, const char* config_path, const dl_run_options* opt,
                                   int* exit_code, char* message, size_t message_len);

#ifdef __cplusplus
}
#endif

#endif
