#ifndef GRAPH_CONDENSE_H
#define GRAPH_CONDENSE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible functions.
 */
typedef enum GcStatus {
  GcOk = 0,
  GcErr = 1,
  GcErrConfig = 2,
  GcErrNumeric = 3,
  GcErrArgument = 4,
} GcStatus;

/**
 * Opaque handle to a finalized condensed graph plus its configuration.
 */
typedef struct GcCondensed GcCondensed;

/**
 * Opaque handle to a loaded dataset.
 */
typedef struct GcGraph GcGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the most recent error message for this thread into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full message length.
 */
uintptr_t gc_last_error(char *buf, uintptr_t len);

/**
 * Load a dataset directory. Returns null on failure; see `gc_last_error`.
 */
struct GcGraph *gc_dataset_load(const char *path);

/**
 * Generate a seeded stochastic-block-model dataset in memory.
 */
struct GcGraph *gc_dataset_synthetic(uintptr_t n,
                                     uintptr_t classes,
                                     double p_in,
                                     double p_out,
                                     uintptr_t d,
                                     uint64_t seed);

void gc_dataset_free(struct GcGraph *graph);

uintptr_t gc_dataset_nodes(const struct GcGraph *graph);

uintptr_t gc_dataset_dim(const struct GcGraph *graph);

uintptr_t gc_dataset_classes(const struct GcGraph *graph);

/**
 * Condense `graph` to `nodes` synthetic nodes with default
 * hyperparameters. `method` is "gcond", "gcond-x", or "dc-graph".
 * Returns null on failure.
 */
struct GcCondensed *gc_condense(const struct GcGraph *graph,
                                const char *method,
                                uintptr_t nodes,
                                uintptr_t epochs,
                                uintptr_t outer,
                                uint64_t seed);

void gc_condensed_free(struct GcCondensed *cond);

uintptr_t gc_condensed_nodes(const struct GcCondensed *cond);

/**
 * Persist a condensed artifact directory.
 */
enum GcStatus gc_condensed_save(const struct GcCondensed *cond, const char *dir);

/**
 * Load a condensed artifact directory. Returns null on failure.
 */
struct GcCondensed *gc_condensed_load(const char *dir);

/**
 * Train `arch` ("gcn", "sgc", "appnp", "sage", "mlp") on the condensed
 * graph and test on the full dataset, `repeats` times. Writes the mean and
 * sample standard deviation of test accuracy.
 */
enum GcStatus gc_evaluate(const struct GcCondensed *cond,
                          const struct GcGraph *graph,
                          const char *arch,
                          uintptr_t repeats,
                          uint64_t seed,
                          double *out_mean,
                          double *out_std);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPH_CONDENSE_H */
