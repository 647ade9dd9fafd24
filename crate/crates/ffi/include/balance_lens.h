#ifndef BALANCE_LENS_H
#define BALANCE_LENS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_ARGUMENT = 2,
  BL_STATUS_IO = 3,
  BL_STATUS_MALFORMED = 4,
  BL_STATUS_UNDEFINED = 5,
  BL_STATUS_SINGULAR = 6,
  BL_STATUS_OUT_OF_RANGE = 7,
  BL_STATUS_INTERNAL = 8,
} BlStatus;

typedef enum BlModel {
  BL_MODEL_DETERMINISTIC = 0,
  BL_MODEL_TYPE_I = 1,
  BL_MODEL_TYPE_II = 2,
  BL_MODEL_TYPE_III = 3,
} BlModel;

// Opaque directed graph.
typedef struct BlGraph BlGraph;

// Opaque balance profile.
typedef struct BlProfile BlProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *bl_last_error(void);

const char *bl_version(void);

// Builds a graph from parallel arrays of endpoint ids. Self-loops and
// repeated pairs are dropped; ids are renumbered densely in order of first
// appearance.
//
// # Safety
// `sources` and `targets` must each point to `n_edges` readable values
// (or may be null when `n_edges` is 0); `out` must be writable.
enum BlStatus bl_graph_from_edges(const uint64_t *sources,
                                  const uint64_t *targets,
                                  size_t n_edges,
                                  struct BlGraph **out);

// Reads an edge list file.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
enum BlStatus bl_graph_read(const char *path, bool strict, struct BlGraph **out);

// Generates a power-law network.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_graph_generate(enum BlModel model,
                                size_t n_vertices,
                                double gamma,
                                uint64_t seed,
                                struct BlGraph **out);

// # Safety
// `graph` must come from a `bl_graph_*` constructor and not be freed yet,
// or be null.
void bl_graph_free(struct BlGraph *graph);

// # Safety
// `graph` must be a live handle or null (which yields 0).
size_t bl_graph_vertex_count(const struct BlGraph *graph);

// # Safety
// `graph` must be a live handle or null (which yields 0).
size_t bl_graph_edge_count(const struct BlGraph *graph);

// In-degree of dense vertex `v`.
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum BlStatus bl_graph_in_degree(const struct BlGraph *graph, uint64_t v, uint64_t *out);

// Balance profile with interval parameter `alpha` (> 1).
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum BlStatus bl_profile_compute(const struct BlGraph *graph, double alpha, struct BlProfile **out);

// # Safety
// `profile` must come from [`bl_profile_compute`] and not be freed yet, or
// be null.
void bl_profile_free(struct BlProfile *profile);

// Number of non-empty bins.
//
// # Safety
// `profile` must be a live handle or null (which yields 0).
size_t bl_profile_bin_count(const struct BlProfile *profile);

// Bin `index` (ascending interval order): its interval index and count.
//
// # Safety
// `profile` must be a live handle; `s` and `count` must be writable.
enum BlStatus bl_profile_bin(const struct BlProfile *profile,
                             size_t index,
                             int32_t *s,
                             uint64_t *count);

// Edges whose source has in-degree zero.
//
// # Safety
// `profile` must be a live handle or null (which yields 0).
uint64_t bl_profile_infinite_count(const struct BlProfile *profile);

// Positivity of the profiled graph; `BL_STATUS_UNDEFINED` when it is not
// defined.
//
// # Safety
// `profile` must be a live handle; `out` must be writable.
enum BlStatus bl_profile_positivity(const struct BlProfile *profile, double *out);

// Profile as a JSON document. Release the string with [`bl_string_free`].
//
// # Safety
// `profile` must be a live handle; `out` must be writable.
enum BlStatus bl_profile_to_json(const struct BlProfile *profile, char **out);

// # Safety
// `s` must come from this library and not be freed yet, or be null.
void bl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BALANCE_LENS_H */
